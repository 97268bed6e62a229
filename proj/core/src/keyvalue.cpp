#include <bhdnet/keyvalue.hpp>

#include <fstream>
#include <sstream>

#include <bhdnet/error.hpp>

namespace bhdnet {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueDoc KeyValueDoc::parse(const std::string& text) {
    KeyValueDoc doc;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw DataError("line " + std::to_string(lineno) + ": empty key");
        std::vector<std::string> values;
        std::istringstream items(line.substr(eq + 1));
        std::string item;
        while (std::getline(items, item, ',')) {
            item = trim(item);
            if (item.empty()) throw DataError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
            values.push_back(item);
        }
        if (values.empty()) throw DataError("line " + std::to_string(lineno) + ": no value for '" + key + "'");
        if (!doc.values_.emplace(key, std::move(values)).second) throw DataError("duplicate key '" + key + "'");
    }
    return doc;
}

KeyValueDoc KeyValueDoc::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const std::vector<std::string>& KeyValueDoc::list(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw DataError("missing key '" + key + "'");
    used_[key] = true;
    return it->second;
}

const std::string& KeyValueDoc::one(const std::string& key) const {
    const auto& v = list(key);
    if (v.size() != 1) throw DataError("key '" + key + "' takes a single value");
    return v.front();
}

std::vector<std::string> KeyValueDoc::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, _] : values_) {
        if (!used_.count(key)) out.push_back(key);
    }
    return out;
}

}  // namespace bhdnet
