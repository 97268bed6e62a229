#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bhdnet {

/// `key = value[, value...]` lines; `#` starts a comment. Keys are unique.
class KeyValueDoc {
public:
    static KeyValueDoc parse(const std::string& text);
    static KeyValueDoc load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::vector<std::string>& list(const std::string& key) const;
    // Exactly one value; throws DataError otherwise.
    const std::string& one(const std::string& key) const;

    // Keys that were never read through list()/one().
    std::vector<std::string> unused_keys() const;

private:
    std::map<std::string, std::vector<std::string>> values_;
    mutable std::map<std::string, bool> used_;
};

}  // namespace bhdnet
