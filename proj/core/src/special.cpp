#include <bhdnet/special.hpp>

#include <cmath>

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace bhdnet::special {

namespace {

using quiet_policy = boost::math::policies::policy<
    boost::math::policies::domain_error<boost::math::policies::ignore_error>,
    boost::math::policies::pole_error<boost::math::policies::ignore_error>,
    boost::math::policies::overflow_error<boost::math::policies::ignore_error>,
    boost::math::policies::promote_double<false>>;

}  // namespace

double log_gamma(double x) {
#if defined(__GLIBC__)
    // Reentrant variant: std::lgamma writes the global signgam.
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

double digamma(double x) { return boost::math::digamma(x, quiet_policy{}); }

double trigamma(double x) { return boost::math::trigamma(x, quiet_policy{}); }

double tetragamma(double x) { return boost::math::polygamma(2, x, quiet_policy{}); }

}  // namespace bhdnet::special
