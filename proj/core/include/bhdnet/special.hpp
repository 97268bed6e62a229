#pragma once

namespace bhdnet::special {

// ln Γ(x) for x > 0.
double log_gamma(double x);
// ψ(x), ψ'(x), ψ''(x) for x > 0.
double digamma(double x);
double trigamma(double x);
double tetragamma(double x);

}  // namespace bhdnet::special
