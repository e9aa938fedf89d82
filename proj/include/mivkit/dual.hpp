#pragma once

#include <cmath>

namespace mivkit {

// Forward-mode dual number carrying two partial derivatives at once
// (d0, d1). Used to differentiate the compact-model equations exactly
// instead of maintaining hand-written derivative code.
struct Dual {
    double v = 0.0;
    double d0 = 0.0;
    double d1 = 0.0;

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, double dd0, double dd1) : v(value), d0(dd0), d1(dd1) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d0 + b.d0, a.d1 + b.d1}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d0 - b.d0, a.d1 - b.d1}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d0, -a.d1}; }
inline Dual operator*(Dual a, Dual b) {
    return {a.v * b.v, a.d0 * b.v + a.v * b.d0, a.d1 * b.v + a.v * b.d1};
}
inline Dual operator/(Dual a, Dual b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    return {q, (a.d0 - q * b.d0) * inv, (a.d1 - q * b.d1) * inv};
}

inline Dual exp(Dual a) {
    const double e = std::exp(a.v);
    return {e, e * a.d0, e * a.d1};
}
inline Dual log(Dual a) {
    const double inv = 1.0 / a.v;
    return {std::log(a.v), a.d0 * inv, a.d1 * inv};
}
inline Dual log1p(Dual a) {
    const double inv = 1.0 / (1.0 + a.v);
    return {std::log1p(a.v), a.d0 * inv, a.d1 * inv};
}
// pow with a constant exponent; base must be positive.
inline Dual pow(Dual a, double c) {
    const double p = std::pow(a.v, c);
    const double s = c * std::pow(a.v, c - 1.0);
    return {p, s * a.d0, s * a.d1};
}
inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }

}  // namespace mivkit
