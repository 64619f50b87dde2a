#pragma once

// Nonsmooth basis functions and the hyperbolic (split-complex) algebra they
// induce.
//
// The triangular wave tau(x) has period 4 and unit slope; its derivative e(x)
// is the rectangular wave with e^2 = 1 off the corner set {x : x odd}.
// Products of "time-like" hyperbolic numbers a + b*sdot follow sdot^2 = 1.

#include <cmath>
#include <functional>

namespace nonsmooth {

/// Sign with sgn(0) = 0.
constexpr double sgn(double x) noexcept {
    return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

/// Unit step with theta(0) = 1.
constexpr double heaviside(double x) noexcept { return x >= 0.0 ? 1.0 : 0.0; }

/// Triangular sine-wave: x on [-1,1], 2-x on [1,3], extended 4-periodically.
/// Throws std::invalid_argument for non-finite x.
double triangular_wave(double x);

/// Derivative of triangular_wave: +1 on ascending, -1 on descending open
/// intervals, 0 exactly at corners (odd integers).
double triangular_derivative(double x);

/// True when x is a corner of the triangular wave (an odd integer).
bool is_triangular_corner(double x);

/// Saturating ramp (d + |t| - |t-d|)/2. Throws for d <= 0.
double ramp(double t, double d);

/// Hyperbolic number real + mirror * j with j^2 = 1.
struct HyperbolicValue {
    double real = 0.0;
    double mirror = 0.0;

    constexpr bool operator==(const HyperbolicValue&) const = default;

    constexpr HyperbolicValue operator+(HyperbolicValue o) const {
        return {real + o.real, mirror + o.mirror};
    }
    constexpr HyperbolicValue operator-(HyperbolicValue o) const {
        return {real - o.real, mirror - o.mirror};
    }
    constexpr HyperbolicValue operator-() const { return {-real, -mirror}; }
    constexpr HyperbolicValue operator*(HyperbolicValue o) const {
        return {real * o.real + mirror * o.mirror,
                real * o.mirror + mirror * o.real};
    }
    constexpr HyperbolicValue operator*(double c) const {
        return {real * c, mirror * c};
    }
    friend constexpr HyperbolicValue operator*(double c, HyperbolicValue u) {
        return u * c;
    }

    /// real - mirror * j
    constexpr HyperbolicValue conjugate() const { return {real, -mirror}; }

    /// sqrt(|real^2 - mirror^2|)
    double modulus() const;

    /// Value of the number once the basis element j is replaced by a scalar
    /// (for instance sdot = +-1 or e = tau'(x)).
    constexpr double evaluate(double basis) const {
        return real + mirror * basis;
    }
};

/// (a+bj)(c+dj) = (ac+bd) + (ad+bc)j. No division is provided: 1 +- j are
/// zero divisors.
constexpr HyperbolicValue hyp_mul(HyperbolicValue u, HyperbolicValue v) {
    return u * v;
}

/// Components in the idempotent basis i+- = (1 +- j)/2.
struct IdempotentPair {
    double plus = 0.0;
    double minus = 0.0;

    constexpr bool operator==(const IdempotentPair&) const = default;

    /// Componentwise product; the idempotent basis diagonalizes hyp_mul.
    constexpr IdempotentPair operator*(IdempotentPair o) const {
        return {plus * o.plus, minus * o.minus};
    }
};

constexpr IdempotentPair to_idempotent(HyperbolicValue u) {
    return {u.real + u.mirror, u.real - u.mirror};
}

constexpr HyperbolicValue from_idempotent(IdempotentPair p) {
    return {(p.plus + p.minus) * 0.5, (p.plus - p.minus) * 0.5};
}

/// Applies f to each idempotent component: x(t) = x(a+s) i+ + x(a-s) i-.
IdempotentPair apply_componentwise(const std::function<double(double)>& f,
                                   IdempotentPair p);

/// Positive time s = |t - a| together with its direction sdot = sgn(t - a).
struct PositiveTime {
    double s = 0.0;
    double direction = 0.0;

    /// t = a + s * sdot as the hyperbolic number a + s j.
    constexpr HyperbolicValue as_hyperbolic(double a) const { return {a, s}; }
    constexpr double reconstruct(double a) const { return a + s * direction; }
};

/// Turning-point time argument. At t == a the direction is 0.
PositiveTime positive_time(double t, double a);

/// X(s) = [f(a+s) + f(a-s)]/2, Y(s) = [f(a+s) - f(a-s)]/2 so that
/// f(t) = X + Y sdot at t = a +- s.
HyperbolicValue decompose_at_turn(const std::function<double(double)>& f,
                                  double a, double s);

/// Periodic (T = 4) analogue: X(tau) = [f(tau) + f(2-tau)]/2,
/// Y(tau) = [f(tau) - f(2-tau)]/2 with tau = tau(t); f(t) = X + Y e(t).
HyperbolicValue decompose_periodic(const std::function<double(double)>& f,
                                   double t);

}  // namespace nonsmooth
