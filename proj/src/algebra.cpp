#include "nonsmooth/algebra.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace nonsmooth {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument(std::string(what) +
                                    ": argument must be finite");
    }
}

// Phase shifted so that the ascending branch starts at 0: r in [0, 4).
double wave_phase(double x) {
    double r = std::fmod(x + 1.0, 4.0);
    if (r < 0.0) r += 4.0;
    // fmod of a tiny negative value can round up to exactly 4.
    if (r >= 4.0) r -= 4.0;
    return r;
}

}  // namespace

double triangular_wave(double x) {
    require_finite(x, "triangular_wave");
    const double r = wave_phase(x);
    return r <= 2.0 ? r - 1.0 : 3.0 - r;
}

bool is_triangular_corner(double x) {
    if (!std::isfinite(x)) return false;
    const double r = wave_phase(x);
    return r == 0.0 || r == 2.0;
}

double triangular_derivative(double x) {
    require_finite(x, "triangular_derivative");
    const double r = wave_phase(x);
    if (r == 0.0 || r == 2.0) return 0.0;
    return r < 2.0 ? 1.0 : -1.0;
}

double ramp(double t, double d) {
    if (!(d > 0.0)) throw std::invalid_argument("ramp: duration must be > 0");
    require_finite(t, "ramp");
    // Same function as (d + |t| - |t - d|)/2, without the rounding that can
    // push the result past d.
    return std::clamp(t, 0.0, d);
}

double HyperbolicValue::modulus() const {
    return std::sqrt(std::abs(real * real - mirror * mirror));
}

IdempotentPair apply_componentwise(const std::function<double(double)>& f,
                                   IdempotentPair p) {
    return {f(p.plus), f(p.minus)};
}

PositiveTime positive_time(double t, double a) {
    require_finite(t, "positive_time");
    require_finite(a, "positive_time");
    return {std::abs(t - a), sgn(t - a)};
}

HyperbolicValue decompose_at_turn(const std::function<double(double)>& f,
                                  double a, double s) {
    const double fp = f(a + s);
    const double fm = f(a - s);
    return {0.5 * (fp + fm), 0.5 * (fp - fm)};
}

HyperbolicValue decompose_periodic(const std::function<double(double)>& f,
                                   double t) {
    const double tau = triangular_wave(t);
    const double f1 = f(tau);
    const double f2 = f(2.0 - tau);
    return {0.5 * (f1 + f2), 0.5 * (f1 - f2)};
}

}  // namespace nonsmooth
