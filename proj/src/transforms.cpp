#include "nonsmooth/transforms.hpp"

#include "nonsmooth/algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace nonsmooth {

void ImpulseTrain::validate(std::size_t dimension) const {
    if (times.size() != magnitudes.size()) {
        throw std::invalid_argument(
            "impulse train: times and magnitudes differ in length");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i])) {
            throw std::invalid_argument("impulse train: non-finite time");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw std::invalid_argument(
                "impulse train: times must be strictly increasing");
        }
        if (magnitudes[i].size() != dimension) {
            throw std::invalid_argument(
                "impulse train: magnitude dimension mismatch");
        }
    }
}

void ImpulseTrain::accumulated_jump(double t, std::span<double> out) const {
    for (double& o : out) o = 0.0;
    for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i) {
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += magnitudes[i][c];
    }
}

ImpulseTrain make_scalar_impulse_train(const std::vector<double>& times,
                                       const std::vector<double>& values,
                                       std::size_t dimension,
                                       std::size_t component) {
    if (times.size() != values.size()) {
        throw std::invalid_argument(
            "impulse train: times and values differ in length");
    }
    if (component >= dimension) {
        throw std::invalid_argument("impulse train: component out of range");
    }
    ImpulseTrain train;
    train.times = times;
    train.magnitudes.reserve(values.size());
    for (double q : values) {
        State m(dimension, 0.0);
        m[component] = q;
        train.magnitudes.push_back(std::move(m));
    }
    train.validate(dimension);
    return train;
}

Rhs theta_substitute_rhs(Rhs f, ImpulseTrain train) {
    if (train.empty()) return f;
    return [f = std::move(f), train = std::move(train)](
               double t, std::span<const double> u, std::span<double> dudt) {
        State v(u.size());
        train.accumulated_jump(t, v);
        for (std::size_t c = 0; c < v.size(); ++c) v[c] += u[c];
        f(t, v, dudt);
    };
}

State theta_reconstruct(const ImpulseTrain& train, double t,
                        std::span<const double> u) {
    State v(u.size());
    train.accumulated_jump(t, v);
    for (std::size_t c = 0; c < v.size(); ++c) v[c] += u[c];
    return v;
}

std::vector<Surface> impulse_time_surfaces(const ImpulseTrain& train) {
    std::vector<Surface> out;
    out.reserve(train.size());
    for (double ti : train.times) {
        out.push_back([ti](double t, std::span<const double>) { return t - ti; });
    }
    return out;
}

double parametric_alpha(double k) {
    if (!std::isfinite(k)) {
        throw std::invalid_argument("parametric_alpha: k must be finite");
    }
    // Direct evaluation cancels catastrophically near 0; use the series
    // 1/2 + k/12 - k^3/720 there.
    if (std::abs(k) < 1e-3) return 0.5 + k / 12.0 - k * k * k / 720.0;
    return 1.0 / (-std::expm1(-k)) - 1.0 / k;
}

double parametric_lambda(double k) {
    return k / (1.0 + parametric_alpha(k) * k);
}

double unfold_one_sided(double x) { return -1.0 + std::abs(x + 1.0); }

double unfold_one_sided_velocity(double x, double xdot) {
    return sgn(x + 1.0) * xdot;
}

double unfold_two_sided(double x) { return triangular_wave(x); }

double unfold_two_sided_velocity(double x, double xdot) {
    return triangular_derivative(x) * xdot;
}

double restitution_to_k(double kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) {
        throw std::invalid_argument(
            "restitution coefficient must lie in (0, 1]");
    }
    return (1.0 - kappa) / (1.0 + kappa);
}

PhysicalState ivanov_to_physical(const IvanovState& y) {
    const double ss = sgn(y.s);
    const double ssv = sgn(y.s * y.v);
    return {y.s * ss, ss * (1.0 - y.k * ssv) * y.v};
}

IvanovState physical_to_ivanov(PhysicalState x, double k) {
    if (x.x1 < 0.0) {
        throw std::invalid_argument("physical_to_ivanov: x1 must be >= 0");
    }
    // On the s > 0 sheet sgn(s v) = sgn(x2).
    return {x.x1, x.x2 / (1.0 - k * sgn(x.x2)), k};
}

std::pair<double, double> ivanov_rhs(const IvanovState& y, double t,
                                     const Force& f) {
    if (!(y.k >= 0.0 && y.k < 1.0)) {
        throw std::invalid_argument("ivanov_rhs: k must lie in [0, 1)");
    }
    const double ssv = sgn(y.s * y.v);
    const PhysicalState x = ivanov_to_physical(y);
    const double sdot = (1.0 - y.k * ssv) * y.v;
    const double vdot = -f(x.x1, x.x2, t) * sgn(y.s) * (1.0 + y.k * ssv) /
                        (1.0 - y.k * y.k);
    return {sdot, vdot};
}

Rhs make_ivanov_rhs(Force f, double k) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw std::invalid_argument("ivanov: k must lie in [0, 1)");
    }
    return [f = std::move(f), k](double t, std::span<const double> y,
                                 std::span<double> dydt) {
        const auto [sdot, vdot] = ivanov_rhs({y[0], y[1], k}, t, f);
        dydt[0] = sdot;
        dydt[1] = vdot;
    };
}

std::vector<Surface> ivanov_surfaces() {
    return {
        [](double, std::span<const double> y) { return y[0]; },
        [](double, std::span<const double> y) { return y[1]; },
    };
}

}  // namespace nonsmooth
