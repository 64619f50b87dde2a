#include "nonsmooth/models.hpp"

#include "nonsmooth/algebra.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>

namespace nonsmooth {

namespace {

void require_stiffnesses(const std::vector<double>& k) {
    if (k.size() < 2) {
        throw std::invalid_argument("chain needs at least two stiffnesses");
    }
    for (double ki : k) {
        if (!(ki > 0.0) || !std::isfinite(ki)) {
            throw std::invalid_argument("chain stiffnesses must be positive");
        }
    }
}

void require_kappa(double kappa) {
    if (!(kappa > 0.0 && kappa <= 1.0)) {
        throw std::invalid_argument("restitution kappa must lie in (0, 1]");
    }
}

}  // namespace

double ModelSpec::param(const std::string& name) const {
    const auto it = params.find(name);
    if (it == params.end()) {
        throw std::invalid_argument("model '" + id + "' has no parameter '" +
                                    name + "'");
    }
    return it->second;
}

void chain_accelerations(std::span<const double> x, std::span<const double> k,
                         std::span<double> acc) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? triangular_wave(x[i - 1]) : 0.0;
        const double right = i + 1 < n ? triangular_wave(x[i + 1]) : 0.0;
        const double self = triangular_wave(x[i]);
        acc[i] = -((k[i] + k[i + 1]) * self - k[i] * left - k[i + 1] * right) *
                 triangular_derivative(x[i]);
    }
}

Rhs chain_rhs(std::vector<double> k) {
    require_stiffnesses(k);
    return [k = std::move(k)](double, std::span<const double> y,
                              std::span<double> dy) {
        const std::size_t n = k.size() - 1;
        for (std::size_t i = 0; i < n; ++i) dy[i] = y[n + i];
        chain_accelerations(y.first(n), k, dy.subspan(n, n));
    };
}

double chain_energy(std::span<const double> state, std::span<const double> k) {
    const std::size_t n = k.size() - 1;
    if (state.size() != 2 * n) {
        throw std::invalid_argument("chain state size does not match stiffnesses");
    }
    double kinetic = 0.0;
    for (std::size_t i = 0; i < n; ++i) kinetic += state[n + i] * state[n + i];
    double potential = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double next = i < n ? triangular_wave(state[i]) : 0.0;
        potential += k[i] * (next - prev) * (next - prev);
        prev = next;
    }
    return 0.5 * (kinetic + potential);
}

std::vector<Surface> chain_corner_surfaces(std::size_t n) {
    std::vector<Surface> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back([i](double, std::span<const double> y) {
            return std::cos(std::numbers::pi * y[i] / 2.0);
        });
    }
    return out;
}

State chain_to_physical(std::span<const double> state) {
    const std::size_t n = state.size() / 2;
    State q(state.size());
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = triangular_wave(state[i]);
        q[n + i] = triangular_derivative(state[i]) * state[n + i];
    }
    return q;
}

ModelSpec chain_model(std::vector<double> k) {
    require_stiffnesses(k);
    const std::size_t n = k.size() - 1;
    ModelSpec spec;
    spec.id = "chain";
    spec.dimension = 2 * n;
    for (std::size_t i = 0; i <= n; ++i) {
        spec.params["k" + std::to_string(i)] = k[i];
    }
    spec.rhs = [k, n](double, std::span<const double> y, std::span<double> dy) {
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i > 0 ? y[i - 1] : 0.0;
            const double right = i + 1 < n ? y[i + 1] : 0.0;
            dy[i] = y[n + i];
            dy[n + i] = -((k[i] + k[i + 1]) * y[i] - k[i] * left - k[i + 1] * right);
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        spec.constraints.push_back(
            Guard{[i](std::span<const double> y) { return 1.0 - y[i]; }, n + i, 1.0});
        spec.constraints.push_back(
            Guard{[i](std::span<const double> y) { return 1.0 + y[i]; }, n + i, 1.0});
    }
    return spec;
}

double one_sided_oscillator_rhs(double x, double, const PotentialSlope& dp) {
    return -dp(std::abs(x + 1.0) - 1.0) * sgn(x + 1.0);
}

Rhs one_sided_rhs(PotentialSlope dp) {
    return [dp = std::move(dp)](double, std::span<const double> y,
                                std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = one_sided_oscillator_rhs(y[0], y[1], dp);
    };
}

std::vector<Surface> one_sided_surfaces() {
    return {[](double, std::span<const double> y) { return y[0] + 1.0; }};
}

ModelSpec one_sided_model(PotentialSlope dp) {
    ModelSpec spec;
    spec.id = "one-sided";
    spec.dimension = 2;
    spec.rhs = [dp = std::move(dp)](double, std::span<const double> y,
                                    std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -dp(y[0]);
    };
    spec.constraints.push_back(
        Guard{[](std::span<const double> y) { return y[0] + 1.0; }, 1, 1.0});
    return spec;
}

double pwl_oscillator_rhs(double q, double, double omega, double eps) {
    if (eps < 0.0) throw std::invalid_argument("pwl oscillator needs eps >= 0");
    const double w2 = omega * omega;
    return -w2 * q + eps * w2 * heaviside(q) * q;
}

Rhs pwl_rhs(double omega, double eps) {
    if (eps < 0.0) throw std::invalid_argument("pwl oscillator needs eps >= 0");
    return [omega, eps](double t, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = pwl_oscillator_rhs(y[0], t, omega, eps);
    };
}

std::vector<Surface> pwl_surfaces() {
    return {[](double, std::span<const double> y) { return y[0]; }};
}

ModelSpec inelastic_oscillator_model(double omega, double kappa) {
    require_kappa(kappa);
    ModelSpec spec;
    spec.id = "inelastic";
    spec.dimension = 2;
    spec.params = {{"omega", omega}, {"kappa", kappa}};
    const double w2 = omega * omega;
    spec.rhs = [w2](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -w2 * y[0];
    };
    spec.constraints.push_back(
        Guard{[](std::span<const double> y) { return y[0]; }, 1, kappa});
    return spec;
}

Rhs inelastic_oscillator_ivanov_rhs(double omega, double kappa) {
    require_kappa(kappa);
    const double w2 = omega * omega;
    return make_ivanov_rhs([w2](double x1, double, double) { return w2 * x1; },
                           restitution_to_k(kappa));
}

ModelSpec cubic_damping_pulse_model(double k, double q, double t1) {
    if (!(k > 0.0)) throw std::invalid_argument("cubic damping needs k > 0");
    ModelSpec spec;
    spec.id = "cubic";
    spec.dimension = 1;
    spec.params = {{"k", k}, {"q", q}, {"t1", t1}};
    spec.rhs = [k](double, std::span<const double> v, std::span<double> dv) {
        dv[0] = -k * v[0] * v[0] * v[0];
    };
    spec.impulse_train = make_scalar_impulse_train({t1}, {q}, 1, 0);
    return spec;
}

Rhs cubic_damping_theta_rhs(double k, double q, double t1) {
    const ModelSpec spec = cubic_damping_pulse_model(k, q, t1);
    return theta_substitute_rhs(spec.rhs, *spec.impulse_train);
}

double cubic_damping_closed_form(double k, double q, double t1, double t) {
    if (t < t1) return 0.0;
    return q / std::sqrt(1.0 + 2.0 * k * q * q * (t - t1));
}

Rhs duffing_rhs(double zeta) {
    return [zeta](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -zeta * y[1] - y[0] * y[0] * y[0];
    };
}

double uniform_symmetric(std::uint64_t bits) {
    return -1.0 + 2.0 * std::ldexp(static_cast<double>(bits >> 11), -53);
}

ModelSpec duffing_impulse_model(double zeta, double b, double beta,
                                std::uint64_t seed, std::size_t count,
                                double t0) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw std::invalid_argument("duffing gap spread beta must lie in [0, 1)");
    }
    if (zeta < 0.0) throw std::invalid_argument("duffing damping zeta must be >= 0");
    if (count == 0) throw std::invalid_argument("duffing model needs impulses");

    ModelSpec spec;
    spec.id = "duffing";
    spec.dimension = 2;
    spec.params = {{"zeta", zeta}, {"B", b}, {"beta", beta}, {"t0", t0}};
    spec.seed = seed;
    spec.rhs = duffing_rhs(zeta);

    std::mt19937_64 rng(seed);
    ImpulseTrain train;
    train.times.reserve(count);
    train.magnitudes.reserve(count);
    double t = t0;
    for (std::size_t i = 0; i < count; ++i) {
        train.times.push_back(t);
        train.magnitudes.push_back({0.0, b * std::sin(t)});
        // Draw even for beta = 0 so the sequence of times does not depend on
        // whether the spread is switched on.
        const double eta = uniform_symmetric(rng());
        t += std::numbers::pi / 12.0 * (1.0 + beta * eta);
    }
    spec.impulse_train = std::move(train);
    return spec;
}

}  // namespace nonsmooth
