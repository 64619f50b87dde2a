#pragma once

// Coordinate and state transformations that remove impulsive inputs and
// impact constraints from equations of motion.

#include "nonsmooth/types.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace nonsmooth {

/// Ordered impulse instants with their state-space jump vectors.
struct ImpulseTrain {
    std::vector<double> times;
    std::vector<State> magnitudes;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    /// Throws std::invalid_argument unless times are finite, strictly
    /// increasing and every magnitude has `dimension` components.
    void validate(std::size_t dimension) const;

    /// Sum of q_i * theta(t - t_i) with theta(0) = 1, written into `out`.
    void accumulated_jump(double t, std::span<double> out) const;
};

/// Single-component convenience constructor (jumps applied to component
/// `component` of a `dimension`-sized state).
ImpulseTrain make_scalar_impulse_train(const std::vector<double>& times,
                                       const std::vector<double>& values,
                                       std::size_t dimension,
                                       std::size_t component);

/// g(u, t) = f(u + sum q_i theta(t - t_i), t). Integrating u' = g and adding
/// the accumulated jumps back reproduces the impulsive solution.
Rhs theta_substitute_rhs(Rhs f, ImpulseTrain train);

/// v = u + sum q_i theta(t - t_i).
State theta_reconstruct(const ImpulseTrain& train, double t,
                        std::span<const double> u);

/// Time surfaces t - t_i, one per impulse.
std::vector<Surface> impulse_time_surfaces(const ImpulseTrain& train);

/// alpha(k) = 1/(1 - exp(-k)) - 1/k, with alpha(0) = 1/2.
double parametric_alpha(double k);

/// Relative jump lambda = k / (1 + alpha k); equals 1 - exp(-k).
double parametric_lambda(double k);

/// q = -1 + |x + 1| (barrier at q = -1, origin preserved).
double unfold_one_sided(double x);
/// dq/dt for the one-sided unfolding.
double unfold_one_sided_velocity(double x, double xdot);

/// q = tau(x); |q| <= 1 automatically.
double unfold_two_sided(double x);
double unfold_two_sided_velocity(double x, double xdot);

/// k = (1 - kappa)/(1 + kappa) for kappa in (0, 1].
double restitution_to_k(double kappa);

struct IvanovState {
    double s = 0.0;
    double v = 0.0;
    double k = 0.0;
};

struct PhysicalState {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// x1 = s sgn(s), x2 = sgn(s) [1 - k sgn(s v)] v.
PhysicalState ivanov_to_physical(const IvanovState& y);

/// Inverse on the s >= 0 sheet, for initial conditions with x1 >= 0.
IvanovState physical_to_ivanov(PhysicalState x, double k);

/// Restoring force f(x1, x2, t) of x2' = -f.
using Force = std::function<double(double x1, double x2, double t)>;

/// (s', v') with s' = [1 - k sgn(sv)] v and
/// v' = -f(x1, x2, t) sgn(s) [1 + k sgn(sv)] / (1 - k^2).
std::pair<double, double> ivanov_rhs(const IvanovState& y, double t,
                                     const Force& f);

/// First-order RHS over (s, v). Throws for k outside [0, 1).
Rhs make_ivanov_rhs(Force f, double k);

/// Discontinuity surfaces of the Ivanov field: s = 0 and v = 0.
std::vector<Surface> ivanov_surfaces();

}  // namespace nonsmooth
