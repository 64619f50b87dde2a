#pragma once

// Catalog of impact and impulsive systems. Each model comes in a physical
// form (constrained or impulsive, fed to the event-driven oracle) and in one
// or more transformed smooth forms.

#include "nonsmooth/integrators.hpp"
#include "nonsmooth/transforms.hpp"
#include "nonsmooth/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nonsmooth {

/// Declarative description of one catalog system in its physical form.
struct ModelSpec {
    std::string id;
    std::size_t dimension = 0;
    std::map<std::string, double> params;
    /// Field between impacts/impulses.
    Rhs rhs;
    std::vector<Guard> constraints;
    std::optional<ImpulseTrain> impulse_train;
    /// Present for stochastic models.
    std::optional<std::uint64_t> seed;

    double param(const std::string& name) const;
};

// ---- vibro-impact chain -------------------------------------------------
//
// N unit masses between two walls, linked by springs k_0..k_N, each mass
// confined to |q_i| <= 1. State layout is (x_1..x_N, xdot_1..xdot_N) in both
// the unfolded and the physical form.

/// Unfolded accelerations:
///   xddot_i = -[(k_{i-1}+k_i) tau(x_i) - k_{i-1} tau(x_{i-1}) - k_i tau(x_{i+1})] tau'(x_i)
/// with tau(x_0) = tau(x_{N+1}) = 0. `k` holds N+1 stiffnesses.
void chain_accelerations(std::span<const double> x, std::span<const double> k,
                         std::span<double> acc);

Rhs chain_rhs(std::vector<double> k);

/// E = 1/2 sum xdot_i^2 + 1/2 sum_{i=0}^{N} k_i [tau(x_{i+1}) - tau(x_i)]^2.
double chain_energy(std::span<const double> state, std::span<const double> k);

/// Corner surfaces cos(pi x_i / 2); tau' flips sign on each.
std::vector<Surface> chain_corner_surfaces(std::size_t n);

/// Physical image (q_i, qdot_i) = (tau(x_i), tau'(x_i) xdot_i).
State chain_to_physical(std::span<const double> state);

/// Linear chain with rigid barriers at q_i = +-1 and kappa = 1.
ModelSpec chain_model(std::vector<double> k);

// ---- one-sided oscillator -----------------------------------------------

/// Derivative P'(q) of the potential.
using PotentialSlope = std::function<double(double q)>;

/// xddot = -P'(|x+1| - 1) sgn(x+1).
double one_sided_oscillator_rhs(double x, double xdot, const PotentialSlope& dp);

/// Unfolded smooth form, state (x, xdot).
Rhs one_sided_rhs(PotentialSlope dp);

/// Surface x + 1 = 0 where the unfolded force changes sign.
std::vector<Surface> one_sided_surfaces();

/// qddot = -P'(q) with an elastic barrier at q = -1.
ModelSpec one_sided_model(PotentialSlope dp);

// ---- piecewise-linear oscillator -----------------------------------------

/// qddot = -omega^2 q + eps omega^2 theta(q) q.
double pwl_oscillator_rhs(double q, double t, double omega, double eps);

Rhs pwl_rhs(double omega, double eps);

/// Stiffness switch at q = 0.
std::vector<Surface> pwl_surfaces();

// ---- inelastic harmonic oscillator ----------------------------------------

/// x1'' + omega^2 x1 = 0 above a barrier at x1 = 0 with restitution kappa.
ModelSpec inelastic_oscillator_model(double omega, double kappa);

/// The same system in Ivanov coordinates (s, v).
Rhs inelastic_oscillator_ivanov_rhs(double omega, double kappa);

// ---- cubic damping under a pulse ----------------------------------------

/// vdot = -k v^3 + q delta(t - t1), state (v).
ModelSpec cubic_damping_pulse_model(double k, double q, double t1);

/// Smooth field for u = v - q theta(t - t1).
Rhs cubic_damping_theta_rhs(double k, double q, double t1);

/// Closed-form response from rest: 0 before t1, q / sqrt(1 + 2 k q^2 (t-t1))
/// after.
double cubic_damping_closed_form(double k, double q, double t1, double t);

// ---- randomized impulsive Duffing ---------------------------------------

/// x'' + zeta x' + x^3 = B sin t sum delta(t - t_i), state (x, xdot).
Rhs duffing_rhs(double zeta);

/// Uniform draw on [-1, 1] from the top 53 bits of a 64-bit Mersenne
/// twister; identical on every platform.
double uniform_symmetric(std::uint64_t bits);

/// Impulse train with gaps d_i = (pi/12)(1 + beta eta_i) starting at t0 and
/// jumps (0, B sin t_i). `count` impulses are materialized.
ModelSpec duffing_impulse_model(double zeta, double b, double beta,
                                std::uint64_t seed, std::size_t count,
                                double t0 = 0.0);

}  // namespace nonsmooth
