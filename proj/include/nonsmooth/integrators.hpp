#pragma once

// Explicit Runge-Kutta integration for piecewise-smooth systems.
//
// integrate_smooth() steps a smooth-by-parts field and restarts on declared
// surfaces; integrate_event_driven() is the reference impact integrator that
// applies restitution maps at located guard roots. Both share one
// Dormand-Prince 5(4) engine with PI step-size control.

#include "nonsmooth/transforms.hpp"
#include "nonsmooth/types.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace nonsmooth {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    /// Root-location tolerance in time; 0 selects 1e-12 * span.
    double event_tol = 0.0;
    /// 0 selects an automatic initial step.
    double initial_step = 0.0;
    std::size_t max_steps = 20'000'000;
    /// Oracle aborts once this many impacts fall inside one event_tol window.
    std::size_t chatter_count = 8;
    /// Impacts with |v_pre| below this are flagged as grazing.
    double grazing_tol = 1e-8;

    /// Effective event tolerance for a run over `span`.
    double resolved_event_tol(double span) const;
    /// Throws std::invalid_argument on non-positive tolerances or
    /// event_tol > max_step.
    void validate(double span) const;
};

struct Sample {
    double t = 0.0;
    State x;
};

/// Restitution event recorded by the oracle integrator.
struct ImpactEvent {
    double t_star = 0.0;
    std::size_t guard_index = 0;
    double v_pre = 0.0;
    double v_post = 0.0;
    double kappa = 1.0;
    bool grazing = false;
};

/// A declared surface crossed by integrate_smooth: the step is split at
/// [t_before, t_after], an interval no wider than the event tolerance.
struct SurfaceCrossing {
    std::size_t surface_index = 0;
    double t_before = 0.0;
    double t_after = 0.0;
    State before;
    State after;
};

/// Scheduled state jump (impulse) applied at an exact time.
struct JumpRecord {
    double t = 0.0;
    std::size_t index = 0;
    State before;
    State after;
};

struct IntegratorStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    std::size_t events = 0;
};

/// Samples are right-continuous: at an impact or jump the stored state is the
/// post-event state; the pre-event state lives in the event record.
struct Trajectory {
    std::vector<Sample> samples;
    std::vector<ImpactEvent> events;
    std::vector<SurfaceCrossing> crossings;
    std::vector<JumpRecord> jumps;
    IntegratorStats stats;

    const Sample& front() const { return samples.front(); }
    const Sample& back() const { return samples.back(); }

    /// Sample stored at exactly time t (requested through output_times).
    /// Throws nonsmooth::Error when absent.
    const Sample& at(double t) const;
};

/// Raised for step-size underflow, non-finite states, chattering guards and
/// step-budget exhaustion.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Adaptive integration with step restart on each surface root. Steps are
/// forced to land on every `output_times` entry inside the span.
Trajectory integrate_smooth(const Rhs& rhs, State x0, TimeSpan span,
                            const IntegratorConfig& config,
                            std::span<const Surface> surfaces = {},
                            std::span<const double> output_times = {});

/// Unilateral constraint g(x) >= 0 with Newton restitution on one velocity
/// component.
struct Guard {
    std::function<double(std::span<const double> x)> g;
    std::size_t velocity_index = 0;
    double kappa = 1.0;
};

/// Reference integrator: smooth flow between events, v -> -kappa v at each
/// guard root, and exact velocity jumps at the optional impulse instants.
Trajectory integrate_event_driven(const Rhs& rhs,
                                  std::span<const Guard> guards, State x0,
                                  TimeSpan span, const IntegratorConfig& config,
                                  const ImpulseTrain* impulses = nullptr,
                                  std::span<const double> output_times = {});

/// Classical fixed-step RK4 with n_steps equal steps.
Trajectory integrate_fixed_rk4(const Rhs& rhs, State x0, TimeSpan span,
                               std::size_t n_steps);

/// delta_eps(t - t1) = eps^-2 cosh^-2((t - t1)/eps^2) / 2.
double smoothed_delta(double t, double t1, double eps);

/// theta_eps(t - t1) = (1 + tanh((t - t1)/eps^2)) / 2, the antiderivative of
/// smoothed_delta.
double smoothed_step(double t, double t1, double eps);

}  // namespace nonsmooth
