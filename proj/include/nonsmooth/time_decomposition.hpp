#pragma once

// Local-time decomposition of a horizon [t_0, T] cut at impulse instants.
//
// Interval i is [t_i, t_{i+1}) with t_n = T closing the last one. Its local
// time s_i = ramp(t - t_i, d_i) runs over [0, d_i] and its indicator
// sdot_i is 1 on the interval, 0 elsewhere. Then
//
//   t = sum_i (t_i + s_i) sdot_i,   f(t) = sum_i f(t_i + s_i) sdot_i.

#include "nonsmooth/integrators.hpp"
#include "nonsmooth/transforms.hpp"
#include "nonsmooth/types.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nonsmooth {

struct LocalTime {
    double s = 0.0;
    double sdot = 0.0;
};

class LocalTimeGrid {
public:
    /// `times` strictly increasing, horizon > times.back().
    LocalTimeGrid(std::vector<double> times, double horizon);

    std::size_t size() const { return times_.size(); }
    const std::vector<double>& times() const { return times_; }
    double horizon() const { return horizon_; }
    double start() const { return times_.front(); }
    double gap(std::size_t i) const;
    double interval_end(std::size_t i) const;

    /// Index of the interval containing t; t = t_i maps to interval i and the
    /// horizon belongs to the last interval. Throws std::invalid_argument
    /// outside [t_0, T].
    std::size_t active_interval(double t) const;

    /// (s_i, sdot_i) for every interval.
    std::vector<LocalTime> local_times(double t) const;

    /// sum_i (t_i + s_i) sdot_i.
    double reconstruct(double t) const;

    /// sum_i f(t_i + s_i) sdot_i.
    double compose(const std::function<double(double)>& f, double t) const;

private:
    std::vector<double> times_;
    double horizon_;
};

/// Free function form of LocalTimeGrid::local_times.
std::vector<LocalTime> local_times(const LocalTimeGrid& grid, double t);

struct DecomposedSolution {
    LocalTimeGrid grid;
    /// Interval i integrated in its local time s in [0, d_i].
    std::vector<Trajectory> intervals;
    /// Concatenation in global time. Right-continuous: the sample at t_i is
    /// post-jump, the pre-jump state sits in `jumps`.
    Trajectory global;
};

/// Solves x' = f(x, t) + sum p_i delta(t - t_i) with x = state_before before
/// t_0 (zero when empty) as a chain of smooth IVPs, one per interval, each
/// starting from the previous terminal state plus p_i. `output_times` are
/// landed exactly in the global trajectory.
DecomposedSolution eliminate_impulses(const Rhs& f, const ImpulseTrain& train,
                                      double horizon,
                                      const IntegratorConfig& config,
                                      State state_before = {},
                                      std::span<const double> output_times = {});

struct Snapshot {
    double t = 0.0;
    State x;
};

/// State just before each grid instant t_i, read from the jump records.
/// Throws nonsmooth::Error when the trajectory holds no record for some t_i.
std::vector<Snapshot> stroboscopic_samples(const Trajectory& traj,
                                           const LocalTimeGrid& grid);

/// x = p exp(-lambda s)(1 + sdot), s = |t - a|, sdot = sgn(t - a): the
/// response of x' + lambda x = 2 p delta(t - a) from rest.
double impulse_response_hyperbolic(double lambda, double p, double a, double t);

}  // namespace nonsmooth
