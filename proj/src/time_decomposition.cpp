#include "nonsmooth/time_decomposition.hpp"

#include "nonsmooth/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace nonsmooth {

LocalTimeGrid::LocalTimeGrid(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
    if (times_.empty()) throw std::invalid_argument("time grid needs at least one instant");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i])) {
            throw std::invalid_argument("time grid instants must be finite");
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw std::invalid_argument("time grid instants must increase strictly");
        }
    }
    if (!(horizon_ > times_.back()) || !std::isfinite(horizon_)) {
        throw std::invalid_argument("time grid horizon must exceed the last instant");
    }
}

double LocalTimeGrid::interval_end(std::size_t i) const {
    return i + 1 < times_.size() ? times_[i + 1] : horizon_;
}

double LocalTimeGrid::gap(std::size_t i) const { return interval_end(i) - times_[i]; }

std::size_t LocalTimeGrid::active_interval(double t) const {
    if (!(t >= times_.front() && t <= horizon_)) {
        std::ostringstream os;
        os.precision(17);
        os << "time " << t << " outside grid range [" << times_.front() << ", "
           << horizon_ << "]";
        throw std::invalid_argument(os.str());
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return static_cast<std::size_t>(it - times_.begin()) - 1;
}

std::vector<LocalTime> LocalTimeGrid::local_times(double t) const {
    const std::size_t active = active_interval(t);
    std::vector<LocalTime> out(times_.size());
    for (std::size_t i = 0; i < times_.size(); ++i) {
        out[i].s = ramp(t - times_[i], gap(i));
        out[i].sdot = i == active ? 1.0 : 0.0;
    }
    return out;
}

double LocalTimeGrid::reconstruct(double t) const {
    return compose([](double x) { return x; }, t);
}

double LocalTimeGrid::compose(const std::function<double(double)>& f,
                              double t) const {
    const auto lt = local_times(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        if (lt[i].sdot != 0.0) sum += f(times_[i] + lt[i].s) * lt[i].sdot;
    }
    return sum;
}

std::vector<LocalTime> local_times(const LocalTimeGrid& grid, double t) {
    return grid.local_times(t);
}

DecomposedSolution eliminate_impulses(const Rhs& f, const ImpulseTrain& train,
                                      double horizon,
                                      const IntegratorConfig& config,
                                      State state_before,
                                      std::span<const double> output_times) {
    if (train.empty()) throw std::invalid_argument("impulse train is empty");
    const std::size_t dim = train.magnitudes.front().size();
    train.validate(dim);
    if (state_before.empty()) state_before.assign(dim, 0.0);
    if (state_before.size() != dim) {
        throw std::invalid_argument("initial state size does not match impulses");
    }

    DecomposedSolution sol{LocalTimeGrid(train.times, horizon), {}, {}};
    const LocalTimeGrid& grid = sol.grid;
    Trajectory& global = sol.global;

    // Requested global outputs, grouped by interval as local offsets.
    std::vector<std::map<double, double>> local_outputs(grid.size());
    for (double t : output_times) {
        if (t <= grid.start() || t > horizon) continue;
        const std::size_t i = grid.active_interval(t);
        if (t == grid.times()[i]) continue;  // interval start, always sampled
        local_outputs[i].emplace(t - grid.times()[i], t);
    }

    State x = std::move(state_before);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ti = grid.times()[i];
        const double end = grid.interval_end(i);

        JumpRecord jump;
        jump.t = ti;
        jump.index = i;
        jump.before = x;
        for (std::size_t c = 0; c < dim; ++c) x[c] += train.magnitudes[i][c];
        jump.after = x;
        global.jumps.push_back(std::move(jump));

        const Rhs local = [&f, ti](double s, std::span<const double> y,
                                   std::span<double> dy) { f(ti + s, y, dy); };
        std::vector<double> local_grid;
        for (const auto& [s, t] : local_outputs[i]) local_grid.push_back(s);
        Trajectory piece = integrate_smooth(local, x, TimeSpan{0.0, end - ti},
                                            config, {}, local_grid);

        global.stats.accepted += piece.stats.accepted;
        global.stats.rejected += piece.stats.rejected;
        global.stats.rhs_evaluations += piece.stats.rhs_evaluations;

        const bool last = i + 1 == grid.size();
        for (std::size_t k = 0; k < piece.samples.size(); ++k) {
            const Sample& smp = piece.samples[k];
            double t = ti + smp.t;
            if (k == 0) {
                t = ti;
            } else if (k + 1 == piece.samples.size()) {
                // Terminal state: pre-jump state of the next interval.
                if (!last) break;
                t = horizon;
            } else if (const auto it = local_outputs[i].find(smp.t);
                       it != local_outputs[i].end()) {
                t = it->second;
            }
            if (!global.samples.empty() && t <= global.samples.back().t) continue;
            global.samples.push_back(Sample{t, smp.x});
        }
        x = piece.back().x;
        sol.intervals.push_back(std::move(piece));
    }
    return sol;
}

std::vector<Snapshot> stroboscopic_samples(const Trajectory& traj,
                                           const LocalTimeGrid& grid) {
    std::vector<Snapshot> out;
    out.reserve(grid.size());
    std::size_t cursor = 0;
    for (double ti : grid.times()) {
        while (cursor < traj.jumps.size() && traj.jumps[cursor].t < ti) ++cursor;
        if (cursor == traj.jumps.size() || traj.jumps[cursor].t != ti) {
            std::ostringstream os;
            os.precision(17);
            os << "trajectory has no jump record at t=" << ti;
            throw Error(os.str());
        }
        out.push_back(Snapshot{ti, traj.jumps[cursor].before});
    }
    return out;
}

double impulse_response_hyperbolic(double lambda, double p, double a, double t) {
    const PositiveTime pt = positive_time(t, a);
    return p * std::exp(-lambda * pt.s) * (1.0 + pt.direction);
}

}  // namespace nonsmooth
