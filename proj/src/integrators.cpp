#include "nonsmooth/integrators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nonsmooth {

double IntegratorConfig::resolved_event_tol(double span) const {
    return event_tol > 0.0 ? event_tol : 1e-12 * std::abs(span);
}

void IntegratorConfig::validate(double span) const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0)) {
        throw std::invalid_argument(
            "integrator config: rel_tol, abs_tol and max_step must be > 0");
    }
    if (event_tol < 0.0 || initial_step < 0.0) {
        throw std::invalid_argument(
            "integrator config: event_tol and initial_step must be >= 0");
    }
    if (resolved_event_tol(span) > max_step) {
        throw std::invalid_argument(
            "integrator config: event_tol must not exceed max_step");
    }
    if (chatter_count < 2) {
        throw std::invalid_argument("integrator config: chatter_count < 2");
    }
}

const Sample& Trajectory::at(double t) const {
    auto it = std::lower_bound(
        samples.begin(), samples.end(), t,
        [](const Sample& s, double value) { return s.t < value; });
    if (it == samples.end() || it->t != t) {
        std::ostringstream os;
        os << "trajectory has no sample at t=" << t;
        throw Error(os.str());
    }
    return *it;
}

double smoothed_delta(double t, double t1, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("smoothed_delta: eps must be > 0");
    }
    const double w = eps * eps;
    // sech^2 u = 4 e^{-2|u|} / (1 + e^{-2|u|})^2, finite for large |u|.
    const double e = std::exp(-2.0 * std::abs((t - t1) / w));
    const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
    return 0.5 * sech2 / w;
}

double smoothed_step(double t, double t1, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("smoothed_step: eps must be > 0");
    }
    return 0.5 * (1.0 + std::tanh((t - t1) / (eps * eps)));
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                 e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(),
                       [](double v) { return std::isfinite(v); });
}

// Root indicator evaluated on the state; `t` is passed for time surfaces.
using Indicator = std::function<double(double t, std::span<const double> x)>;

enum class CrossingRule {
    // Any strict sign change (surfaces of integrate_smooth).
    either_direction,
    // Only g > 0 -> g < 0 (guards of the oracle).
    entering_only,
};

struct Root {
    std::size_t index = 0;
    double dt_left = 0.0;
    double dt_right = 0.0;
    // State at dt_right, on the far side of the surface.
    State x_right;
};

class Engine {
public:
    Engine(const Rhs& rhs, State x0, TimeSpan span,
           const IntegratorConfig& config, Trajectory& out)
        : rhs_(rhs),
          config_(config),
          span_(span),
          n_(x0.size()),
          out_(out),
          t_(span.start),
          x_(std::move(x0)),
          f_(n_),
          event_tol_(config.resolved_event_tol(span.length())) {
        for (auto& k : k_) k.resize(n_);
        tmp_.resize(n_);
        tmp2_.resize(n_);
        if (!all_finite(x_)) {
            throw IntegrationError("initial state is not finite");
        }
        eval(t_, x_, f_);
        out_.samples.push_back({t_, x_});
        h_ = config.initial_step > 0.0 ? config.initial_step : initial_step();
    }

    double t() const { return t_; }
    const State& x() const { return x_; }
    State& mutable_x() { return x_; }
    double event_tol() const { return event_tol_; }

    void refresh_derivative() { eval(t_, x_, f_); }

    // Runs until span end. `stops` are sorted forced landing times; at each
    // landing `on_stop(index)` is invoked after the step is accepted.
    template <typename OnRoot, typename OnStop>
    void run(const std::vector<Indicator>& indicators, CrossingRule rule,
             const std::vector<double>& stops, OnRoot&& on_root,
             OnStop&& on_stop) {
        const double span_len = span_.length();
        const double underflow = 1e-14 * std::abs(span_len);
        std::size_t next_stop = 0;
        while (next_stop < stops.size() && stops[next_stop] <= t_) ++next_stop;

        std::vector<double> g_start(indicators.size());
        State x1(n_), f1(n_);

        while (t_ < span_.end) {
            if (out_.stats.accepted + out_.stats.rejected >= config_.max_steps) {
                throw IntegrationError("step budget exhausted at t=" +
                                       fmt(t_));
            }
            const double stop =
                next_stop < stops.size() ? stops[next_stop] : span_.end;
            double hh = std::min({h_, config_.max_step, stop - t_});
            bool landing = false;
            if (t_ + hh >= stop - 4.0 * eps_at(stop)) {
                hh = stop - t_;
                landing = true;
            }
            const bool truncated = hh < h_;

            const double err = attempt(hh, x1, f1);

            for (std::size_t j = 0; j < indicators.size(); ++j) {
                g_start[j] = indicators[j](t_, x_);
            }
            std::optional<Root> root;
            if (all_finite(x1)) {
                root = find_root(indicators, rule, g_start, hh, x1, f1);
            }

            if (root) {
                State x_left(n_);
                double err_left = 0.0;
                if (root->dt_left > 0.0) {
                    err_left = attempt(root->dt_left, x_left, tmp2_);
                } else {
                    x_left = x_;
                }
                if (!(err_left <= 1.0)) {
                    reject(root->dt_left, err_left, underflow);
                    h_ = std::min(h_, 0.5 * root->dt_left);
                    continue;
                }
                if (root->dt_left > 0.0) {
                    t_ += root->dt_left;
                    x_ = x_left;
                    accept_current();
                }
                // Short hop across the surface from the left point. The
                // re-based hop can fall short of the surface by rounding, so
                // widen it until the indicator has changed sign.
                const Indicator& ind = indicators[root->index];
                const double g0 = g_start[root->index];
                double width = root->dt_right - root->dt_left;
                if (width > 0.0) {
                    for (int tries = 0;; ++tries) {
                        root->x_right = substep_state(width);
                        const double g = ind(t_ + width, root->x_right);
                        if (crosses(g0, g, rule) || g == 0.0 || tries == 8) break;
                        width *= 2.0;
                    }
                } else {
                    root->x_right = x_;
                }
                on_root(*root, width);
                if (landing && t_ >= stop && next_stop < stops.size()) {
                    on_stop(next_stop);
                    ++next_stop;
                }
                // Retain h_ so the next step is not enlarged past the event.
                continue;
            }

            if (!(err <= 1.0) || !all_finite(x1)) {
                reject(hh, err, underflow);
                continue;
            }

            t_ = landing ? stop : t_ + hh;
            x_ = x1;
            f_ = f1;
            accept_current(/*have_derivative=*/true);
            const double factor = grow_factor(err);
            h_ = truncated ? std::max(h_, factor * hh) : factor * hh;
            err_old_ = std::max(err, 1e-4);
            if (landing && next_stop < stops.size()) {
                on_stop(next_stop);
                ++next_stop;
            }
        }
    }

    void set_state(double t, State x) {
        t_ = t;
        x_ = std::move(x);
        accept_current();
    }

    void replace_last_sample() {
        out_.samples.back().x = x_;
        eval(t_, x_, f_);
    }

private:
    static double eps_at(double t) {
        return std::numeric_limits<double>::epsilon() *
               std::max(1.0, std::abs(t));
    }

    static std::string fmt(double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    }

    void eval(double t, std::span<const double> x, std::span<double> dxdt) {
        rhs_(t, x, dxdt);
        ++out_.stats.rhs_evaluations;
    }

    double norm_scaled(std::span<const double> v, std::span<const double> a,
                       std::span<const double> b) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sc =
                config_.abs_tol +
                config_.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
            const double r = v[i] / sc;
            sum += r * r;
        }
        return n_ == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n_));
    }

    double initial_step() {
        const double span_len = std::abs(span_.length());
        double d0 = norm_scaled(x_, x_, x_);
        double d1 = norm_scaled(f_, x_, x_);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, span_len);
        State x1(n_), f1(n_);
        for (std::size_t i = 0; i < n_; ++i) x1[i] = x_[i] + h0 * f_[i];
        eval(t_ + h0, x1, f1);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = f1[i] - f_[i];
        const double d2 = norm_scaled(tmp_, x_, x_) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                      : std::pow(0.01 / dm, 1.0 / 5.0);
        return std::min({100.0 * h0, h1, span_len});
    }

    // One Dormand-Prince step of size h from (t_, x_, f_). Writes the 5th
    // order solution and its end derivative; returns the scaled error norm.
    double attempt(double h, State& x1, State& f1) {
        auto& [k2, k3, k4, k5, k6] = k_;
        const auto& f0 = f_;
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x_[i] + h * a21 * f0[i];
        eval(t_ + c2 * h, tmp_, k2);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = x_[i] + h * (a31 * f0[i] + a32 * k2[i]);
        eval(t_ + c3 * h, tmp_, k3);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = x_[i] + h * (a41 * f0[i] + a42 * k2[i] + a43 * k3[i]);
        eval(t_ + c4 * h, tmp_, k4);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = x_[i] + h * (a51 * f0[i] + a52 * k2[i] + a53 * k3[i] +
                                   a54 * k4[i]);
        eval(t_ + c5 * h, tmp_, k5);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = x_[i] + h * (a61 * f0[i] + a62 * k2[i] + a63 * k3[i] +
                                   a64 * k4[i] + a65 * k5[i]);
        eval(t_ + h, tmp_, k6);
        for (std::size_t i = 0; i < n_; ++i)
            x1[i] = x_[i] + h * (b1 * f0[i] + b3 * k3[i] + b4 * k4[i] +
                                 b5 * k5[i] + b6 * k6[i]);
        eval(t_ + h, x1, f1);
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = h * (e1 * f0[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                           e6 * k6[i] + e7 * f1[i]);
        const double err = norm_scaled(tmp_, x_, x1);
        return std::isfinite(err) ? err
                                  : std::numeric_limits<double>::infinity();
    }

    void reject(double hh, double err, double underflow) {
        ++out_.stats.rejected;
        const double factor =
            std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h_ = std::min(h_, hh * std::min(factor, 0.9));
        if (h_ < underflow) {
            throw IntegrationError(
                std::string(all_finite(x_) ? "step size underflow"
                                           : "non-finite state") +
                " at t=" + fmt(t_));
        }
    }

    double grow_factor(double err) const {
        constexpr double alpha = 0.17, beta = 0.04, safety = 0.9;
        if (err <= 0.0) return 5.0;
        const double f =
            safety * std::pow(err, -alpha) * std::pow(err_old_, beta);
        return std::clamp(f, 0.2, 5.0);
    }

    void accept_current(bool have_derivative = false) {
        if (!all_finite(x_)) {
            throw IntegrationError("non-finite state at t=" + fmt(t_));
        }
        if (!have_derivative) eval(t_, x_, f_);
        ++out_.stats.accepted;
        out_.samples.push_back({t_, x_});
    }

    static double hermite(double x0, double f0, double x1, double f1, double h,
                          double th) {
        const double th2 = th * th, th3 = th2 * th;
        return (2 * th3 - 3 * th2 + 1) * x0 + (th3 - 2 * th2 + th) * h * f0 +
               (-2 * th3 + 3 * th2) * x1 + (th3 - th2) * h * f1;
    }

    static bool crosses(double g0, double g1, CrossingRule rule) {
        if (rule == CrossingRule::entering_only) return g0 > 0.0 && g1 < 0.0;
        return (g0 > 0.0 && g1 < 0.0) || (g0 < 0.0 && g1 > 0.0);
    }

    // Brackets sign changes of each indicator on the Hermite interpolant of the
    // candidate step, then bisects on true sub-steps to event_tol. Returns the
    // earliest root; ties go to the lowest index.
    std::optional<Root> find_root(const std::vector<Indicator>& indicators,
                                  CrossingRule rule,
                                  const std::vector<double>& g_start, double h,
                                  const State& x1, const State& f1) {
        if (indicators.empty()) return std::nullopt;
        constexpr std::array<double, 4> probes{0.25, 0.5, 0.75, 1.0};
        std::optional<Root> best;
        State xp(n_);
        for (std::size_t j = 0; j < indicators.size(); ++j) {
            const double g0 = g_start[j];
            if (g0 == 0.0) continue;
            double hi = -1.0;
            for (double th : probes) {
                if (th == 1.0) {
                    xp = x1;
                } else {
                    for (std::size_t i = 0; i < n_; ++i) {
                        xp[i] = hermite(x_[i], f_[i], x1[i], f1[i], h, th);
                    }
                }
                if (crosses(g0, indicators[j](t_ + th * h, xp), rule)) {
                    hi = th * h;
                    break;
                }
            }
            if (hi < 0.0) continue;
            // Confirm the bracket on a true sub-step.
            if (hi != h) {
                const State xs = substep_state(hi);
                if (!crosses(g0, indicators[j](t_ + hi, xs), rule)) {
                    // Fall back to the full step end.
                    if (!crosses(g0, indicators[j](t_ + h, x1), rule)) continue;
                    hi = h;
                }
            }
            double lo = 0.0;
            while (hi - lo > event_tol_) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const State xs = substep_state(mid);
                const double g = indicators[j](t_ + mid, xs);
                if (crosses(g0, g, rule) || g == 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if (!best || lo < best->dt_left) best = Root{j, lo, hi, {}};
        }
        return best;
    }

    State substep_state(double dt) {
        State x1(n_), f1(n_);
        attempt(dt, x1, f1);
        return x1;
    }

    const Rhs& rhs_;
    IntegratorConfig config_;
    TimeSpan span_;
    std::size_t n_;
    Trajectory& out_;
    double t_;
    State x_;
    State f_;
    double h_ = 0.0;
    double err_old_ = 1e-4;
    double event_tol_;
    std::array<State, 5> k_;
    State tmp_;
    State tmp2_;
};

std::vector<double> sorted_stops(std::span<const double> times,
                                 TimeSpan span) {
    std::vector<double> stops;
    for (double t : times) {
        if (t > span.start && t < span.end) stops.push_back(t);
    }
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    return stops;
}

void check_span(TimeSpan span, std::size_t dim) {
    if (!std::isfinite(span.start) || !std::isfinite(span.end) ||
        !(span.end > span.start)) {
        throw std::invalid_argument("time span must be finite with end > start");
    }
    if (dim == 0) throw std::invalid_argument("state must be non-empty");
}

}  // namespace

Trajectory integrate_smooth(const Rhs& rhs, State x0, TimeSpan span,
                            const IntegratorConfig& config,
                            std::span<const Surface> surfaces,
                            std::span<const double> output_times) {
    check_span(span, x0.size());
    config.validate(span.length());
    Trajectory out;
    std::vector<Indicator> indicators(surfaces.begin(), surfaces.end());
    Engine engine(rhs, std::move(x0), span, config, out);
    const std::vector<double> stops = sorted_stops(output_times, span);

    engine.run(
        indicators, CrossingRule::either_direction, stops,
        [&](const Root& root, double width) {
            SurfaceCrossing c;
            c.surface_index = root.index;
            c.t_before = engine.t();
            c.before = engine.x();
            if (width > 0.0) engine.set_state(engine.t() + width, root.x_right);
            c.t_after = engine.t();
            c.after = engine.x();
            out.crossings.push_back(std::move(c));
            ++out.stats.events;
        },
        [](std::size_t) {});
    return out;
}

Trajectory integrate_event_driven(const Rhs& rhs,
                                  std::span<const Guard> guards, State x0,
                                  TimeSpan span, const IntegratorConfig& config,
                                  const ImpulseTrain* impulses,
                                  std::span<const double> output_times) {
    check_span(span, x0.size());
    config.validate(span.length());
    for (const Guard& g : guards) {
        if (g.velocity_index >= x0.size()) {
            throw std::invalid_argument("guard velocity index out of range");
        }
        if (!(g.kappa >= 0.0 && g.kappa <= 1.0)) {
            throw std::invalid_argument("guard restitution must lie in [0, 1]");
        }
        if (g.g(x0) < 0.0) {
            throw std::invalid_argument("initial state violates a guard");
        }
    }
    if (impulses) impulses->validate(x0.size());

    Trajectory out;
    std::vector<Indicator> indicators;
    for (const Guard& g : guards) {
        indicators.push_back(
            [&g](double, std::span<const double> x) { return g.g(x); });
    }

    // Stops: requested outputs plus impulse instants inside the span.
    std::vector<double> all_times(output_times.begin(), output_times.end());
    std::vector<std::pair<double, std::size_t>> jump_at;
    if (impulses) {
        for (std::size_t i = 0; i < impulses->size(); ++i) {
            const double ti = impulses->times[i];
            if (ti >= span.start && ti <= span.end) {
                all_times.push_back(ti);
                jump_at.emplace_back(ti, i);
            }
        }
    }
    std::vector<double> stops = sorted_stops(all_times, span);
    bool end_is_jump = false;
    for (auto& [ti, idx] : jump_at) {
        if (ti == span.end) end_is_jump = true;
    }
    if (end_is_jump) stops.push_back(span.end);

    Engine engine(rhs, std::move(x0), span, config, out);
    const double event_tol = engine.event_tol();

    auto apply_jumps_at = [&](double t) {
        for (auto& [ti, idx] : jump_at) {
            if (ti != t) continue;
            JumpRecord rec;
            rec.t = t;
            rec.index = idx;
            rec.before = engine.x();
            State& x = engine.mutable_x();
            for (std::size_t c = 0; c < x.size(); ++c) {
                x[c] += impulses->magnitudes[idx][c];
            }
            rec.after = x;
            engine.replace_last_sample();
            out.jumps.push_back(std::move(rec));
        }
    };
    apply_jumps_at(span.start);

    engine.run(
        indicators, CrossingRule::entering_only, stops,
        [&](const Root& root, double) {
            const Guard& g = guards[root.index];
            State& x = engine.mutable_x();
            ImpactEvent ev;
            ev.t_star = engine.t();
            ev.guard_index = root.index;
            ev.v_pre = x[g.velocity_index];
            ev.v_post = -g.kappa * ev.v_pre;
            ev.kappa = g.kappa;
            ev.grazing = std::abs(ev.v_pre) < config.grazing_tol;
            x[g.velocity_index] = ev.v_post;
            engine.replace_last_sample();
            out.events.push_back(ev);
            ++out.stats.events;

            const std::size_t n = config.chatter_count;
            if (out.events.size() >= n) {
                const double first = out.events[out.events.size() - n].t_star;
                if (ev.t_star - first <= event_tol) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "chattering guard " << root.index << ": " << n
                       << " impacts within " << event_tol << " near t="
                       << ev.t_star;
                    throw IntegrationError(os.str());
                }
            }
        },
        [&](std::size_t stop_index) { apply_jumps_at(stops[stop_index]); });
    return out;
}

Trajectory integrate_fixed_rk4(const Rhs& rhs, State x0, TimeSpan span,
                               std::size_t n_steps) {
    check_span(span, x0.size());
    if (n_steps == 0) throw std::invalid_argument("rk4: n_steps must be > 0");
    const std::size_t n = x0.size();
    const double h = span.length() / static_cast<double>(n_steps);
    Trajectory out;
    out.samples.reserve(n_steps + 1);
    out.samples.push_back({span.start, x0});
    State x = std::move(x0), k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t = span.start + static_cast<double>(s) * h;
        rhs(t, x, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        rhs(t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!all_finite(x)) {
            throw IntegrationError("rk4: non-finite state");
        }
        out.stats.rhs_evaluations += 4;
        ++out.stats.accepted;
        const double t_next =
            s + 1 == n_steps ? span.end : t + h;
        out.samples.push_back({t_next, x});
    }
    return out;
}

}  // namespace nonsmooth
