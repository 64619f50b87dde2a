#include "nonsmooth/experiment.hpp"

#include "nonsmooth/algebra.hpp"
#include "nonsmooth/asymptotics.hpp"
#include "nonsmooth/models.hpp"
#include "nonsmooth/time_decomposition.hpp"
#include "nonsmooth/transforms.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace nonsmooth {

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

using Row = std::vector<double>;

// Everything a run produces before it is written out.
struct RunData {
    std::vector<std::string> columns;
    std::vector<Row> rows;
    /// Names of the physical state components, used for event columns.
    std::vector<std::string> state_names;
    std::vector<std::vector<std::string>> events;
    std::vector<std::string> strobe_columns;
    std::vector<Row> strobe;
    std::vector<std::string> accel_columns;
    std::vector<Row> accel;
    IntegratorStats stats;
    nlohmann::json metrics = nlohmann::json::object();
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

// Interior output instants start + k step, strictly inside the span.
std::vector<double> output_grid(const ExperimentConfig& c) {
    std::vector<double> g;
    for (std::size_t k = 1;; ++k) {
        const double t = c.time.start + static_cast<double>(k) * c.output_step;
        if (!(t < c.time.end)) break;
        g.push_back(t);
    }
    return g;
}

// Samples at start, every grid instant and end, mapped through `physical`.
template <typename Map>
std::vector<Row> sample_rows(const Trajectory& traj, const std::vector<double>& grid,
                             Map&& physical) {
    std::vector<Row> rows;
    rows.reserve(grid.size() + 2);
    auto push = [&](const Sample& s) {
        Row r{s.t};
        const Row extra = physical(s.t, s.x);
        r.insert(r.end(), extra.begin(), extra.end());
        rows.push_back(std::move(r));
    };
    push(traj.front());
    for (double t : grid) push(traj.at(t));
    push(traj.back());
    return rows;
}

std::vector<std::string> event_row(const std::string& kind, double t, std::size_t index,
                                   bool grazing, const State& before, const State& after) {
    std::vector<std::string> r{kind, num(t), std::to_string(index), grazing ? "1" : "0"};
    for (double v : before) r.push_back(num(v));
    for (double v : after) r.push_back(num(v));
    return r;
}

// Impact rows: the post-impact sample sits in the trajectory at t_star.
void add_impacts(RunData& d, const Trajectory& traj, const std::vector<Guard>& guards) {
    for (const auto& ev : traj.events) {
        auto it = std::find_if(traj.samples.rbegin(), traj.samples.rend(),
                               [&](const Sample& s) { return s.t == ev.t_star; });
        State after = it != traj.samples.rend() ? it->x : State(d.state_names.size(), NAN);
        State before = after;
        before[guards[ev.guard_index].velocity_index] = ev.v_pre;
        d.events.push_back(event_row("impact", ev.t_star, ev.guard_index, ev.grazing, before, after));
    }
}

template <typename Map>
void add_crossings(RunData& d, const Trajectory& traj, Map&& physical) {
    for (const auto& c : traj.crossings) {
        d.events.push_back(event_row("crossing", c.t_before, c.surface_index, false,
                                     physical(c.t_before, c.before),
                                     physical(c.t_after, c.after)));
    }
}

void add_jumps(RunData& d, const Trajectory& traj) {
    for (const auto& j : traj.jumps) {
        d.events.push_back(event_row("jump", j.t, j.index, false, j.before, j.after));
    }
}

// Energy audit over the rows whose last column is the energy.
void energy_metrics(RunData& d) {
    const double e0 = d.rows.front().back();
    double drift = 0.0;
    for (const auto& r : d.rows) drift = std::max(drift, std::abs(r.back() - e0));
    d.metrics["energy_initial"] = e0;
    d.metrics["energy_drift_abs"] = drift;
    d.metrics["energy_drift_rel"] = e0 != 0.0 ? drift / std::abs(e0) : drift;
}

std::vector<double> chain_stiffness(const ExperimentConfig& c) {
    const auto n = static_cast<std::size_t>(c.params.at("masses"));
    std::vector<double> k;
    for (std::size_t i = 0; i <= n; ++i) k.push_back(c.params.at("k" + std::to_string(i)));
    return k;
}

RunData run_chain(const ExperimentConfig& c) {
    const auto k = chain_stiffness(c);
    const std::size_t n = k.size() - 1;
    RunData d;
    d.columns.push_back("t");
    for (std::size_t i = 1; i <= n; ++i) d.state_names.push_back("q" + std::to_string(i));
    for (std::size_t i = 1; i <= n; ++i) d.state_names.push_back("v" + std::to_string(i));
    d.columns.insert(d.columns.end(), d.state_names.begin(), d.state_names.end());
    d.columns.push_back("energy");
    const auto grid = output_grid(c);
    const TimeSpan span = c.time;

    Trajectory traj;
    if (c.transform == "none") {
        const auto spec = chain_model(k);
        traj = integrate_event_driven(spec.rhs, spec.constraints, c.initial_state, span,
                                      c.integrator, nullptr, grid);
        d.rows = sample_rows(traj, grid, [&](double, const State& x) {
            Row r = x;
            r.push_back(chain_energy(x, k));
            return r;
        });
        add_impacts(d, traj, spec.constraints);
        d.metrics["impacts"] = traj.events.size();
    } else {
        // Inside the central cell the unfolded and physical states coincide.
        traj = integrate_smooth(chain_rhs(k), c.initial_state, span, c.integrator,
                                chain_corner_surfaces(n), grid);
        d.rows = sample_rows(traj, grid, [&](double, const State& x) {
            Row r = chain_to_physical(x);
            r.push_back(chain_energy(x, k));
            return r;
        });
        add_crossings(d, traj, [](double, const State& x) { return chain_to_physical(x); });
        d.metrics["corner_crossings"] = traj.crossings.size();
    }
    double qmax = 0.0;
    for (const auto& r : d.rows) {
        for (std::size_t i = 1; i <= n; ++i) qmax = std::max(qmax, std::abs(r[i]));
    }
    d.metrics["max_abs_q"] = qmax;
    energy_metrics(d);
    d.stats = traj.stats;
    return d;
}

RunData run_one_sided(const ExperimentConfig& c) {
    const double stiffness = c.params.at("stiffness");
    const PotentialSlope dp = [stiffness](double q) { return stiffness * q; };
    RunData d;
    d.state_names = {"q", "v"};
    d.columns = {"t", "q", "v", "energy"};
    const auto grid = output_grid(c);
    auto with_energy = [stiffness](double q, double v) {
        return Row{q, v, 0.5 * v * v + 0.5 * stiffness * q * q};
    };
    Trajectory traj;
    if (c.transform == "none") {
        const auto spec = one_sided_model(dp);
        traj = integrate_event_driven(spec.rhs, spec.constraints, c.initial_state, c.time,
                                      c.integrator, nullptr, grid);
        d.rows = sample_rows(traj, grid,
                             [&](double, const State& x) { return with_energy(x[0], x[1]); });
        add_impacts(d, traj, spec.constraints);
        d.metrics["impacts"] = traj.events.size();
    } else {
        auto physical = [](double, const State& x) {
            return State{unfold_one_sided(x[0]), unfold_one_sided_velocity(x[0], x[1])};
        };
        traj = integrate_smooth(one_sided_rhs(dp), c.initial_state, c.time, c.integrator,
                                one_sided_surfaces(), grid);
        d.rows = sample_rows(traj, grid, [&](double t, const State& x) {
            const State p = physical(t, x);
            return with_energy(p[0], p[1]);
        });
        add_crossings(d, traj, physical);
        d.metrics["barrier_crossings"] = traj.crossings.size();
    }
    double qmin = d.rows.front()[1];
    for (const auto& r : d.rows) qmin = std::min(qmin, r[1]);
    d.metrics["min_q"] = qmin;
    energy_metrics(d);
    d.stats = traj.stats;
    return d;
}

RunData run_inelastic(const ExperimentConfig& c) {
    const double omega = c.params.at("omega"), kappa = c.params.at("kappa");
    RunData d;
    d.state_names = {"x1", "x2"};
    d.columns = {"t", "x1", "x2"};
    const auto grid = output_grid(c);
    Trajectory traj;
    if (c.transform == "none") {
        const auto spec = inelastic_oscillator_model(omega, kappa);
        traj = integrate_event_driven(spec.rhs, spec.constraints, c.initial_state, c.time,
                                      c.integrator, nullptr, grid);
        d.rows = sample_rows(traj, grid, [](double, const State& x) { return x; });
        add_impacts(d, traj, spec.constraints);
        d.metrics["impacts"] = traj.events.size();
    } else {
        const double k = restitution_to_k(kappa);
        const IvanovState y0 =
            physical_to_ivanov({c.initial_state[0], c.initial_state[1]}, k);
        auto physical = [k](double, const State& y) {
            const PhysicalState p = ivanov_to_physical({y[0], y[1], k});
            return State{p.x1, p.x2};
        };
        traj = integrate_smooth(inelastic_oscillator_ivanov_rhs(omega, kappa), {y0.s, y0.v},
                                c.time, c.integrator, ivanov_surfaces(), grid);
        d.rows = sample_rows(traj, grid, physical);
        add_crossings(d, traj, physical);
        std::size_t impacts = 0;
        for (const auto& cr : traj.crossings) impacts += cr.surface_index == 0;
        d.metrics["impacts"] = impacts;
    }
    d.stats = traj.stats;
    return d;
}

RunData run_pwl(const ExperimentConfig& c) {
    const double omega = c.params.at("omega"), eps = c.params.at("eps");
    const double amp = c.params.at("amplitude");
    const State x0 = c.initial_state.empty()
                         ? State{nstt_first_order(amp, eps, omega, 0.0), 0.0}
                         : c.initial_state;
    const auto grid = output_grid(c);
    RunData d;
    const auto traj = integrate_smooth(pwl_rhs(omega, eps), x0, c.time, c.integrator,
                                       pwl_surfaces(), grid);
    d.stats = traj.stats;
    add_crossings(d, traj, [](double, const State& x) { return x; });
    d.state_names = {"q", "v"};
    if (c.transform == "none") {
        d.columns = {"t", "q", "v"};
        d.rows = sample_rows(traj, grid, [](double, const State& x) { return x; });
        return d;
    }

    const PoincareLindstedt pl(static_cast<std::size_t>(c.params.at("pl_terms")));
    const double amp_pl = amp * pl.matched_amplitude(eps);
    d.columns = {"t", "q_nstt", "q_pl", "q_num"};
    d.accel_columns = {"t", "qdd_nstt", "qdd_pl", "qdd_num"};
    double dq_nstt = 0.0, dq_pl = 0.0, dqq_nstt = 0.0, dqq_pl = 0.0;
    d.rows = sample_rows(traj, grid, [&](double t, const State& x) {
        const double qn = nstt_first_order(amp, eps, omega, t);
        const double qp = pl.q(amp_pl, eps, omega, t);
        const double an = nstt_first_order_acceleration(amp, eps, omega, t);
        const double ap = pl.acceleration(amp_pl, eps, omega, t);
        const double anum = pwl_oscillator_rhs(x[0], t, omega, eps);
        d.accel.push_back({t, an, ap, anum});
        dq_nstt = std::max(dq_nstt, std::abs(qn - x[0]));
        dq_pl = std::max(dq_pl, std::abs(qp - x[0]));
        dqq_nstt = std::max(dqq_nstt, std::abs(an - anum));
        dqq_pl = std::max(dqq_pl, std::abs(ap - anum));
        return Row{qn, qp, x[0]};
    });
    d.metrics["pl_amplitude"] = amp_pl;
    d.metrics["max_abs_q_nstt_minus_num"] = dq_nstt;
    d.metrics["max_abs_q_pl_minus_num"] = dq_pl;
    d.metrics["max_abs_qdd_nstt_minus_num"] = dqq_nstt;
    d.metrics["max_abs_qdd_pl_minus_num"] = dqq_pl;
    return d;
}

RunData run_cubic(const ExperimentConfig& c) {
    const double k = c.params.at("k"), q = c.params.at("q"), t1 = c.params.at("t1");
    const State x0 = c.initial_state.empty() ? State{0.0} : c.initial_state;
    const auto spec = cubic_damping_pulse_model(k, q, t1);
    const ImpulseTrain& train = *spec.impulse_train;
    const auto grid = output_grid(c);
    // The closed form describes the response from rest at t = 0.
    const bool closed = x0[0] == 0.0 && c.time.start <= t1;
    RunData d;
    d.state_names = {"v"};
    d.columns = {"t", "v"};
    if (closed) d.columns.push_back("v_closed_form");
    auto row = [&](double t, double v) {
        return closed ? Row{v, cubic_damping_closed_form(k, q, t1, t)} : Row{v};
    };
    Trajectory traj;
    if (c.transform == "none") {
        traj = integrate_event_driven(spec.rhs, {}, x0, c.time, c.integrator, &train, grid);
        d.rows = sample_rows(traj, grid, [&](double t, const State& x) { return row(t, x[0]); });
        add_jumps(d, traj);
    } else {
        auto physical = [&](double t, const State& u) { return theta_reconstruct(train, t, u); };
        traj = integrate_smooth(cubic_damping_theta_rhs(k, q, t1), x0, c.time, c.integrator,
                                impulse_time_surfaces(train), grid);
        d.rows = sample_rows(traj, grid,
                             [&](double t, const State& u) { return row(t, physical(t, u)[0]); });
        add_crossings(d, traj, physical);
    }
    if (closed) {
        double err = 0.0;
        for (const auto& r : d.rows) err = std::max(err, std::abs(r[1] - r[2]));
        d.metrics["max_abs_v_minus_closed_form"] = err;
    }
    d.stats = traj.stats;
    return d;
}

RunData run_duffing(const ExperimentConfig& c) {
    const double zeta = c.params.at("zeta"), b = c.params.at("B"), beta = c.params.at("beta");
    const std::uint64_t seed = *c.seed;
    // Materialize enough impulses to pass the horizon, then keep those inside.
    const double shortest = pi / 12.0 * (1.0 - beta);
    const auto count = static_cast<std::size_t>((c.time.end - c.time.start) / shortest) + 2;
    auto spec = duffing_impulse_model(zeta, b, beta, seed, count, c.time.start);
    ImpulseTrain& train = *spec.impulse_train;
    std::size_t keep = 0;
    while (keep < train.size() && train.times[keep] < c.time.end) ++keep;
    train.times.resize(keep);
    train.magnitudes.resize(keep);

    const State x0 = c.initial_state.empty() ? State{0.0, 0.0} : c.initial_state;
    const auto grid = output_grid(c);
    RunData d;
    d.state_names = {"x", "xdot"};
    d.columns = {"t", "x", "xdot"};
    const LocalTimeGrid local(train.times, c.time.end);
    Trajectory traj;
    if (c.transform == "none") {
        traj = integrate_event_driven(spec.rhs, {}, x0, c.time, c.integrator, &train, grid);
    } else {
        traj = eliminate_impulses(spec.rhs, train, c.time.end, c.integrator, x0, grid).global;
    }
    d.rows = sample_rows(traj, grid, [](double, const State& x) { return x; });
    add_jumps(d, traj);
    d.strobe_columns = {"t", "x", "xdot", "seed", "zeta", "B", "beta"};
    for (const auto& s : stroboscopic_samples(traj, local)) {
        d.strobe.push_back({s.t, s.x[0], s.x[1], static_cast<double>(seed), zeta, b, beta});
    }
    d.metrics["impulses"] = train.size();
    d.stats = traj.stats;
    return d;
}

RunData dispatch(const ExperimentConfig& c) {
    if (c.model == "chain") return run_chain(c);
    if (c.model == "one-sided") return run_one_sided(c);
    if (c.model == "inelastic") return run_inelastic(c);
    if (c.model == "pwl") return run_pwl(c);
    if (c.model == "cubic-damping") return run_cubic(c);
    if (c.model == "duffing") return run_duffing(c);
    throw ConfigError("model.id", 0, "unknown model '" + c.model + "'");
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ',';
        s += parts[i];
    }
    return s;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string csv(const std::string& hash, const std::vector<std::string>& columns,
                const std::vector<Row>& rows) {
    std::string s = "# config_hash=" + hash + "\n" + join(columns) + "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) s += ',';
            s += num(r[i]);
        }
        s += '\n';
    }
    return s;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const fs::path& dir) {
    validate_config(config);
    const RunData d = dispatch(config);
    const std::string hash = config_hash(config);
    fs::create_directories(dir);

    RunSummary summary;
    summary.dir = dir;
    summary.config_hash = hash;
    summary.metrics = d.metrics;

    write_file(dir / "trajectory.csv", csv(hash, d.columns, d.rows));
    summary.files.push_back("trajectory.csv");

    std::string ev = "# config_hash=" + hash + "\nkind,t,index,grazing";
    for (const auto& n : d.state_names) ev += ",before_" + n;
    for (const auto& n : d.state_names) ev += ",after_" + n;
    ev += '\n';
    for (const auto& e : d.events) ev += join(e) + '\n';
    write_file(dir / "events.csv", ev);
    summary.files.push_back("events.csv");

    if (!d.strobe_columns.empty()) {
        write_file(dir / "strobe.csv", csv(hash, d.strobe_columns, d.strobe));
        summary.files.push_back("strobe.csv");
    }
    if (!d.accel_columns.empty()) {
        write_file(dir / "acceleration.csv", csv(hash, d.accel_columns, d.accel));
        summary.files.push_back("acceleration.csv");
    }

    nlohmann::json meta;
    meta["config_hash"] = hash;
    meta["config"] = config_to_json(config);
    meta["version"] = library_version();
    meta["columns"] = d.columns;
    meta["rows"] = d.rows.size();
    meta["events"] = d.events.size();
    meta["integrator_stats"] = {{"accepted", d.stats.accepted},
                                {"rejected", d.stats.rejected},
                                {"rhs_evaluations", d.stats.rhs_evaluations},
                                {"events", d.stats.events}};
    meta["metrics"] = d.metrics;
    meta["files"] = summary.files;
    write_file(dir / "metadata.json", meta.dump(2) + "\n");
    summary.files.push_back("metadata.json");
    return summary;
}

SweepResult run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values, const fs::path& root, unsigned jobs) {
    if (values.empty()) throw ConfigError(param, 0, "sweep needs at least one value");
    // Reject a bad parameter name before any thread starts.
    {
        ExperimentConfig probe = base;
        set_config_value(probe, param, values.front());
    }
    fs::create_directories(root);
    const std::size_t n = values.size();
    std::vector<std::optional<RunSummary>> done(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const fs::path dir = root / fmt::format("{:03d}_{}={:g}", i, param, values[i]);
            try {
                ExperimentConfig c = base;
                set_config_value(c, param, values[i]);
                done[i] = run_experiment(c, dir);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    std::vector<std::future<void>> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();

    SweepResult result;
    std::string index = "index,param,value,dir,config_hash,status\n";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string dir = fmt::format("{:03d}_{}={:g}", i, param, values[i]);
        if (done[i]) {
            index += fmt::format("{},{},{},{},{},ok\n", i, param, num(values[i]), dir,
                                 done[i]->config_hash);
            result.runs.push_back(std::move(*done[i]));
        } else {
            index += fmt::format("{},{},{},{},,failed\n", i, param, num(values[i]), dir);
            result.failures.push_back(num(values[i]) + ": " + errors[i]);
        }
    }
    write_file(root / "sweep.csv", index);
    return result;
}

std::vector<Check> verify_run_directory(const fs::path& dir) {
    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool ok, const std::string& note = {}) {
        Check c;
        c.criterion = 0;
        c.name = name;
        c.measured = ok ? 1.0 : 0.0;
        c.relation = "==";
        c.threshold = 1.0;
        c.pass = ok;
        c.note = note;
        checks.push_back(std::move(c));
    };
    const std::string tag = dir.filename().string();
    std::ifstream in(dir / "metadata.json");
    if (!in) {
        add(tag + ": metadata.json readable", false, (dir / "metadata.json").string());
        return checks;
    }
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const std::exception& e) {
        add(tag + ": metadata.json parses", false, e.what());
        return checks;
    }
    const std::string hash = meta.value("config_hash", "");
    const std::string recomputed = fnv1a_hex(meta["config"].dump());
    add(tag + ": metadata hash matches config echo", hash == recomputed,
        "stored " + hash + ", recomputed " + recomputed);
    for (const auto& f : meta.value("files", std::vector<std::string>{})) {
        if (f == "metadata.json") continue;
        std::ifstream csv_in(dir / f);
        std::string first;
        std::getline(csv_in, first);
        add(tag + ": " + f + " carries the config hash", first == "# config_hash=" + hash,
            first);
    }
    return checks;
}

}  // namespace nonsmooth
