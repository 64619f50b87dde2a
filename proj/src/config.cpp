#include "nonsmooth/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace nonsmooth {

namespace {

std::string describe(const std::string& field, std::size_t line, const std::string& message) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    if (!field.empty()) os << field << ": ";
    os << message;
    return os.str();
}

std::size_t line_of(const YAML::Node& node) {
    const YAML::Mark m = node.Mark();
    return m.is_null() ? 0 : static_cast<std::size_t>(m.line) + 1;
}

[[noreturn]] void fail(const std::string& field, const YAML::Node& node,
                       const std::string& message) {
    throw ConfigError(field, line_of(node), message);
}

void require_map(const YAML::Node& node, const std::string& field) {
    if (!node.IsMap()) fail(field, node, "expected a mapping");
}

// Rejects keys outside `allowed`.
void check_keys(const YAML::Node& node, const std::string& field,
                const std::set<std::string>& allowed) {
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) {
            fail(field.empty() ? key : field + "." + key, kv.first, "unknown key");
        }
    }
}

double number(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) fail(field, node, "expected a number");
    const std::string text = node.Scalar();
    // yaml-cpp accepts .inf/.nan; anything else goes through strtod so that
    // trailing garbage is caught.
    if (text == ".inf" || text == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || std::isnan(v)) {
        fail(field, node, "expected a number, got '" + text + "'");
    }
    return v;
}

std::size_t count(const YAML::Node& node, const std::string& field) {
    const double v = number(node, field);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) {
        fail(field, node, "expected a positive integer");
    }
    return static_cast<std::size_t>(v);
}

std::string text(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) fail(field, node, "expected a string");
    return node.Scalar();
}

std::map<std::string, double> chain_defaults(std::size_t masses) {
    std::map<std::string, double> d{{"masses", static_cast<double>(masses)}};
    for (std::size_t i = 0; i <= masses; ++i) d["k" + std::to_string(i)] = 1.0;
    return d;
}

}  // namespace

ConfigError::ConfigError(const std::string& field, std::size_t line,
                         const std::string& message)
    : Error(describe(field, line, message)), field_(field), line_(line), message_(message) {}

const std::vector<ModelInfo>& model_catalog() {
    static const std::vector<ModelInfo> catalog{
        {"chain", {"none", "unfold-two-sided"}, chain_defaults(2), false,
         "masses between rigid barriers |q_i| <= 1, springs k0..kN"},
        {"one-sided", {"none", "unfold-one-sided"}, {{"stiffness", 1.0}}, false,
         "P(q) = stiffness q^2/2 with an elastic barrier at q = -1"},
        {"inelastic", {"none", "ivanov"}, {{"omega", 1.0}, {"kappa", 0.5}}, false,
         "harmonic oscillator above a barrier at x = 0, restitution kappa"},
        {"pwl", {"none", "nstt-asymptotic"},
         {{"omega", 1.0}, {"eps", 0.25}, {"amplitude", 1.0}, {"pl_terms", 60.0}}, false,
         "q'' + omega^2 q = eps omega^2 theta(q) q"},
        {"cubic-damping", {"none", "theta-substitution"},
         {{"k", 1.0}, {"q", 1.0}, {"t1", 1.0}}, false,
         "v' + k v^3 = q delta(t - t1) from rest"},
        {"duffing", {"none", "time-decomposition"},
         {{"zeta", 0.05}, {"B", 1.0}, {"beta", 0.1}}, true,
         "x'' + zeta x' + x^3 = B sin t sum delta(t - t_i), random gaps"},
    };
    return catalog;
}

const ModelInfo& model_info(const std::string& id) {
    for (const auto& m : model_catalog()) {
        if (m.id == id) return m;
    }
    throw ConfigError("model.id", 0, "unknown model '" + id + "'");
}

bool transform_compatible(const std::string& model, const std::string& transform) {
    const auto& t = model_info(model).transforms;
    return std::find(t.begin(), t.end(), transform) != t.end();
}

ExperimentConfig parse_config(const std::string& source_text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(source_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("", e.mark.is_null() ? 0 : static_cast<std::size_t>(e.mark.line) + 1,
                          source + ": " + e.msg);
    }
    if (!root.IsMap()) throw ConfigError("", 0, source + ": top level must be a mapping");
    check_keys(root, "",
               {"model", "transform", "initial_state", "time", "integrator", "seed", "output"});

    ExperimentConfig cfg;

    const YAML::Node model = root["model"];
    if (!model) throw ConfigError("model", 0, "missing section");
    require_map(model, "model");
    check_keys(model, "model", {"id", "params"});
    if (!model["id"]) fail("model.id", model, "missing");
    cfg.model = text(model["id"], "model.id");
    const ModelInfo* info = nullptr;
    try {
        info = &model_info(cfg.model);
    } catch (const ConfigError&) {
        fail("model.id", model["id"], "unknown model '" + cfg.model + "'");
    }
    cfg.params = info->defaults;
    if (const YAML::Node p = model["params"]) {
        require_map(p, "model.params");
        if (cfg.model == "chain" && p["masses"]) {
            cfg.params = chain_defaults(count(p["masses"], "model.params.masses"));
        }
        for (const auto& kv : p) {
            const std::string key = kv.first.as<std::string>();
            const std::string field = "model.params." + key;
            if (!cfg.params.count(key)) fail(field, kv.first, "unknown parameter for " + cfg.model);
            cfg.params[key] = number(kv.second, field);
        }
    }

    if (const YAML::Node t = root["transform"]) cfg.transform = text(t, "transform");
    if (!transform_compatible(cfg.model, cfg.transform)) {
        std::string options;
        for (const auto& t : info->transforms) options += (options.empty() ? "" : ", ") + t;
        fail("transform", root["transform"] ? root["transform"] : root,
             "'" + cfg.transform + "' does not apply to " + cfg.model + " (use " + options + ")");
    }

    if (const YAML::Node s = root["initial_state"]) {
        if (!s.IsSequence()) fail("initial_state", s, "expected a list of numbers");
        for (std::size_t i = 0; i < s.size(); ++i) {
            cfg.initial_state.push_back(number(s[i], "initial_state[" + std::to_string(i) + "]"));
        }
    }

    const YAML::Node time = root["time"];
    if (!time) throw ConfigError("time", 0, "missing section");
    require_map(time, "time");
    check_keys(time, "time", {"start", "end", "output_step"});
    if (time["start"]) cfg.time.start = number(time["start"], "time.start");
    if (!time["end"]) fail("time.end", time, "missing");
    cfg.time.end = number(time["end"], "time.end");
    if (time["output_step"]) cfg.output_step = number(time["output_step"], "time.output_step");

    if (const YAML::Node in = root["integrator"]) {
        require_map(in, "integrator");
        check_keys(in, "integrator",
                   {"rel_tol", "abs_tol", "max_step", "event_tol", "initial_step", "max_steps",
                    "chatter_count", "grazing_tol"});
        auto& ic = cfg.integrator;
        if (in["rel_tol"]) ic.rel_tol = number(in["rel_tol"], "integrator.rel_tol");
        if (in["abs_tol"]) ic.abs_tol = number(in["abs_tol"], "integrator.abs_tol");
        if (in["max_step"]) ic.max_step = number(in["max_step"], "integrator.max_step");
        if (in["event_tol"]) ic.event_tol = number(in["event_tol"], "integrator.event_tol");
        if (in["initial_step"]) ic.initial_step = number(in["initial_step"], "integrator.initial_step");
        if (in["max_steps"]) ic.max_steps = count(in["max_steps"], "integrator.max_steps");
        if (in["chatter_count"]) ic.chatter_count = count(in["chatter_count"], "integrator.chatter_count");
        if (in["grazing_tol"]) ic.grazing_tol = number(in["grazing_tol"], "integrator.grazing_tol");
    }

    if (const YAML::Node s = root["seed"]) {
        const double v = number(s, "seed");
        if (!(v >= 0.0) || v != std::floor(v) || v >= 9007199254740992.0) {
            fail("seed", s, "expected an integer in [0, 2^53)");
        }
        cfg.seed = static_cast<std::uint64_t>(v);
    }

    if (const YAML::Node o = root["output"]) {
        require_map(o, "output");
        check_keys(o, "output", {"dir"});
        if (o["dir"]) cfg.output_dir = text(o["dir"], "output.dir");
    }

    try {
        validate_config(cfg);
    } catch (const ConfigError& e) {
        // Attach the line of the offending field when it can be found.
        if (e.line() != 0) throw;
        YAML::Node where = root;
        std::istringstream parts(e.field());
        std::string part;
        bool found = true;
        while (found && std::getline(parts, part, '.')) {
            const std::string key = part.substr(0, part.find('['));
            found = where.IsMap() && where[key];
            if (found) where = where[key];
        }
        throw ConfigError(e.field(), found ? line_of(where) : 0, e.message());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", 0, "cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

void validate_config(const ExperimentConfig& c) {
    const ModelInfo& info = model_info(c.model);
    if (!transform_compatible(c.model, c.transform)) {
        throw ConfigError("transform", 0, "'" + c.transform + "' does not apply to " + c.model);
    }
    for (const auto& [k, v] : c.params) {
        if (!std::isfinite(v)) throw ConfigError("model.params." + k, 0, "must be finite");
    }
    if (info.stochastic && !c.seed) {
        throw ConfigError("seed", 0, c.model + " is stochastic and needs a seed");
    }
    if (!std::isfinite(c.time.start) || !std::isfinite(c.time.end) || !(c.time.end > c.time.start)) {
        throw ConfigError("time.end", 0, "need finite start < end");
    }
    if (!(c.output_step > 0.0)) throw ConfigError("time.output_step", 0, "must be > 0");
    if ((c.time.end - c.time.start) / c.output_step > 1e7) {
        throw ConfigError("time.output_step", 0, "more than 1e7 output samples");
    }
    try {
        c.integrator.validate(c.time.length());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("integrator", 0, e.what());
    }

    auto p = [&](const std::string& name) { return c.params.at(name); };
    std::size_t dim = 2;
    if (c.model == "chain") {
        const double m = p("masses");
        if (!(m >= 1.0) || m != std::floor(m)) {
            throw ConfigError("model.params.masses", 0, "expected a positive integer");
        }
        dim = 2 * static_cast<std::size_t>(m);
        for (const auto& [k, v] : c.params) {
            if (k != "masses" && !(v > 0.0)) throw ConfigError("model.params." + k, 0, "must be > 0");
        }
    } else if (c.model == "one-sided") {
        if (!(p("stiffness") > 0.0)) throw ConfigError("model.params.stiffness", 0, "must be > 0");
    } else if (c.model == "inelastic") {
        if (!(p("kappa") > 0.0 && p("kappa") <= 1.0)) {
            throw ConfigError("model.params.kappa", 0, "must lie in (0, 1]");
        }
        if (!(p("omega") > 0.0)) throw ConfigError("model.params.omega", 0, "must be > 0");
    } else if (c.model == "pwl") {
        if (!(p("eps") >= 0.0 && p("eps") < 1.0)) {
            throw ConfigError("model.params.eps", 0, "must lie in [0, 1)");
        }
        if (!(p("omega") > 0.0)) throw ConfigError("model.params.omega", 0, "must be > 0");
        if (!(p("amplitude") > 0.0)) throw ConfigError("model.params.amplitude", 0, "must be > 0");
        if (!(p("pl_terms") >= 1.0) || p("pl_terms") != std::floor(p("pl_terms"))) {
            throw ConfigError("model.params.pl_terms", 0, "expected a positive integer");
        }
    } else if (c.model == "cubic-damping") {
        dim = 1;
        if (!(p("k") > 0.0)) throw ConfigError("model.params.k", 0, "must be > 0");
    } else if (c.model == "duffing") {
        if (!(p("beta") >= 0.0 && p("beta") < 1.0)) {
            throw ConfigError("model.params.beta", 0, "must lie in [0, 1)");
        }
        if (!(p("zeta") >= 0.0)) throw ConfigError("model.params.zeta", 0, "must be >= 0");
    }

    if (c.model == "pwl" && c.transform == "nstt-asymptotic" && c.time.start != 0.0) {
        throw ConfigError("time.start", 0, "nstt-asymptotic closed forms are phased from t = 0");
    }
    if (c.model == "cubic-damping" && c.transform == "theta-substitution" &&
        !(p("t1") > c.time.start)) {
        throw ConfigError("model.params.t1", 0, "theta-substitution needs t1 after time.start");
    }

    const bool default_state = c.model == "pwl" || c.model == "cubic-damping" || c.model == "duffing";
    if (c.initial_state.empty()) {
        if (!default_state) throw ConfigError("initial_state", 0, "required for " + c.model);
    } else if (c.initial_state.size() != dim) {
        throw ConfigError("initial_state", 0,
                          "expected " + std::to_string(dim) + " components, got " +
                              std::to_string(c.initial_state.size()));
    }
    if (c.model == "chain") {
        for (std::size_t i = 0; i < dim / 2; ++i) {
            if (std::abs(c.initial_state[i]) > 1.0) {
                throw ConfigError("initial_state", 0, "positions must satisfy |q_i| <= 1");
            }
        }
    } else if (c.model == "one-sided" && c.initial_state[0] < -1.0) {
        throw ConfigError("initial_state", 0, "position must satisfy q >= -1");
    } else if (c.model == "inelastic" && c.initial_state[0] < 0.0) {
        throw ConfigError("initial_state", 0, "position must satisfy x >= 0");
    }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    const auto& ic = c.integrator;
    auto finite_or_text = [](double v) {
        return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf");
    };
    nlohmann::json j;
    j["model"] = {{"id", c.model}, {"params", c.params}};
    j["transform"] = c.transform;
    j["initial_state"] = c.initial_state;
    j["time"] = {{"start", c.time.start}, {"end", c.time.end}, {"output_step", c.output_step}};
    j["integrator"] = {{"rel_tol", ic.rel_tol},
                       {"abs_tol", ic.abs_tol},
                       {"max_step", finite_or_text(ic.max_step)},
                       {"event_tol", ic.event_tol},
                       {"initial_step", ic.initial_step},
                       {"max_steps", ic.max_steps},
                       {"chatter_count", ic.chatter_count},
                       {"grazing_tol", ic.grazing_tol}};
    j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
    return j;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const ExperimentConfig& config) {
    return fnv1a_hex(config_to_json(config).dump());
}

void set_config_value(ExperimentConfig& c, const std::string& name, double value) {
    if (name == "seed") {
        if (!(value >= 0.0) || value != std::floor(value)) {
            throw ConfigError("seed", 0, "expected a non-negative integer");
        }
        c.seed = static_cast<std::uint64_t>(value);
    } else if (name == "time.start") {
        c.time.start = value;
    } else if (name == "time.end") {
        c.time.end = value;
    } else if (name == "time.output_step") {
        c.output_step = value;
    } else if (name == "integrator.rel_tol") {
        c.integrator.rel_tol = value;
    } else if (name == "integrator.abs_tol") {
        c.integrator.abs_tol = value;
    } else if (name == "integrator.max_step") {
        c.integrator.max_step = value;
    } else if (name == "integrator.event_tol") {
        c.integrator.event_tol = value;
    } else if (name.rfind("initial_state.", 0) == 0) {
        const std::string idx = name.substr(14);
        char* end = nullptr;
        const unsigned long i = std::strtoul(idx.c_str(), &end, 10);
        if (idx.empty() || *end != '\0' || i >= c.initial_state.size()) {
            throw ConfigError(name, 0, "no such initial_state component");
        }
        c.initial_state[i] = value;
    } else if (c.params.count(name) && !(c.model == "chain" && name == "masses")) {
        c.params[name] = value;
    } else {
        throw ConfigError(name, 0, "not a settable parameter of " + c.model);
    }
    validate_config(c);
}

}  // namespace nonsmooth
