#include "qhlab/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "qhlab/errors.hpp"

namespace qhlab {

namespace {

using Setter = std::function<std::string(ExperimentConfig&, const std::string&)>;

struct KeySpec {
    const char* key;
    const char* def;
    const char* help;
    Setter set;  // returns an error message, empty on success
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool to_real(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

template <class I>
bool to_int(const std::string& s, I& out) {
    auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

Setter real(std::function<void(ExperimentConfig&, double)> put, double lo, double hi, bool lo_open, bool hi_open) {
    return [=](ExperimentConfig& c, const std::string& v) -> std::string {
        double x;
        if (!to_real(v, x)) return "expected a real number, got '" + v + "'";
        bool ok_lo = lo_open ? x > lo : x >= lo;
        bool ok_hi = hi_open ? x < hi : x <= hi;
        if (!ok_lo || !ok_hi) {
            std::ostringstream os;
            os << "value " << v << " out of range " << (lo_open ? "(" : "[") << lo << ", " << hi
               << (hi_open ? ")" : "]");
            return os.str();
        }
        put(c, x);
        return "";
    };
}

template <class I>
Setter integer(std::function<void(ExperimentConfig&, I)> put, I lo, I hi) {
    return [=](ExperimentConfig& c, const std::string& v) -> std::string {
        I x;
        if (!to_int(v, x)) return "expected an integer, got '" + v + "'";
        if (x < lo || x > hi) return "value " + v + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
        put(c, x);
        return "";
    };
}

Setter real_list(std::function<void(ExperimentConfig&, std::vector<double>)> put, double lo, double hi) {
    return [=](ExperimentConfig& c, const std::string& v) -> std::string {
        std::vector<double> xs;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            double x;
            if (!to_real(item, x)) return "expected a comma-separated list of reals, bad item '" + item + "'";
            if (!(x > lo && x <= hi)) {
                std::ostringstream os;
                os << "list item " << item << " out of range (" << lo << ", " << hi << "]";
                return os.str();
            }
            xs.push_back(x);
        }
        if (xs.empty()) return "empty list";
        put(c, std::move(xs));
        return "";
    };
}

Setter choice(std::vector<std::string> options, std::function<void(ExperimentConfig&, const std::string&)> put) {
    return [=](ExperimentConfig& c, const std::string& v) -> std::string {
        for (const auto& o : options)
            if (o == v) {
                put(c, v);
                return "";
            }
        std::string msg = "expected one of {";
        for (std::size_t i = 0; i < options.size(); ++i) msg += (i ? ", " : "") + options[i];
        return msg + "}, got '" + v + "'";
    };
}

constexpr double kBig = 1e300;

const std::vector<KeySpec>& keys() {
    static const std::vector<KeySpec> k = {
        {"model.variant", "fbm", "wiener | fbm | subfbm | bifbm | volterra-wiener | volterra-fbm | fracou",
         choice({"wiener", "fbm", "subfbm", "bifbm", "volterra-wiener", "volterra-fbm", "fracou"},
                [](ExperimentConfig& c, const std::string& v) { c.model.variant = v; })},
        {"model.H", "0.75", "Hurst index in (0, 1)",
         real([](ExperimentConfig& c, double x) { c.model.H = x; }, 0.0, 1.0, true, true)},
        {"model.K", "1", "bifractional K in (0, 1]",
         real([](ExperimentConfig& c, double x) { c.model.K = x; }, 0.0, 1.0, true, false)},
        {"model.a", "1", "fractional OU rate",
         real([](ExperimentConfig& c, double x) { c.model.a = x; }, -kBig, kBig, false, false)},
        {"model.kernel", "fbm-type", "Volterra kernel: fbm-type | exp",
         choice({"fbm-type", "exp"}, [](ExperimentConfig& c, const std::string& v) { c.model.kernel = v; })},
        {"model.kernel_H", "0.7", "H of the fbm-type kernel, in (1/2, 1)",
         real([](ExperimentConfig& c, double x) { c.model.kernel_H = x; }, 0.5, 1.0, true, true)},
        {"model.kernel_a", "1", "rate of the exponential kernel",
         real([](ExperimentConfig& c, double x) { c.model.kernel_a = x; }, -kBig, kBig, false, false)},
        {"grid.n", "1024", "grid intervals",
         integer<int>([](ExperimentConfig& c, int x) { c.grid.n = x; }, 2, 1 << 24)},
        {"grid.t0", "0", "window start",
         real([](ExperimentConfig& c, double x) { c.grid.t0 = x; }, 0.0, 1.0, false, true)},
        {"grid.delta", "1", "window length",
         real([](ExperimentConfig& c, double x) { c.grid.delta = x; }, 0.0, 1.0, true, false)},
        {"mc.m_paths", "1000", "number of sampled paths",
         integer<std::size_t>([](ExperimentConfig& c, std::size_t x) { c.m_paths = x; }, 1, std::size_t(1) << 32)},
        {"mc.seed", "1", "master seed (overridden by --seed)",
         integer<std::uint64_t>([](ExperimentConfig& c, std::uint64_t x) { c.seed = x; }, 0, ~std::uint64_t(0))},
        {"simulate.dump", "false", "also write the binary path batch",
         choice({"true", "false"}, [](ExperimentConfig& c, const std::string& v) { c.dump = v == "true"; })},
        {"simulate.route", "automatic", "automatic | dense | toeplitz | independent",
         choice({"automatic", "dense", "toeplitz", "independent"},
                [](ExperimentConfig& c, const std::string& v) {
                    c.route = v == "dense" ? Route::dense : v == "toeplitz" ? Route::toeplitz
                              : v == "independent" ? Route::independent : Route::automatic;
                })},
        {"conditions.grid_size", "32", "verification grid size",
         integer<int>([](ExperimentConfig& c, int x) { c.cond_grid = x; }, 8, 4096)},
        {"conditions.H1", "model H", "lower envelope exponent",
         real([](ExperimentConfig& c, double x) { c.cond_H1 = x; }, 0.0, 1.0, true, false)},
        {"conditions.H2", "model H", "upper envelope exponent",
         real([](ExperimentConfig& c, double x) { c.cond_H2 = x; }, 0.0, 1.0, true, false)},
        {"conditions.sign", "positive", "increment sign: positive | negative",
         choice({"positive", "negative"},
                [](ExperimentConfig& c, const std::string& v) { c.cond_sign = v == "positive" ? Sign::positive : Sign::negative; })},
        {"conditions.t0", "0", "left end of the sign-check grid",
         real([](ExperimentConfig& c, double x) { c.cond_t0 = x; }, 0.0, 1.0, false, true)},
        {"smallball.eps_list", "0.3,0.4,0.5,0.6,0.7,0.8", "radii",
         real_list([](ExperimentConfig& c, std::vector<double> v) { c.eps_list = std::move(v); }, 0.0, kBig)},
        {"smallball.delta_list", "1", "window lengths in (0, 1]",
         real_list([](ExperimentConfig& c, std::vector<double> v) { c.delta_list = std::move(v); }, 0.0, 1.0)},
        {"smallball.C1", "1", "lower envelope constant",
         real([](ExperimentConfig& c, double x) { c.helix.C1 = x; c.helix_given = true; }, 0.0, kBig, true, false)},
        {"smallball.C2", "1", "upper envelope constant",
         real([](ExperimentConfig& c, double x) { c.helix.C2 = x; c.helix_given = true; }, 0.0, kBig, true, false)},
        {"smallball.H1", "model H", "lower envelope exponent",
         real([](ExperimentConfig& c, double x) { c.helix.H1 = x; c.helix_given = true; }, 0.0, 1.0, true, false)},
        {"smallball.H2", "model H", "upper envelope exponent",
         real([](ExperimentConfig& c, double x) { c.helix.H2 = x; c.helix_given = true; }, 0.0, 1.0, true, false)},
        {"smallball.sign", "positive", "positive | negative",
         choice({"positive", "negative"},
                [](ExperimentConfig& c, const std::string& v) {
                    c.helix.sign = v == "positive" ? Sign::positive : Sign::negative;
                    c.helix_given = true;
                })},
        {"smallball.estimator", "grid", "grid | bridge (bridge: Wiener, anchored rows)",
         choice({"grid", "bridge"},
                [](ExperimentConfig& c, const std::string& v) { c.estimator = v == "grid" ? Estimator::grid : Estimator::bridge; })},
        {"smallball.certify_grid", "24", "grid for the envelope/sign certificate, 0 disables",
         integer<int>([](ExperimentConfig& c, int x) { c.certify_grid = x; }, 0, 256)},
        {"frac.alpha", "0.3", "fractional order in (0, 1/2)",
         real([](ExperimentConfig& c, double x) { c.alpha = x; }, 0.0, 0.5, true, true)},
        {"frac.holder_hint", "0.7", "Hoelder hint of sampled paths",
         real([](ExperimentConfig& c, double x) { c.frac_hint = x; }, 0.0, 1.0, true, false)},
        {"replicate.rho", "0.1", "Hoelder exponent of the target",
         real([](ExperimentConfig& c, double x) { c.rho = x; }, 0.0, 1.0, true, false)},
        {"replicate.N_blocks", "10", "number of schedule points N",
         integer<int>([](ExperimentConfig& c, int x) { c.N_blocks = x; }, 2, 60)},
        {"replicate.schedule", "dyadic", "dyadic | power",
         choice({"dyadic", "power"},
                [](ExperimentConfig& c, const std::string& v) { c.schedule = v == "dyadic" ? ScheduleKind::dyadic : ScheduleKind::power; })},
        {"replicate.target", "scaled-path", "zero | constant | scaled-path",
         choice({"zero", "constant", "scaled-path"},
                [](ExperimentConfig& c, const std::string& v) {
                    c.target = v == "zero" ? TargetKind::zero : v == "constant" ? TargetKind::constant : TargetKind::scaled_path;
                })},
        {"replicate.target_value", "0.5", "constant value, or factor for scaled-path",
         real([](ExperimentConfig& c, double x) { c.target_value = x; }, -kBig, kBig, false, false)},
        {"replicate.trigger", "adapted", "adapted | literal",
         choice({"adapted", "literal"},
                [](ExperimentConfig& c, const std::string& v) { c.trigger = v == "adapted" ? Trigger::adapted : Trigger::literal; })},
        {"lemma.M", "3", "level for the running integral",
         real([](ExperimentConfig& c, double x) { c.level_M = x; }, 0.0, kBig, true, false)},
        {"lemma.N_blocks", "60", "number of power-schedule blocks",
         integer<int>([](ExperimentConfig& c, int x) { c.lemma_blocks = x; }, 1, 100000)},
        {"lemma.beta", "mu/lambda + 1.5", "threshold exponent",
         real([](ExperimentConfig& c, double x) { c.lemma_beta = x; }, 0.0, kBig, true, false)},
        {"lemma.gamma", "midpoint", "schedule exponent",
         real([](ExperimentConfig& c, double x) { c.lemma_gamma = x; }, 1.0, kBig, true, false)},
        {"lemma.theta", "mu/lambda - 0.01", "Hoelder exponent bounding gamma",
         real([](ExperimentConfig& c, double x) { c.lemma_theta = x; }, 0.0, 1.0, true, false)},
    };
    return k;
}

}  // namespace

const char* command_name(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::check_conditions: return "check-conditions";
        case Command::smallball: return "smallball";
        case Command::frac_check: return "frac-check";
        case Command::replicate: return "replicate";
        case Command::lemma_divergence: return "lemma-divergence";
    }
    return "?";
}

std::optional<Command> parse_command(const std::string& s) {
    for (Command c : {Command::simulate, Command::check_conditions, Command::smallball, Command::frac_check,
                      Command::replicate, Command::lemma_divergence})
        if (s == command_name(c)) return c;
    return std::nullopt;
}

std::string ConfigError::str() const {
    std::string s = line > 0 ? "line " + std::to_string(line) + ": " : "";
    if (!key.empty()) s += key + ": ";
    return s + message;
}

ProcessModel build_model(const ModelSpec& s) {
    if (s.variant == "wiener") return ProcessModel(Wiener{});
    if (s.variant == "fbm") return ProcessModel(FBM{s.H});
    if (s.variant == "subfbm") return ProcessModel(SubFBM{s.H});
    if (s.variant == "bifbm") return ProcessModel(BiFBM{s.H, s.K});
    if (s.variant == "fracou") return ProcessModel(FracOU{s.a, s.H});
    Kernel k = s.kernel == "exp" ? Kernel::exponential(s.kernel_a) : Kernel::fbm_type(s.kernel_H);
    if (s.variant == "volterra-wiener") return ProcessModel(VolterraWiener{k});
    if (s.variant == "volterra-fbm") return ProcessModel(VolterraFBM{k, s.H});
    throw DomainError("unknown model variant " + s.variant);
}

ParseResult parse_config(const std::string& text) {
    ParseResult res;
    ExperimentConfig cfg;
    std::map<std::string, int> line_of;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            res.errors.push_back({lineno, "", "expected 'section.key = value'"});
            continue;
        }
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        const KeySpec* spec = nullptr;
        for (const KeySpec& k : keys())
            if (key == k.key) spec = &k;
        if (!spec) {
            res.errors.push_back({lineno, key, "unknown key"});
            continue;
        }
        if (line_of.count(key)) {
            res.errors.push_back({lineno, key, "duplicate key (first set on line " + std::to_string(line_of[key]) + ")"});
            continue;
        }
        line_of[key] = lineno;
        if (val.empty()) {
            res.errors.push_back({lineno, key, "missing value"});
            continue;
        }
        std::string err = spec->set(cfg, val);
        if (!err.empty()) res.errors.push_back({lineno, key, err});
        else cfg.given[key] = val;
    }

    auto line_for = [&](std::initializer_list<const char*> ks) {
        for (const char* k : ks)
            if (line_of.count(k)) return line_of[k];
        return 0;
    };
    // Cross-field checks.
    bool variant_ok = true;
    for (auto& e : res.errors)
        if (e.key.rfind("model.", 0) == 0) variant_ok = false;
    if (variant_ok) {
        try {
            build_model(cfg.model);
        } catch (const DomainError& e) {
            res.errors.push_back({line_for({"model.H", "model.K", "model.a", "model.kernel_H", "model.variant"}),
                                  "model", e.what()});
        }
    }
    if (cfg.grid.t0 + cfg.grid.delta > 1.0 + 1e-12)
        res.errors.push_back({line_for({"grid.delta", "grid.t0"}), "grid", "t0 + delta must not exceed 1"});
    double defH = (cfg.model.variant == "wiener") ? 0.5 : cfg.model.H;
    if (!line_of.count("smallball.H1")) cfg.helix.H1 = defH;
    if (!line_of.count("smallball.H2")) cfg.helix.H2 = defH;
    if (cfg.helix_given) {
        try {
            cfg.helix.validate();
        } catch (const DomainError& e) {
            res.errors.push_back({line_for({"smallball.H2", "smallball.H1", "smallball.sign"}), "smallball", e.what()});
        }
    }
    if (cfg.estimator == Estimator::bridge && cfg.model.variant != "wiener")
        res.errors.push_back({line_for({"smallball.estimator"}), "smallball.estimator",
                              "bridge estimator needs model.variant = wiener"});

    for (const KeySpec& k : keys()) cfg.resolved[k.key] = cfg.given.count(k.key) ? cfg.given[k.key] : k.def;
    if (res.errors.empty()) res.config = std::move(cfg);
    return res;
}

std::string config_help() {
    std::ostringstream os;
    os << "Config keys (section.key = value, '#' starts a comment):\n";
    for (const KeySpec& k : keys()) {
        os << "  " << k.key;
        for (std::size_t i = std::string(k.key).size(); i < 24; ++i) os << ' ';
        os << "default " << k.def << "  " << k.help << "\n";
    }
    return os.str();
}

}  // namespace qhlab
