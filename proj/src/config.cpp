#include "lgtsim/config.hpp"

#include "lgtsim/dynamics.hpp"
#include "lgtsim/models.hpp"
#include "lgtsim/noise.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lgtsim::harness {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

long parse_long(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + v);
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty list entry for '" + key + "'");
        out.push_back(parse_double(item, key));
    }
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

        if (key == "model") cfg.model = val;
        else if (key == "L") cfg.L = static_cast<int>(parse_long(val, key));
        else if (key == "boundary") cfg.boundary = val;
        else if (key == "mu") cfg.mu = parse_double(val, key);
        else if (key == "h") cfg.h = parse_double(val, key);
        else if (key == "eta1") cfg.eta[0] = parse_double(val, key);
        else if (key == "eta2") cfg.eta[1] = parse_double(val, key);
        else if (key == "eta3") cfg.eta[2] = parse_double(val, key);
        else if (key == "eta4") cfg.eta[3] = parse_double(val, key);
        else if (key == "initial_state") cfg.initial_state = val;
        else if (key == "protection") cfg.protection = val;
        else if (key == "generator_source") cfg.generator_source = val;
        else if (key == "sequence") cfg.sequence = val;
        else if (key == "V") cfg.V = parse_list(val, key);
        else if (key == "lambda") cfg.lambda = parse_double(val, key);
        else if (key == "spectrum") cfg.spectrum = val;
        else if (key == "gamma") cfg.gamma = parse_list(val, key);
        else if (key == "beta") cfg.beta = parse_double(val, key);
        else if (key == "omega_cutoff") cfg.omega_cutoff = parse_double(val, key);
        else if (key == "rtn_rate") cfg.rtn_rate = parse_double(val, key);
        else if (key == "band_lo") cfg.band_lo = parse_double(val, key);
        else if (key == "band_hi") cfg.band_hi = parse_double(val, key);
        else if (key == "alpha") cfg.alpha = parse_double(val, key);
        else if (key == "flat_level") cfg.flat_level = parse_double(val, key);
        else if (key == "jumps") cfg.jumps = val;
        else if (key == "secular") cfg.secular = parse_bool(val, key);
        else if (key == "drop_zero_frequency") cfg.drop_zero_frequency = parse_bool(val, key);
        else if (key == "bin_tol") cfg.bin_tol = parse_double(val, key);
        else if (key == "coupling_budget") cfg.coupling_budget = parse_long(val, key);
        else if (key == "rel_tol") cfg.rel_tol = parse_double(val, key);
        else if (key == "abs_tol") cfg.abs_tol = parse_double(val, key);
        else if (key == "max_step") cfg.max_step = parse_double(val, key);
        else if (key == "renormalize_trace") cfg.renormalize_trace = parse_bool(val, key);
        else if (key == "grid") cfg.grid = val;
        else if (key == "min_eig_stride") cfg.min_eig_stride = static_cast<int>(parse_long(val, key));
        else if (key == "validity_threshold") cfg.validity_threshold = parse_double(val, key);
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "seed") cfg.seed = parse_long(val, key);
        else if (key == "workers") cfg.workers = static_cast<int>(parse_long(val, key));
        else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

void ExperimentConfig::validate() const {
    if (model != "u1" && model != "z2") throw ConfigError("config: model must be u1 or z2");
    if (boundary != "periodic" && boundary != "open")
        throw ConfigError("config: boundary must be periodic or open");
    if (L < 2) throw ConfigError("config: L must be at least 2");
    if (V.empty() || gamma.empty()) throw ConfigError("config: empty parameter grid");
    for (double v : V)
        if (v < 0) throw ConfigError("config: V must be non-negative");
    for (double g : gamma)
        if (g < 0) throw ConfigError("config: gamma must be non-negative");
    if (lambda < 0) throw ConfigError("config: lambda must be non-negative");

    if (protection != "none" && protection != "linear" && protection != "quadratic")
        throw ConfigError("config: protection must be none, linear or quadratic");
    if (generator_source != "full" && generator_source != "pseudo")
        throw ConfigError("config: generator_source must be full or pseudo");
    if (generator_source == "pseudo" && model != "z2")
        throw ConfigError("config: pseudogenerators exist only for the z2 model");
    if (jumps != "both" && jumps != "matter" && jumps != "gauge")
        throw ConfigError("config: jumps must be both, matter or gauge");

    // preset / model pairing
    try {
        const models::StatePreset preset = models::preset_from_string(
            initial_state.rfind("custom", 0) == 0 ? "custom" : initial_state);
        const bool preset_u1 = initial_state.rfind("u1_", 0) == 0;
        const bool preset_z2 = initial_state.rfind("z2_", 0) == 0;
        if ((preset_u1 && model != "u1") || (preset_z2 && model != "z2"))
            throw ConfigError("config: initial_state preset does not match the model");
        (void)preset;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (protection == "linear") {
        try {
            if (sequence.rfind("custom:", 0) != 0)
                (void)models::sequence_kind_from_string(sequence);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }

    try {
        noise::Spectrum probe;
        probe.kind = noise::spectrum_kind_from_string(spectrum);
        probe.gamma = gamma[0] > 0 ? gamma[0] : 1.0;
        probe.beta = beta;
        probe.omega_cutoff = omega_cutoff;
        probe.rate = rtn_rate;
        probe.band_lo = band_lo;
        probe.band_hi = band_hi;
        probe.alpha = alpha;
        probe.level = flat_level;
        probe.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (rel_tol <= 0 || abs_tol <= 0 || max_step <= 0)
        throw ConfigError("config: integrator tolerances and max_step must be positive");
    if (bin_tol < 0) throw ConfigError("config: bin_tol must be non-negative");
    if (coupling_budget < 0) throw ConfigError("config: coupling_budget must be non-negative");
    if (validity_threshold <= 0) throw ConfigError("config: validity_threshold must be positive");
    (void)output_grid();  // throws ConfigError on malformed grid
}

std::vector<double> ExperimentConfig::output_grid() const {
    const auto colon = grid.find(':');
    if (colon == std::string::npos) throw ConfigError("config: grid must be log:..., lin:... or list:...");
    const std::string kind = grid.substr(0, colon);
    const std::string args = grid.substr(colon + 1);
    std::vector<double> a;
    try {
        a = parse_list(args, "grid");
    } catch (const ConfigError&) {
        throw ConfigError("config: malformed grid specification: " + grid);
    }
    try {
        if (kind == "log") {
            if (a.size() != 3) throw std::invalid_argument("log grid needs tmin,tmax,n");
            return dynamics::log_grid(a[0], a[1], static_cast<int>(a[2]));
        }
        if (kind == "lin") {
            if (a.size() != 2) throw std::invalid_argument("lin grid needs tmax,n");
            return dynamics::uniform_grid(a[0], static_cast<int>(a[1]));
        }
        if (kind == "list") {
            for (size_t i = 1; i < a.size(); ++i)
                if (a[i] <= a[i - 1]) throw std::invalid_argument("list grid must increase");
            if (a[0] < 0) throw std::invalid_argument("grid must start at t >= 0");
            return a;
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    throw ConfigError("config: unknown grid kind: " + kind);
}

std::string ExperimentConfig::echo() const {
    std::ostringstream out;
    out << "L = " << L << "\n";
    out << "V = " << join(V) << "\n";
    out << "abs_tol = " << format_double(abs_tol) << "\n";
    out << "alpha = " << format_double(alpha) << "\n";
    out << "band_hi = " << format_double(band_hi) << "\n";
    out << "band_lo = " << format_double(band_lo) << "\n";
    out << "beta = " << format_double(beta) << "\n";
    out << "bin_tol = " << format_double(bin_tol) << "\n";
    out << "boundary = " << boundary << "\n";
    out << "coupling_budget = " << coupling_budget << "\n";
    out << "drop_zero_frequency = " << (drop_zero_frequency ? "true" : "false") << "\n";
    out << "eta1 = " << format_double(eta[0]) << "\n";
    out << "eta2 = " << format_double(eta[1]) << "\n";
    out << "eta3 = " << format_double(eta[2]) << "\n";
    out << "eta4 = " << format_double(eta[3]) << "\n";
    out << "flat_level = " << format_double(flat_level) << "\n";
    out << "gamma = " << join(gamma) << "\n";
    out << "generator_source = " << generator_source << "\n";
    out << "grid = " << grid << "\n";
    out << "h = " << format_double(h) << "\n";
    out << "initial_state = " << initial_state << "\n";
    out << "jumps = " << jumps << "\n";
    out << "lambda = " << format_double(lambda) << "\n";
    out << "max_step = " << format_double(max_step) << "\n";
    out << "min_eig_stride = " << min_eig_stride << "\n";
    out << "model = " << model << "\n";
    out << "mu = " << format_double(mu) << "\n";
    out << "omega_cutoff = " << format_double(omega_cutoff) << "\n";
    out << "output_dir = " << output_dir << "\n";
    out << "protection = " << protection << "\n";
    out << "rel_tol = " << format_double(rel_tol) << "\n";
    out << "renormalize_trace = " << (renormalize_trace ? "true" : "false") << "\n";
    out << "rtn_rate = " << format_double(rtn_rate) << "\n";
    out << "secular = " << (secular ? "true" : "false") << "\n";
    out << "seed = " << seed << "\n";
    out << "sequence = " << sequence << "\n";
    out << "spectrum = " << spectrum << "\n";
    out << "validity_threshold = " << format_double(validity_threshold) << "\n";
    out << "workers = " << workers << "\n";
    return out.str();
}

}  // namespace lgtsim::harness
