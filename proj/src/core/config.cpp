#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace aimdmft::config {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": " + value);
    }
    if (used != value.size()) throw ConfigError("bad value for " + key + ": " + value);
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    unsigned long long out;
    try {
        out = std::stoull(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": " + value);
    }
    if (used != value.size()) throw ConfigError("bad value for " + key + ": " + value);
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    int out;
    try {
        out = std::stoi(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": " + value);
    }
    if (used != value.size()) throw ConfigError("bad value for " + key + ": " + value);
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("bad value for " + key + ": " + value);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        if (!piece.empty()) out.push_back(parse_double(key, piece));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

std::string list_text(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "u") u = parse_double(key, value);
    else if (key == "v") v = parse_double(key, value);
    else if (key == "v0") v0 = parse_double(key, value);
    else if (key == "u_list") u_list = parse_list(key, value);
    else if (key == "exact") exact = parse_bool(key, value);
    else if (key == "shots") shots = parse_u64(key, value);
    else if (key == "solutions") solutions = parse_int(key, value);
    else if (key == "time_points") time_points = parse_int(key, value);
    else if (key == "eps_cnot") eps_cnot = parse_double(key, value);
    else if (key == "readout_p10") readout_p10 = parse_double(key, value);
    else if (key == "readout_p01") readout_p01 = parse_double(key, value);
    else if (key == "seed") seed = parse_u64(key, value);
    else if (key == "tol") tol = parse_double(key, value);
    else if (key == "max_iter") max_iter = parse_int(key, value);
    else if (key == "mixing") mixing = parse_double(key, value);
    else if (key == "rate_multiplier") rate_multiplier = parse_double(key, value);
    else if (key == "min_omega1") min_omega1 = parse_double(key, value);
    else if (key == "pad_factor") pad_factor = parse_int(key, value);
    else if (key == "rerun_attempts") rerun_attempts = parse_int(key, value);
    else if (key == "eta") eta = parse_double(key, value);
    else if (key == "f_cnot") f_cnot = parse_double(key, value);
    else if (key == "t_target") t_target = parse_double(key, value);
    else if (key == "jobs") jobs = parse_int(key, value);
    else throw ConfigError("unknown config key: " + key);
}

std::string RunConfig::get(const std::string& key) const {
    if (key == "u") return format_double(u);
    if (key == "v") return format_double(v);
    if (key == "v0") return format_double(v0);
    if (key == "u_list") return list_text(u_list);
    if (key == "exact") return exact ? "true" : "false";
    if (key == "shots") return std::to_string(shots);
    if (key == "solutions") return std::to_string(solutions);
    if (key == "time_points") return std::to_string(time_points);
    if (key == "eps_cnot") return format_double(eps_cnot);
    if (key == "readout_p10") return format_double(readout_p10);
    if (key == "readout_p01") return format_double(readout_p01);
    if (key == "seed") return std::to_string(seed);
    if (key == "tol") return format_double(tol);
    if (key == "max_iter") return std::to_string(max_iter);
    if (key == "mixing") return format_double(mixing);
    if (key == "rate_multiplier") return format_double(rate_multiplier);
    if (key == "min_omega1") return format_double(min_omega1);
    if (key == "pad_factor") return std::to_string(pad_factor);
    if (key == "rerun_attempts") return std::to_string(rerun_attempts);
    if (key == "eta") return format_double(eta);
    if (key == "f_cnot") return format_double(f_cnot);
    if (key == "t_target") return format_double(t_target);
    if (key == "jobs") return std::to_string(jobs);
    throw ConfigError("unknown config key: " + key);
}

RunConfig RunConfig::from_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::string RunConfig::canonical_text() const {
    // jobs is an execution detail and stays out of the canonical form so
    // parallel and serial sweeps emit identical files.
    static const char* keys[] = {
        "eps_cnot", "eta", "exact", "f_cnot", "max_iter", "min_omega1",
        "mixing", "pad_factor", "rate_multiplier", "readout_p01", "readout_p10",
        "rerun_attempts", "seed", "shots", "solutions", "t_target", "time_points",
        "tol", "u", "u_list", "v", "v0"};
    std::string out;
    for (const char* k : keys) {
        out += std::string(k) + " = " + get(k) + "\n";
    }
    return out;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string RunConfig::file_header() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# aimdmft config=%016llx seed=%llu\n",
                  static_cast<unsigned long long>(hash()),
                  static_cast<unsigned long long>(seed));
    return buf;
}

sim::NoiseModel RunConfig::noise_model() const {
    sim::NoiseModel nm;
    nm.cnot_depolarizing = eps_cnot;
    if (readout_p10 != 0.0 || readout_p01 != 0.0) {
        nm.readout.assign(5, {readout_p10, readout_p01});
    }
    return nm;
}

spectral::Config RunConfig::spectral_config() const {
    spectral::Config sc;
    sc.rate_multiplier = rate_multiplier;
    sc.samples = time_points;
    sc.pad_factor = pad_factor;
    sc.min_omega1 = min_omega1;
    sc.rerun_attempts = rerun_attempts;
    return sc;
}

spectral::MeasureConfig RunConfig::measure_config() const {
    spectral::MeasureConfig mc;
    mc.exact = exact;
    mc.shots = shots;
    mc.noise = noise_model();
    mc.seed = seed;
    return mc;
}

dmft::LoopConfig RunConfig::loop_config() const {
    dmft::LoopConfig lc;
    lc.tol = tol;
    lc.max_iter = max_iter;
    lc.n_solutions = solutions;
    lc.mixing = mixing;
    lc.seed = seed;
    lc.spectral = spectral_config();
    lc.measure = measure_config();
    return lc;
}

void RunConfig::validate() const {
    if (v0 <= 0.0) throw ConfigError("v0 must be positive");
    if (shots < 1) throw ConfigError("shots must be at least 1");
    if (solutions < 1) throw ConfigError("solutions must be at least 1");
    if (time_points < 8) throw ConfigError("time_points too small");
    if (eps_cnot < 0.0 || eps_cnot > 1.0) throw ConfigError("eps_cnot out of [0,1]");
    if (readout_p10 < 0.0 || readout_p10 > 1.0 || readout_p01 < 0.0 || readout_p01 > 1.0) {
        throw ConfigError("readout flip probabilities out of [0,1]");
    }
    if (tol <= 0.0) throw ConfigError("tol must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
    if (rate_multiplier < 3.0 || rate_multiplier > 10.0) {
        throw ConfigError("rate_multiplier outside [3,10]");
    }
    if (pad_factor < 1) throw ConfigError("pad_factor must be at least 1");
    if (rerun_attempts < 1) throw ConfigError("rerun_attempts must be at least 1");
    if (f_cnot <= 0.0 || f_cnot > 1.0) throw ConfigError("f_cnot out of (0,1]");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (u_list.empty()) throw ConfigError("u_list must not be empty");
}

}  // namespace aimdmft::config
