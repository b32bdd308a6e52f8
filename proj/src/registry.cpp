#include "eqstab/registry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace eqstab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            cfg.sections_[section];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key=value, got: " + t);
        cfg.sections_[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key))
        throw ConfigError("config: missing [" + section + "] " + key);
    return s->second.at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    return std::stod(get(section, key));
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int_or(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? std::stoi(get(section, key)) : fallback;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(std::stod(t));
    }
    return out;
}

IntervalMap make_map(const Config& cfg, const std::string& section) {
    std::string name = cfg.get_or(section, "name", "doubling");
    if (name == "doubling") return doubling_map();
    if (name == "linear") return linear_full_map(cfg.get_int_or(section, "degree", 3));
    if (name == "intermittent") return intermittent_map(cfg.get_double_or(section, "alpha", 0.5));
    if (name == "abv") return abv_linear_map(cfg.get_double_or(section, "slow_width", 0.9));
    throw ConfigError("unknown map preset: " + name);
}

Potential make_potential(const Config& cfg, const std::string& section) {
    std::string name = cfg.get_or(section, "name", "constant");
    if (name == "constant") return constant_potential(cfg.get_double_or(section, "value", 0.0));
    if (name == "cosine")
        return cosine_potential(cfg.get_double_or(section, "amplitude", 1.0),
                                cfg.get_int_or(section, "frequency", 1));
    if (name == "linear")
        return linear_potential(cfg.get_double_or(section, "slope", 1.0),
                                cfg.get_double_or(section, "intercept", 0.0));
    if (name == "dyadic") {
        int depth = cfg.get_int_or(section, "depth", 1);
        auto values = parse_double_list(cfg.get(section, "values"));
        return dyadic_potential(depth, std::move(values));
    }
    throw ConfigError("unknown potential preset: " + name);
}

SweepConfig make_sweep_config(const Config& cfg) {
    SweepConfig sc;
    sc.family = sweep_family(cfg.get_or("sweep", "family", "potential_scale"));
    if (cfg.has("sweep", "t_values")) {
        sc.t_grid = parse_double_list(cfg.get("sweep", "t_values"));
    } else {
        double lo = cfg.get_double_or("sweep", "t_min", 0.0);
        double hi = cfg.get_double_or("sweep", "t_max", 0.5);
        double step = cfg.get_double_or("sweep", "t_step", 0.05);
        if (!(step > 0.0)) throw ConfigError("sweep: t_step must be > 0");
        for (double t = lo; t <= hi + 1e-12; t += step) sc.t_grid.push_back(t);
    }
    sc.k = cfg.get_int_or("sweep", "k", 512);
    sc.quadrature = cfg.get_int_or("sweep", "quadrature", 8);
    std::string certify = cfg.get_or("sweep", "certify",
                                     sc.family.map_varies ? "endpoints" : "off");
    if (certify == "off")
        sc.certify = CertifyPolicy::off;
    else if (certify == "endpoints")
        sc.certify = CertifyPolicy::endpoints;
    else if (certify == "all")
        sc.certify = CertifyPolicy::all;
    else
        throw ConfigError("sweep: certify must be off|endpoints|all");
    return sc;
}

}  // namespace eqstab
