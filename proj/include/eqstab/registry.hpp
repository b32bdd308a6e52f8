#pragma once

#include <map>
#include <string>
#include <vector>

#include "eqstab/dynamics.hpp"
#include "eqstab/potentials.hpp"
#include "eqstab/stability.hpp"

namespace eqstab {

// Parsed key-value config with [section] headers; later keys override
// earlier ones within a section.  Lines starting with # or ; are comments.
class Config {
  public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Map presets addressable by name + parameters:
//   doubling | linear (degree) | intermittent (alpha) | abv (slow_width)
IntervalMap make_map(const Config& cfg, const std::string& section = "map");

// Potential presets:
//   constant (value) | cosine (amplitude, frequency) | linear (slope,
//   intercept) | dyadic (depth, values=v0,v1,...)
Potential make_potential(const Config& cfg, const std::string& section = "potential");

// Sweep config from [sweep]: family, t_min/t_max/t_step or t_values, k,
// certify = off|endpoints|all.
SweepConfig make_sweep_config(const Config& cfg);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace eqstab
