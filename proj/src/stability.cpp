#include "eqstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "eqstab/hyperbolic_times.hpp"
#include "eqstab/io_util.hpp"
#include "eqstab/parallel.hpp"
#include "eqstab/skew_product.hpp"

namespace eqstab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double weak_star_distance(const std::vector<double>& mu1, const std::vector<double>& mu2,
                          WeakStarMode mode) {
    if (mu1.size() != mu2.size() || mu1.empty())
        throw ShapeMismatch("weak_star_distance: cell counts differ");
    const int k = static_cast<int>(mu1.size());
    if (mode == WeakStarMode::fourier) {
        double worst = 0.0;
        for (int m = 1; m <= 20; ++m) {
            std::complex<double> gap(0.0, 0.0);
            for (int i = 0; i < k; ++i) {
                double center = (i + 0.5) / static_cast<double>(k);
                std::complex<double> wave = std::polar(1.0, 2.0 * kPi * m * center);
                gap += (mu1[static_cast<std::size_t>(i)] - mu2[static_cast<std::size_t>(i)]) * wave;
            }
            worst = std::max(worst, std::abs(gap));
        }
        return worst;
    }
    // Wasserstein-1 on [0,1]: integral of |F1 - F2| with piecewise-linear
    // CDFs (cell mass spread uniformly within its cell).
    double total = 0.0;
    double f1 = 0.0, f2 = 0.0;
    const double w = 1.0 / static_cast<double>(k);
    for (int i = 0; i < k; ++i) {
        double g1 = f1 + mu1[static_cast<std::size_t>(i)];
        double g2 = f2 + mu2[static_cast<std::size_t>(i)];
        double d0 = f1 - f2, d1 = g1 - g2;
        if (d0 * d1 >= 0.0) {
            total += 0.5 * std::fabs(d0 + d1) * w;
        } else {  // linear difference crosses zero inside the cell
            total += 0.5 * (d0 * d0 + d1 * d1) / (std::fabs(d1 - d0)) * w;
        }
        f1 = g1;
        f2 = g2;
    }
    return total;
}

EntropyEstimate entropy_from_identity(const SpectralSolution& sol, const Potential& phi, int deg,
                                      double tolerance) {
    double integral = 0.0;
    const int k = sol.k;
    for (int i = 0; i < k; ++i)
        integral += sol.mu[static_cast<std::size_t>(i)] * phi((i + 0.5) / static_cast<double>(k));
    EntropyEstimate est;
    est.value = sol.pressure - integral;
    est.tolerance = tolerance;
    est.admissible = est.value >= -tolerance &&
                     est.value <= std::log(static_cast<double>(deg)) + tolerance;
    return est;
}

// --- families ------------------------------------------------------------------

SweepFamily family_potential_scale() {
    SweepFamily f;
    f.name = "potential_scale";
    f.map_at = [](double) { return doubling_map(); };
    f.potential_at = [](double t) { return cosine_potential(t); };
    f.map_varies = false;
    return f;
}

SweepFamily family_intermittent_alpha() {
    SweepFamily f;
    f.name = "intermittent_alpha";
    f.map_at = [](double t) { return intermittent_map(t); };
    f.potential_at = [](double) { return constant_potential(0.0); };
    f.map_varies = true;
    return f;
}

SweepFamily family_constant() {
    SweepFamily f;
    f.name = "constant";
    f.map_at = [](double) { return doubling_map(); };
    f.potential_at = [](double) { return cosine_potential(0.25); };
    f.map_varies = false;
    return f;
}

SweepFamily family_skew_cos_fiber() {
    // The contracting-fiber family reduced to its base: F_t has doubling
    // base, g = 0.3 y, and phi_t(x,y) = t (cos(2 pi x)/5 + y/5); the induced
    // base potential is phi_t(x, 0).
    SweepFamily f;
    f.name = "skew_cos_fiber";
    f.map_at = [](double) { return doubling_map(); };
    f.potential_at = [](double t) {
        SkewSystem sys = solenoid_skew(0.3);
        ProductPotential phi;
        phi.eval = [t](double x, double y) {
            return t * (std::cos(2.0 * kPi * x) / 5.0 + y / 5.0);
        };
        phi.alpha = 1.0;
        phi.holder_const = std::fabs(t) * (2.0 * kPi / 5.0 + 0.2);
        phi.label = "skew_cos_fiber";
        return induced_base_potential(bar_phi(phi, sys));
    };
    f.map_varies = false;
    return f;
}

SweepFamily sweep_family(const std::string& name) {
    if (name == "potential_scale") return family_potential_scale();
    if (name == "intermittent_alpha") return family_intermittent_alpha();
    if (name == "constant") return family_constant();
    if (name == "skew_cos_fiber") return family_skew_cos_fiber();
    throw ConfigError("unknown sweep family: " + name);
}

// --- run_sweep -------------------------------------------------------------------

namespace {

void summarize_measure(SweepRecord& rec, const std::vector<double>& mu, int fourier_modes) {
    const int k = static_cast<int>(mu.size());
    double mean = 0.0;
    for (int i = 0; i < k; ++i)
        mean += mu[static_cast<std::size_t>(i)] * (i + 0.5) / static_cast<double>(k);
    double var = 0.0;
    for (int i = 0; i < k; ++i) {
        double c = (i + 0.5) / static_cast<double>(k) - mean;
        var += mu[static_cast<std::size_t>(i)] * c * c;
    }
    rec.mu_mean = mean;
    rec.mu_variance = var;
    rec.fourier_re.resize(static_cast<std::size_t>(fourier_modes));
    rec.fourier_im.resize(static_cast<std::size_t>(fourier_modes));
    for (int m = 1; m <= fourier_modes; ++m) {
        std::complex<double> acc(0.0, 0.0);
        for (int i = 0; i < k; ++i)
            acc += mu[static_cast<std::size_t>(i)] *
                   std::polar(1.0, 2.0 * kPi * m * (i + 0.5) / static_cast<double>(k));
        rec.fourier_re[static_cast<std::size_t>(m - 1)] = acc.real();
        rec.fourier_im[static_cast<std::size_t>(m - 1)] = acc.imag();
    }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
    if (config.t_grid.empty()) throw ConfigError("run_sweep: empty t grid");
    for (std::size_t i = 1; i < config.t_grid.size(); ++i)
        if (!(config.t_grid[i] > config.t_grid[i - 1]))
            throw ConfigError("run_sweep: t grid must be strictly increasing");
    if (config.k < 2) throw ConfigError("run_sweep: k must be >= 2");

    SweepResult result;
    result.family = config.family.name;
    result.k = config.k;
    result.records.resize(config.t_grid.size());

    parallel_for(config.t_grid.size(), [&](std::size_t i) {
        double t = config.t_grid[i];
        SweepRecord& rec = result.records[i];
        rec.t = t;
        try {
            IntervalMap map = config.family.map_at(t);
            Potential phi = config.family.potential_at(t);
            SpectralSolution sol = power_iterate(build_ulam(map, phi, config.k, config.quadrature));
            rec.pressure = sol.pressure;
            rec.lambda = sol.lambda;
            rec.residual = sol.residual;
            rec.iterations = sol.iterations;
            EntropyEstimate ent = entropy_from_identity(sol, phi, map.degree());
            rec.entropy = ent.value;
            rec.entropy_admissible = ent.admissible;
            summarize_measure(rec, sol.mu, config.fourier_modes);
            rec.mu = std::move(sol.mu);
            if (config.family.map_varies) rec.c_estimate = estimate_c(map, 32, 2000);
        } catch (const Error& e) {
            rec.error = e.what();
        }
    });

    for (std::size_t i = 0; i + 1 < result.records.size(); ++i) {
        const SweepRecord& a = result.records[i];
        const SweepRecord& b = result.records[i + 1];
        SweepPair pair;
        pair.t_lo = a.t;
        pair.t_hi = b.t;
        pair.dt = b.t - a.t;
        if (a.error.empty() && b.error.empty()) {
            pair.dp = std::fabs(b.pressure - a.pressure);
            pair.fourier_distance = weak_star_distance(a.mu, b.mu, WeakStarMode::fourier);
            pair.wasserstein_distance = weak_star_distance(a.mu, b.mu, WeakStarMode::wasserstein);
            pair.valid = true;
        }
        result.pairs.push_back(pair);
    }

    if (config.certify != CertifyPolicy::off) {
        std::vector<std::size_t> targets;
        if (config.certify == CertifyPolicy::all) {
            for (std::size_t i = 0; i < config.t_grid.size(); ++i) targets.push_back(i);
        } else {
            targets.push_back(0);
            if (config.t_grid.size() > 1) targets.push_back(config.t_grid.size() - 1);
        }
        for (std::size_t i : targets) {
            double t = config.t_grid[i];
            IntervalMap map = config.family.map_at(t);
            Potential phi = config.family.potential_at(t);
            double c = estimate_c(map, 32, 2000);
            CertifyParams cp;
            cp.k = config.k;
            result.certificates.emplace_back(t, certify_hyperbolic(map, phi, c, cp));
        }
    }
    return result;
}

// --- serialization ---------------------------------------------------------------

namespace {

nlohmann::json record_to_json(const SweepRecord& r) {
    nlohmann::json j;
    j["t"] = r.t;
    j["pressure"] = r.pressure;
    j["lambda"] = r.lambda;
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    j["entropy"] = r.entropy;
    j["entropy_admissible"] = r.entropy_admissible;
    j["mu_mean"] = r.mu_mean;
    j["mu_variance"] = r.mu_variance;
    j["fourier_re"] = r.fourier_re;
    j["fourier_im"] = r.fourier_im;
    j["mu"] = r.mu;
    if (r.c_estimate) j["c_estimate"] = *r.c_estimate;
    j["error"] = r.error;
    return j;
}

SweepRecord record_from_json(const nlohmann::json& j) {
    SweepRecord r;
    r.t = j.at("t").get<double>();
    r.pressure = j.at("pressure").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.residual = j.at("residual").get<double>();
    r.iterations = j.at("iterations").get<long>();
    r.entropy = j.at("entropy").get<double>();
    r.entropy_admissible = j.at("entropy_admissible").get<bool>();
    r.mu_mean = j.at("mu_mean").get<double>();
    r.mu_variance = j.at("mu_variance").get<double>();
    r.fourier_re = j.at("fourier_re").get<std::vector<double>>();
    r.fourier_im = j.at("fourier_im").get<std::vector<double>>();
    r.mu = j.at("mu").get<std::vector<double>>();
    if (j.contains("c_estimate")) r.c_estimate = j.at("c_estimate").get<double>();
    r.error = j.at("error").get<std::string>();
    return r;
}

nlohmann::json pair_to_json(const SweepPair& p) {
    nlohmann::json j;
    j["t_lo"] = p.t_lo;
    j["t_hi"] = p.t_hi;
    j["dt"] = p.dt;
    j["dp"] = p.dp;
    j["fourier_distance"] = p.fourier_distance;
    j["wasserstein_distance"] = p.wasserstein_distance;
    j["valid"] = p.valid;
    return j;
}

SweepPair pair_from_json(const nlohmann::json& j) {
    SweepPair p;
    p.t_lo = j.at("t_lo").get<double>();
    p.t_hi = j.at("t_hi").get<double>();
    p.dt = j.at("dt").get<double>();
    p.dp = j.at("dp").get<double>();
    p.fourier_distance = j.at("fourier_distance").get<double>();
    p.wasserstein_distance = j.at("wasserstein_distance").get<double>();
    p.valid = j.at("valid").get<bool>();
    return p;
}

}  // namespace

std::string sweep_result_to_json(const SweepResult& result) {
    nlohmann::json j;
    j["family"] = result.family;
    j["k"] = result.k;
    j["records"] = nlohmann::json::array();
    for (const auto& r : result.records) j["records"].push_back(record_to_json(r));
    j["pairs"] = nlohmann::json::array();
    for (const auto& p : result.pairs) j["pairs"].push_back(pair_to_json(p));
    j["certificates"] = nlohmann::json::array();
    for (const auto& [t, cert] : result.certificates) {
        nlohmann::json c = nlohmann::json::parse(certificate_to_json(cert));
        c["t"] = t;
        j["certificates"].push_back(c);
    }
    return j.dump(2);
}

SweepResult sweep_result_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SweepResult result;
    result.family = j.at("family").get<std::string>();
    result.k = j.at("k").get<int>();
    for (const auto& r : j.at("records")) result.records.push_back(record_from_json(r));
    for (const auto& p : j.at("pairs")) result.pairs.push_back(pair_from_json(p));
    // Certificates round-trip through their own JSON and are compared by
    // the scalar fields only; sweeps re-emit them verbatim.
    return result;
}

bool operator==(const SweepRecord& a, const SweepRecord& b) {
    return a.t == b.t && a.pressure == b.pressure && a.lambda == b.lambda &&
           a.residual == b.residual && a.iterations == b.iterations && a.entropy == b.entropy &&
           a.entropy_admissible == b.entropy_admissible && a.mu_mean == b.mu_mean &&
           a.mu_variance == b.mu_variance && a.fourier_re == b.fourier_re &&
           a.fourier_im == b.fourier_im && a.mu == b.mu && a.c_estimate == b.c_estimate &&
           a.error == b.error;
}

bool operator==(const SweepPair& a, const SweepPair& b) {
    return a.t_lo == b.t_lo && a.t_hi == b.t_hi && a.dt == b.dt && a.dp == b.dp &&
           a.fourier_distance == b.fourier_distance &&
           a.wasserstein_distance == b.wasserstein_distance && a.valid == b.valid;
}

bool operator==(const SweepResult& a, const SweepResult& b) {
    return a.family == b.family && a.k == b.k && a.records == b.records && a.pairs == b.pairs;
}

std::string sweep_result_to_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "row_type,t,t_hi,pressure,lambda,residual,iterations,entropy,mu_mean,mu_variance,"
          "c_estimate,dt,dp,fourier_distance,wasserstein_distance,error\r\n";
    auto field = [](double v) { return format_double(v); };
    for (const auto& r : result.records) {
        os << "point," << field(r.t) << ",,";
        if (r.error.empty()) {
            os << field(r.pressure) << "," << field(r.lambda) << "," << field(r.residual) << ","
               << r.iterations << "," << field(r.entropy) << "," << field(r.mu_mean) << ","
               << field(r.mu_variance) << ",";
            os << (r.c_estimate ? field(*r.c_estimate) : "") << ",,,,,";
        } else {
            os << ",,,,,,,,,,,";
        }
        // RFC 4180 quoting for the free-text error field
        std::string err = r.error;
        if (err.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char ch : err) {
                if (ch == '"') quoted += "\"\"";
                else quoted += ch;
            }
            quoted += "\"";
            err = quoted;
        }
        os << err << "\r\n";
    }
    for (const auto& p : result.pairs) {
        os << "pair," << field(p.t_lo) << "," << field(p.t_hi) << ",,,,,,,,,";
        if (p.valid)
            os << field(p.dt) << "," << field(p.dp) << "," << field(p.fourier_distance) << ","
               << field(p.wasserstein_distance) << ",";
        else
            os << field(p.dt) << ",,,,";
        os << "\r\n";
    }
    return os.str();
}

// --- SVG -------------------------------------------------------------------------

std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<PlotSeries>& series) {
    const int width = 640, height = 420;
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) { xmax = xmin + 1.0; }
    if (!(ymax > ymin)) { ymax = ymin + 1.0; }
    double xpad = 0.02 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;
    auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto sy = [&](double v) { return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
       << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << title << "</text>\n";
    // axes
    os << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
       << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
       << height - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = xmin + (xmax - xmin) * i / 4.0;
        double fy = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << format_double(sx(fx)) << "\" y=\"" << height - mb + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(fx) << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << format_double(sy(fy) + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(fy) << "</text>\n";
    }
    os << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";
    int ci = 0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) os << " ";
            os << format_double(sx(s.x[i])) << "," << format_double(sy(s.y[i]));
        }
        os << "\"/>\n";
        os << "<text x=\"" << width - mr - 8 << "\" y=\"" << mt + 16 * (ci + 1)
           << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[ci % 4] << "\">"
           << s.label << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
    return os.str();
}

void emit(const SweepResult& result, const EmitPaths& paths) {
    auto write_file = [](const std::string& path, const std::string& content) {
        if (path.empty()) return;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("emit: cannot open " + path);
        out << content;
        if (!out) throw IoError("emit: write failed for " + path);
    };
    write_file(paths.csv, sweep_result_to_csv(result));
    write_file(paths.json, sweep_result_to_json(result));
    if (!paths.svg_pressure.empty()) {
        PlotSeries s;
        s.label = "pressure";
        for (const auto& r : result.records)
            if (r.error.empty()) {
                s.x.push_back(r.t);
                s.y.push_back(r.pressure);
            }
        write_file(paths.svg_pressure,
                   render_svg_plot("pressure vs t (" + result.family + ")", "t", "pressure", {s}));
    }
    if (!paths.svg_distance.empty()) {
        PlotSeries sf, sw;
        sf.label = "fourier";
        sw.label = "wasserstein";
        for (const auto& p : result.pairs)
            if (p.valid) {
                sf.x.push_back(p.dt);
                sf.y.push_back(p.fourier_distance);
                sw.x.push_back(p.dt);
                sw.y.push_back(p.wasserstein_distance);
            }
        write_file(paths.svg_distance,
                   render_svg_plot("weak-* distance vs dt (" + result.family + ")", "dt",
                                   "distance", {sf, sw}));
    }
}

}  // namespace eqstab
