// Command-line front end: pressure, equilibrium, hyptimes, certify, skew,
// and sweep subcommands over the preset registries.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "eqstab/hyperbolic_times.hpp"
#include "eqstab/io_util.hpp"
#include "eqstab/registry.hpp"
#include "eqstab/relative_pressure.hpp"
#include "eqstab/sampling.hpp"
#include "eqstab/skew_product.hpp"
#include "eqstab/stability.hpp"
#include "eqstab/transfer_operator.hpp"

namespace {

using namespace eqstab;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    int k = 512;
    double tol = 1e-12;
    std::uint64_t seed = 7;
};

Config load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) return Config::parse("");
    return Config::load(g.config_path);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << content;
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
    std::filesystem::create_directories(g.out_dir);
    return (std::filesystem::path(g.out_dir) / name).string();
}

int cmd_pressure(const GlobalOpts& g, bool dump_matrix, bool dump_sparse) {
    Config cfg = load_config(g);
    IntervalMap map = make_map(cfg);
    Potential phi = make_potential(cfg);
    int k = cfg.get_int_or("pressure", "k", g.k);
    PressureResult pr = pressure(map, phi, k);
    nlohmann::json j;
    j["map"] = map.name();
    j["potential"] = phi.label;
    j["k"] = k;
    j["pressure"] = pr.pressure;
    for (const auto& [cells, p] : pr.refinement)
        j["refinement"].push_back({{"k", cells}, {"pressure", p}});
    std::cout << j.dump(2) << "\n";
    if (dump_matrix) {
        std::ofstream mout(out_path(g, "matrix.csv"), std::ios::binary);
        dump_matrix_csv(build_ulam(map, phi, k), mout, dump_sparse);
    }
    return 0;
}

int cmd_equilibrium(const GlobalOpts& g, bool dump_matrix, bool dump_sparse) {
    Config cfg = load_config(g);
    IntervalMap map = make_map(cfg);
    Potential phi = make_potential(cfg);
    int k = cfg.get_int_or("equilibrium", "k", g.k);
    PowerIterationOptions opts;
    opts.tol = g.tol;
    SpectralSolution sol = power_iterate(build_ulam(map, phi, k), opts);
    EquilibriumMeasure em = equilibrium_measure(map, sol);
    nlohmann::json j = nlohmann::json::parse(spectral_solution_to_json(sol));
    j["pushforward_defect"] = em.pushforward_defect;
    std::string text = j.dump(2) + "\n";
    write_text(out_path(g, "equilibrium.json"), text);
    std::cout << text;
    if (dump_matrix) {
        std::ofstream mout(out_path(g, "matrix.csv"), std::ios::binary);
        dump_matrix_csv(build_ulam(map, phi, k), mout, dump_sparse);
    }
    return 0;
}

int cmd_hyptimes(const GlobalOpts& g, const std::string& convention_name, int orbits, int steps) {
    Config cfg = load_config(g);
    IntervalMap map = make_map(cfg);
    HtConvention convention =
        convention_name == "strict" ? HtConvention::strict : HtConvention::inclusive;
    double c = cfg.has("hyptimes", "c") ? cfg.get_double("hyptimes", "c")
                                        : estimate_c(map, 32, 2000);
    std::ostringstream csv;
    csv << "orbit_id,n,is_hyperbolic,statistic,density\r\n";
    DetRng rng(g.seed);
    for (int o = 0; o < orbits; ++o) {
        double x = rng.uniform();
        OrbitExpansionData data = OrbitExpansionData::from_orbit(map, x, steps, c);
        auto hts = detect_hyperbolic_times(data, convention);
        std::vector<char> is_ht(static_cast<std::size_t>(steps) + 1, 0);
        for (int n : hts) is_ht[static_cast<std::size_t>(n)] = 1;
        int seen = 0;
        for (int n = 1; n <= steps; ++n) {
            if (is_ht[static_cast<std::size_t>(n)]) ++seen;
            csv << o << "," << n << "," << int(is_ht[static_cast<std::size_t>(n)]) << ","
                << format_double(data.statistic(n)) << ","
                << format_double(static_cast<double>(seen) / n) << "\r\n";
        }
    }
    write_text(out_path(g, "hyptimes.csv"), csv.str());
    std::cout << "wrote " << out_path(g, "hyptimes.csv") << "\n";
    return 0;
}

int cmd_certify(const GlobalOpts& g) {
    Config cfg = load_config(g);
    IntervalMap map = make_map(cfg);
    Potential phi = make_potential(cfg);
    double c = cfg.has("certify", "c") ? cfg.get_double("certify", "c")
                                       : estimate_c(map, 32, 2000);
    CertifyParams params;
    params.k = cfg.get_int_or("certify", "k", g.k);
    params.horizon = cfg.get_int_or("certify", "horizon", 50);
    params.grid = cfg.get_int_or("certify", "grid", 4096);
    HyperbolicityCertificate cert = certify_hyperbolic(map, phi, c, params);
    std::string text = certificate_to_json(cert) + "\n";
    write_text(out_path(g, "certificate.json"), text);
    std::cout << text;
    return cert.passes ? 0 : 1;
}

int cmd_skew(const GlobalOpts& g) {
    Config cfg = load_config(g);
    double rate = cfg.get_double_or("skew", "rate", 0.3);
    SkewSystem sys = solenoid_skew(rate);
    double ax = cfg.get_double_or("skew", "base_amplitude", 0.2);
    double ay = cfg.get_double_or("skew", "fiber_amplitude", 0.2);
    ProductPotential phi;
    phi.eval = [ax, ay](double x, double y) {
        return ax * std::cos(2.0 * 3.14159265358979323846 * x) + ay * y;
    };
    phi.alpha = 1.0;
    phi.holder_const = std::fabs(ax) * 2.0 * 3.14159265358979323846 + std::fabs(ay);
    phi.label = "cos+fiber";
    SkewCheckParams params;
    params.k = cfg.get_int_or("skew", "k", g.k);
    params.burn_in = cfg.get_int_or("skew", "burn_in", 40);
    SkewPressureReport rep = skew_pressure_check(sys, phi, params);
    std::string text = skew_report_to_json(rep) + "\n";
    write_text(out_path(g, "skew.json"), text);
    std::cout << text;
    return 0;
}

int cmd_sweep(const GlobalOpts& g, bool certify_all) {
    Config cfg = load_config(g);
    SweepConfig sc = make_sweep_config(cfg);
    if (certify_all) sc.certify = CertifyPolicy::all;
    if (cfg.get_int_or("sweep", "k", 0) == 0) sc.k = g.k;
    SweepResult result = run_sweep(sc);
    EmitPaths paths;
    paths.csv = out_path(g, "sweep.csv");
    paths.json = out_path(g, "sweep.json");
    paths.svg_pressure = out_path(g, "pressure_vs_t.svg");
    paths.svg_distance = out_path(g, "weakstar_vs_dt.svg");
    emit(result, paths);
    std::cout << "wrote " << paths.csv << ", " << paths.json << ", " << paths.svg_pressure << ", "
              << paths.svg_distance << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermodynamic-formalism toolkit: pressure, equilibrium states, hyperbolic "
                 "times, hyperbolicity certificates, skew reductions, stability sweeps"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--config", g.config_path, "config file with [map]/[potential]/[sweep] sections");
    app.add_option("--k", g.k, "Ulam resolution (cells)");
    app.add_option("--tol", g.tol, "power-iteration tolerance");
    app.add_option("--seed", g.seed, "seed for probe sampling");
    app.add_option("--out-dir", g.out_dir, "output directory");

    bool dump_matrix = false, dump_sparse = false;
    auto* p = app.add_subcommand("pressure", "topological pressure with refinement report");
    p->add_flag("--dump-matrix", dump_matrix, "write the Ulam matrix as CSV");
    p->add_flag("--sparse", dump_sparse, "coordinate-sparse matrix dump");

    auto* e = app.add_subcommand("equilibrium", "spectral solution and equilibrium weights");
    e->add_flag("--dump-matrix", dump_matrix, "write the Ulam matrix as CSV");
    e->add_flag("--sparse", dump_sparse, "coordinate-sparse matrix dump");

    std::string convention = "inclusive";
    int orbits = 8, steps = 200;
    auto* h = app.add_subcommand("hyptimes", "hyperbolic-time detection along orbits");
    h->add_option("--ht-convention", convention, "inclusive|strict");
    h->add_option("--orbits", orbits, "number of sample orbits");
    h->add_option("--steps", steps, "orbit length");

    auto* c = app.add_subcommand("certify", "c-hyperbolicity certificate");
    auto* s = app.add_subcommand("skew", "skew-product pressure-reduction report");

    bool certify_all = false;
    auto* w = app.add_subcommand("sweep", "parameter sweep with continuity diagnostics");
    w->add_flag("--certify-all", certify_all, "certify every t instead of the endpoints");

    CLI11_PARSE(app, argc, argv);

    try {
        if (p->parsed()) return cmd_pressure(g, dump_matrix, dump_sparse);
        if (e->parsed()) return cmd_equilibrium(g, dump_matrix, dump_sparse);
        if (h->parsed()) return cmd_hyptimes(g, convention, orbits, steps);
        if (c->parsed()) return cmd_certify(g);
        if (s->parsed()) return cmd_skew(g);
        if (w->parsed()) return cmd_sweep(g, certify_all);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
