// latsec — lattice secrecy-gain toolkit.
//
// Subcommands reproduce the library's headline quantities as CSV/JSON:
//   gain     exact or numeric secrecy gain of a lattice or extremal dimension
//   curve    secrecy-function samples over a dB range (CSV)
//   bound    Siegel-Weil lower bound vs dimension (CSV)
//   wiretap  operating-point algebra and the coset-coding simulator
//
// Exit codes: 0 success, 1 I/O or precision failure, 2 usage/config error.

#include <latsec/errors.hpp>
#include <latsec/lattice.hpp>
#include <latsec/modform.hpp>
#include <latsec/secrecy.hpp>
#include <latsec/wiretap.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --out paths honour LATSEC_OUTPUT_DIR for relative names.
std::filesystem::path resolve_output(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("LATSEC_OUTPUT_DIR"))
            return std::filesystem::path(dir) / p;
    }
    return p;
}

json base_report(const std::string& command) {
    return json{{"schema", "latsec-report/1"},
                {"command", command},
                {"inputs", json::object()},
                {"outputs", json::object()},
                {"warnings", json::array()}};
}

struct SourceArgs {
    std::string lattice;
    int extremal = 0;
    std::string json_path;

    void attach(CLI::App* cmd) {
        auto* a = cmd->add_option("--lattice", lattice,
                                  "catalog lattice name (Zn(k), Dn(k), D4, E8, Leech)");
        auto* b = cmd->add_option("--extremal", extremal,
                                  "extremal even unimodular dimension (8..80)");
        auto* c = cmd->add_option("--json", json_path,
                                  "lattice JSON document {name, dim, gram}");
        a->excludes(b)->excludes(c);
        b->excludes(c);
    }

    [[nodiscard]] latsec::ThetaSource make(json& inputs) const {
        if (extremal != 0) {
            inputs["extremal"] = extremal;
            return latsec::ThetaSource(latsec::extremal_theta(extremal));
        }
        if (!json_path.empty()) {
            inputs["json"] = json_path;
            std::ifstream in(json_path);
            if (!in) throw std::runtime_error("cannot open " + json_path);
            json doc = json::parse(in);
            return latsec::ThetaSource(latsec::lattice_from_json(doc));
        }
        if (!lattice.empty()) {
            inputs["lattice"] = lattice;
            return latsec::ThetaSource(latsec::catalog(lattice));
        }
        throw CLI::ValidationError("one of --lattice/--extremal/--json is required");
    }
};

int run_gain(const SourceArgs& src, bool exact, double lo_db, double hi_db,
             double tol) {
    json report = base_report("gain");
    auto source = src.make(report["inputs"]);
    report["inputs"]["mode"] = exact ? "exact" : "numeric";

    latsec::GainSearch search;
    search.t_min_db = lo_db;
    search.t_max_db = hi_db;
    search.tol_t = tol;
    const auto result = latsec::secrecy_gain(
        source, exact ? latsec::GainMethod::ExactAtOne : latsec::GainMethod::NumericSearch,
        search);

    auto& out = report["outputs"];
    out["gain"] = result.gain;
    if (result.gain_exact)
        out["gain_exact"] = latsec::rational_string(*result.gain_exact);
    else if (source.poly() && source.poly()->dim() % 8 == 0)
        out["gain_exact_at_y1"] =
            latsec::rational_string(latsec::exact_gain_at_one(*source.poly()));
    out["y_star"] = result.y_star;
    out["y_star_db"] = result.y_star_db;
    out["method"] = result.method == latsec::GainMethod::ExactAtOne
                        ? "exact_at_one"
                        : "numeric_search";
    out["symmetry_residual"] = result.symmetry_residual;
    if (result.assumes_argmax_at_one)
        report["warnings"].push_back(
            "exact mode evaluates at y = 1; optimality there is unproven in general");
    if (result.boundary_warning)
        report["warnings"].push_back(
            "maximum sits on the search boundary; widen --range-db");
    std::cout << report.dump(2) << "\n";
    return 0;
}

int run_curve(const SourceArgs& src, double lo_db, double hi_db, int steps,
              const std::string& out_path) {
    json inputs;
    auto source = src.make(inputs);
    const auto rows = latsec::secrecy_curve(source, lo_db, hi_db, steps);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        const auto p = resolve_output(out_path);
        file.open(p);
        if (!file) {
            std::cerr << "error: cannot write " << p.string() << "\n";
            return 1;
        }
        out = &file;
    }
    *out << "y_db,xi\n";
    for (const auto& [t, xi] : rows) *out << fmt17(t) << "," << fmt17(xi) << "\n";
    return out->good() ? 0 : 1;
}

int run_bound(int n_min, int n_max, int step, bool asymptotic,
              const std::string& out_path) {
    static const std::map<int, latsec::Rational> extremal_gains = [] {
        std::map<int, latsec::Rational> m;
        for (int n : {8, 24, 32, 48, 72, 80})
            m[n] = latsec::exact_gain_at_one(latsec::extremal_theta(n));
        return m;
    }();

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        const auto p = resolve_output(out_path);
        file.open(p);
        if (!file) {
            std::cerr << "error: cannot write " << p.string() << "\n";
            return 1;
        }
        out = &file;
    }
    *out << (asymptotic ? "n,siegel_weil,asymptotic,extremal_gain\n"
                        : "n,siegel_weil,extremal_gain\n");
    for (int n = n_min; n <= n_max; n += step) {
        if (n % 8 != 0) {
            std::cerr << "warning: skipping n = " << n
                      << " (not a multiple of 8)\n";
            continue;
        }
        *out << n << "," << fmt17(latsec::siegel_weil_bound(n));
        if (asymptotic) *out << "," << fmt17(latsec::asymptotic_bound(n));
        if (auto it = extremal_gains.find(n); it != extremal_gains.end())
            *out << "," << fmt17(latsec::to_double(it->second));
        else
            *out << ",";
        *out << "\n";
    }
    return out->good() ? 0 : 1;
}

double gamma_from_flags(double gamma, double gamma_db, bool has_db) {
    return has_db ? std::pow(10.0, gamma_db / 10.0) : gamma;
}

int run_wiretap_op_point(double R, double Rs, double gamma) {
    json report = base_report("wiretap op-point");
    report["inputs"] = {{"R", R}, {"R_s", Rs}, {"gamma_e", gamma}};
    report["outputs"]["y"] = latsec::operating_point_y(R, Rs, gamma);
    report["outputs"]["y_db"] =
        10.0 * std::log10(report["outputs"]["y"].get<double>());
    std::cout << report.dump(2) << "\n";
    return 0;
}

int run_wiretap_rate(double R, double gamma) {
    json report = base_report("wiretap rate");
    report["inputs"] = {{"R", R}, {"gamma_e", gamma}};
    const double rs = latsec::secrecy_rate_unimodular(R, gamma);
    report["outputs"]["R_s"] = rs;
    report["outputs"]["gamma_check"] = latsec::gamma_for_rates(R, rs);
    if (rs < 0)
        report["warnings"].push_back("negative secrecy rate at this SNR");
    std::cout << report.dump(2) << "\n";
    return 0;
}

int run_wiretap_simulate(const std::string& config_path, std::uint64_t trials,
                         std::uint64_t seed, unsigned threads, int box) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open " << config_path << "\n";
        return 1;
    }
    auto cfg = latsec::wiretap_config_from_json(json::parse(in));
    cfg = latsec::validate_config(cfg);

    latsec::MonteCarloOptions opts;
    opts.threads = threads;
    opts.box_halfwidth = box;
    const auto mc = latsec::monte_carlo_eve(cfg, trials, seed, opts);

    json report = base_report("wiretap simulate");
    report["inputs"] = {{"config", config_path},
                        {"trials", trials},
                        {"seed", seed},
                        {"box_halfwidth", box}};
    report["outputs"] = {{"p_hat", mc.p_hat},
                         {"ci95", mc.ci95},
                         {"formula_value", mc.formula_value},
                         {"regime_flag", mc.regime_flag}};
    if (mc.regime_flag)
        report["warnings"].push_back(
            "closed-form value exceeds 1: outside the moderate-to-high "
            "secrecy-rate regime");
    std::cout << report.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice secrecy-gain toolkit"};
    app.require_subcommand(1);

    // --- gain ---
    auto* gain = app.add_subcommand("gain", "secrecy gain of a lattice");
    SourceArgs gain_src;
    gain_src.attach(gain);
    bool exact = false, numeric = false;
    gain->add_flag("--exact", exact, "exact rational gain at y = 1 (extremal sources)");
    gain->add_flag("--numeric", numeric, "numeric search over y (default)");
    std::vector<double> range_db = {-10.0, 10.0};
    gain->add_option("--range-db", range_db, "search range in dB")->expected(2);
    double gain_tol = 1e-6;
    gain->add_option("--tol", gain_tol, "search tolerance on 10 log10 y");

    // --- curve ---
    auto* curve = app.add_subcommand("curve", "secrecy-function samples (CSV)");
    SourceArgs curve_src;
    curve_src.attach(curve);
    double min_db = -6.0, max_db = 6.0;
    int steps = 121;
    std::string curve_out;
    curve->add_option("--min-db", min_db, "left end of the dB range");
    curve->add_option("--max-db", max_db, "right end of the dB range");
    curve->add_option("--steps", steps, "number of samples");
    curve->add_option("--out", curve_out, "output CSV path (default stdout)");

    // --- bound ---
    auto* bound = app.add_subcommand("bound", "Siegel-Weil bound vs dimension (CSV)");
    int n_min = 8, n_max = 80, n_step = 8;
    bool asymptotic = false;
    std::string bound_out;
    bound->add_option("--n-min", n_min, "smallest dimension");
    bound->add_option("--n-max", n_max, "largest dimension");
    bound->add_option("--step", n_step, "dimension step");
    bound->add_flag("--asymptotic", asymptotic, "include the asymptotic column");
    bound->add_option("--out", bound_out, "output CSV path (default stdout)");

    // --- wiretap ---
    auto* wiretap = app.add_subcommand("wiretap", "wiretap-channel algebra and simulation");
    wiretap->require_subcommand(1);

    auto* op = wiretap->add_subcommand("op-point", "operating point y from rates and SNR");
    double op_r = 0, op_rs = 0, op_gamma = 0, op_gamma_db = 0;
    op->add_option("--R", op_r, "total rate (bits/complex use)")->required();
    op->add_option("--Rs", op_rs, "secrecy rate")->required();
    auto* og = op->add_option("--gamma", op_gamma, "eavesdropper SNR (ratio)");
    auto* ogd = op->add_option("--gamma-db", op_gamma_db, "eavesdropper SNR (dB)");
    og->excludes(ogd);

    auto* rate = wiretap->add_subcommand("rate", "secrecy rate at y = 1 from SNR");
    double rate_r = 0, rate_gamma = 0, rate_gamma_db = 0;
    rate->add_option("--R", rate_r, "total rate (bits/complex use)")->required();
    auto* rg = rate->add_option("--gamma", rate_gamma, "eavesdropper SNR (ratio)");
    auto* rgd = rate->add_option("--gamma-db", rate_gamma_db, "eavesdropper SNR (dB)");
    rg->excludes(rgd);

    auto* sim = wiretap->add_subcommand("simulate", "Monte Carlo coset decoding");
    std::string sim_config;
    std::uint64_t sim_trials = 100000, sim_seed = 0;
    unsigned sim_threads = 0;
    int sim_box = 3;
    sim->add_option("--config", sim_config, "wiretap config JSON")->required();
    sim->add_option("--trials", sim_trials, "number of trials");
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--threads", sim_threads, "worker threads (0 = auto)");
    sim->add_option("--box", sim_box, "half-width of the coarse-point box");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);   // prints help or the parse error
        return code == 0 ? 0 : 2;
    }

    try {
        if (gain->parsed()) {
            if (exact && numeric)
                throw CLI::ValidationError("--exact and --numeric are exclusive");
            return run_gain(gain_src, exact, range_db[0], range_db[1], gain_tol);
        }
        if (curve->parsed())
            return run_curve(curve_src, min_db, max_db, steps, curve_out);
        if (bound->parsed())
            return run_bound(n_min, n_max, n_step, asymptotic, bound_out);
        if (wiretap->parsed()) {
            if (op->parsed())
                return run_wiretap_op_point(
                    op_r, op_rs, gamma_from_flags(op_gamma, op_gamma_db, ogd->count() > 0));
            if (rate->parsed())
                return run_wiretap_rate(
                    rate_r, gamma_from_flags(rate_gamma, rate_gamma_db, rgd->count() > 0));
            if (sim->parsed())
                return run_wiretap_simulate(sim_config, sim_trials, sim_seed,
                                            sim_threads, sim_box);
        }
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const latsec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const latsec::ConversionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const latsec::PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return 1;
    } catch (const latsec::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
