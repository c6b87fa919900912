// f3c - evaluate, verify, sweep and fit Fano line shapes of three-level
// systems with one continuum.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "f3c/fit.hpp"
#include "f3c/io.hpp"
#include "f3c/lineshape.hpp"
#include "f3c/model.hpp"
#include "f3c/oracle.hpp"
#include "f3c/presets.hpp"

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0, hi = 0, step = 0;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw UsageError("--grid expects LO:HI:STEP");
    }
    try {
        lo = std::stod(text.substr(0, c1));
        hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        step = std::stod(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw UsageError("--grid expects numeric LO:HI:STEP");
    }
    if (!(step > 0.0)) throw UsageError("--grid STEP must be positive");
    if (hi < lo) throw UsageError("--grid HI must not be below LO");
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = lo + step * k;
    return grid;
}

std::pair<double, double> parse_span(const std::string& text) {
    const auto c = text.find(':');
    if (c == std::string::npos) throw UsageError("--span expects LO:HI");
    try {
        return {std::stod(text.substr(0, c)), std::stod(text.substr(c + 1))};
    } catch (const std::exception&) {
        throw UsageError("--span expects numeric LO:HI");
    }
}

std::string trim_number(double x) {
    std::ostringstream os;
    os << x;
    std::string s = os.str();
    for (char& ch : s) {
        if (ch == '.' || ch == '-' || ch == '+') ch = 'p';
    }
    return s;
}

int cmd_eval(const std::string& config_path, const std::string& grid_text,
             const std::string& out_path) {
    const auto grid = parse_grid(grid_text);
    const f3c::ConfigFile file = f3c::read_config(config_path);
    if (!file.params) {
        f3c::fail(f3c::ErrorCode::MalformedFile,
                  "config has no 'lineshape' section; eval needs q (and v_c where applicable)");
    }
    const f3c::SpectralCurve c = f3c::curve(file.config, *file.params, grid);
    f3c::write_curve(c, out_path);
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (double r : c.r) {
        if (std::isnan(r)) continue;
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    std::cout << "eval points=" << c.grid.size() << " gaps=" << c.gap_count << " min_R=" << rmin
              << " max_R=" << rmax << " out=" << out_path << "\n";
    return 0;
}

int cmd_probs(const std::string& config_path, const std::string& grid_text,
              const std::string& out_path) {
    const auto grid = parse_grid(grid_text);
    const f3c::ConfigFile file = f3c::read_config(config_path);
    const auto bounds = file.config.topo().bounds;
    std::ofstream out(out_path);
    if (!out) f3c::fail(f3c::ErrorCode::IoFailure, "cannot write " + out_path);
    out << "epsilon,p_" << bounds[0] << ",p_" << bounds[1] << "\n";
    for (double x : grid) {
        const auto p = f3c::bound_probabilities(file.config, x);
        out << f3c::format_double(x) << "," << f3c::format_double(p.at(bounds[0])) << ","
            << f3c::format_double(p.at(bounds[1])) << "\n";
    }
    std::cout << "probs points=" << grid.size() << " out=" << out_path << "\n";
    return 0;
}

int cmd_verify(const std::string& config_path, int samples, unsigned seed) {
    const f3c::ConfigFile file = f3c::read_config(config_path);
    const auto& config = file.config;
    const auto t = config.topo();
    const double e_lo = std::min(config.energy(t.bounds[0]), config.energy(t.bounds[1]));
    const double e_hi = std::max(config.energy(t.bounds[0]), config.energy(t.bounds[1]));
    double scale = std::max(1.0, e_hi - e_lo);
    for (const auto& [level, c] : config.couplings) scale = std::max(scale, c.gamma());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(e_lo - 20.0 * scale, e_hi + 20.0 * scale);
    double max_residual = 0.0;
    for (int k = 0; k < samples; ++k) {
        max_residual = std::max(max_residual, f3c::normalization_residual(config, u(rng)));
    }
    const bool pass = max_residual < 1e-10;
    std::cout << "verify max_residual=" << max_residual << " samples=" << samples
              << " seed=" << seed << " threshold=1e-10 status=" << (pass ? "pass" : "fail")
              << "\n";
    if (!pass) {
        std::cerr << "error: normalization residual " << max_residual << " exceeds 1e-10\n";
        return 1;
    }
    return 0;
}

int cmd_oracle(const std::string& config_path, int bins, const std::string& span_text,
               double tol, int points) {
    const f3c::ConfigFile file = f3c::read_config(config_path);
    const auto [lo, hi] = parse_span(span_text);
    f3c::DiscretizationSpec spec{lo, hi, bins};
    f3c::validate_spec(file.config, spec);
    // central 70% of the span, clear of the mandatory edge margin
    const double margin = 0.15 * spec.width();
    const auto grid = f3c::linspace(lo + margin, hi - margin, points);
    const f3c::CompareReport report = f3c::compare(file.config, spec, grid, tol);
    std::cout << "oracle bins=" << bins << " span=" << lo << ":" << hi << " "
              << report.summary() << "\n";
    if (!report.pass) {
        std::cerr << "error: oracle deviation " << report.max_rel << " exceeds tolerance " << tol
                  << "\n";
        return 1;
    }
    return 0;
}

int cmd_sweep(const std::string& name, const std::string& out_dir) {
    const auto curves = f3c::run_preset(name);
    fs::create_directories(out_dir);
    const f3c::Preset p = f3c::preset(name);
    for (std::size_t k = 0; k < curves.size(); ++k) {
        std::ostringstream file;
        file << name;
        for (const auto& [level, q] : curves[k].params.q) {
            file << "_q" << level << "-" << trim_number(q);
        }
        file << ".csv";
        const fs::path path = fs::path(out_dir) / file.str();
        f3c::write_curve(curves[k], path);
        std::cout << "sweep wrote " << path.string() << "\n";
    }
    std::cout << "sweep preset=" << name << " curves=" << curves.size()
              << " points=" << p.grid.size() << "\n";
    return 0;
}

int cmd_presets() {
    for (const auto& name : f3c::preset_names()) std::cout << name << "\n";
    return 0;
}

int cmd_fit(const std::string& data_path, const std::string& model, const std::string& init_path,
            const std::string& out_path) {
    const f3c::Spectrum spectrum = f3c::read_spectrum(data_path);
    const f3c::ConfigFile init = f3c::read_config(init_path);
    if (!init.params) {
        f3c::fail(f3c::ErrorCode::MalformedFile, "init config has no 'lineshape' section");
    }
    if (model != init.config.tag()) {
        f3c::fail(f3c::ErrorCode::MismatchedStructure,
                  "--model " + model + " does not match init config " + init.config.tag());
    }

    f3c::FitProblem problem;
    problem.config = init.config;
    problem.params = *init.params;

    std::ifstream in(init_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto tree = nlohmann::json::parse(buf.str());
    if (tree.contains("fit")) {
        const auto& ft = tree.at("fit");
        if (ft.contains("free")) problem.free = ft.at("free").get<std::vector<std::string>>();
        if (ft.contains("scale")) problem.scale = ft.at("scale").get<double>();
        if (ft.contains("baseline")) problem.baseline = ft.at("baseline").get<double>();
        if (ft.contains("starts")) problem.starts = ft.at("starts").get<int>();
        if (ft.contains("seed")) problem.seed = ft.at("seed").get<unsigned>();
        if (ft.contains("bounds")) {
            for (const auto& [key, lim] : ft.at("bounds").items()) {
                problem.bounds[key] = {lim.at(0).get<double>(), lim.at(1).get<double>()};
            }
        }
    }
    if (problem.free.empty()) {
        for (const auto& [level, q] : problem.params.q) {
            problem.free.push_back("q" + std::to_string(level));
        }
        for (const auto& [level, c] : problem.config.couplings) {
            problem.free.push_back("gamma" + std::to_string(level));
        }
        problem.free.push_back("scale");
        problem.free.push_back("baseline");
    }

    const f3c::FitResult result = f3c::solve(problem, spectrum);
    std::cout << "fit model=" << model << " converged=" << (result.converged ? "true" : "false")
              << " iterations=" << result.iterations << " residual_norm=" << result.residual_norm
              << "\n";
    for (std::size_t i = 0; i < result.names.size(); ++i) {
        const double se = std::sqrt(std::max(
            0.0, result.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))));
        std::cout << "fit param " << result.names[i] << " = "
                  << result.values[static_cast<Eigen::Index>(i)] << " +- " << se << "\n";
    }
    for (const auto& name : result.unidentifiable) {
        std::cout << "fit unidentifiable " << name << "\n";
    }
    if (!out_path.empty()) {
        f3c::ConfigFile fitted{result.config, result.params};
        f3c::write_config(fitted, out_path);
        std::cout << "fit wrote " << out_path << "\n";
    }
    if (!result.converged) {
        std::cerr << "error: NotConverged: fit stopped before reaching tolerance\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fano line shapes of three-level systems with one continuum"};
    app.require_subcommand(1);

    std::string config_path, grid_text = "-10:10:0.01", out_path, span_text = "-20:21";
    std::string preset_name, out_dir = ".", data_path, model_name, init_path, fit_out;
    int samples = 1000, bins = 2000, points = 401;
    unsigned seed = 0;
    double tol = 0.05;

    auto* eval = app.add_subcommand("eval", "evaluate a line-shape curve over a grid");
    eval->add_option("--config", config_path, "config file (JSON)")->required();
    eval->add_option("--grid", grid_text, "energy grid LO:HI:STEP (MHz), inclusive endpoints");
    eval->add_option("--out", out_path, "output curve file")->required();

    auto* probs = app.add_subcommand("probs", "evaluate bound-state probability densities");
    probs->add_option("--config", config_path, "config file (JSON)")->required();
    probs->add_option("--grid", grid_text, "energy grid LO:HI:STEP (MHz)");
    probs->add_option("--out", out_path, "output file")->required();

    auto* verify = app.add_subcommand("verify", "check the normalization identity at random energies");
    verify->add_option("--config", config_path, "config file (JSON)")->required();
    verify->add_option("--samples", samples, "number of random energies (default 1000)");
    verify->add_option("--seed", seed, "RNG seed (default 0)");

    auto* oracle = app.add_subcommand("oracle",
                                      "compare closed forms against discretized diagonalization");
    oracle->add_option("--config", config_path, "config file (JSON)")->required();
    oracle->add_option("--bins", bins, "continuum bins (default 2000)");
    oracle->add_option("--span", span_text, "continuum span LO:HI (MHz, default -20:21)");
    oracle->add_option("--tol", tol, "max relative deviation to accept (default 0.05)");
    oracle->add_option("--points", points, "comparison grid points (default 401)");

    auto* sweep = app.add_subcommand("sweep", "write all curves of a figure preset");
    sweep->add_option("--preset", preset_name, "preset name (see 'presets list')")->required();
    sweep->add_option("--out", out_dir, "output directory (default .)");

    auto* presets = app.add_subcommand("presets", "preset registry");
    std::string presets_action = "list";
    presets->add_option("action", presets_action, "list");

    auto* fit = app.add_subcommand("fit", "fit line-shape parameters to a measured spectrum");
    fit->add_option("--data", data_path, "spectrum file epsilon,value[,sigma]")->required();
    fit->add_option("--model", model_name, "configuration, e.g. lambda-upper")->required();
    fit->add_option("--init", init_path, "initial config file (JSON)")->required();
    fit->add_option("--out", fit_out, "write fitted config here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (eval->parsed()) return cmd_eval(config_path, grid_text, out_path);
        if (probs->parsed()) return cmd_probs(config_path, grid_text, out_path);
        if (verify->parsed()) return cmd_verify(config_path, samples, seed);
        if (oracle->parsed()) return cmd_oracle(config_path, bins, span_text, tol, points);
        if (sweep->parsed()) return cmd_sweep(preset_name, out_dir);
        if (presets->parsed()) {
            if (presets_action != "list") throw UsageError("presets supports only 'list'");
            return cmd_presets();
        }
        if (fit->parsed()) return cmd_fit(data_path, model_name, init_path, fit_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const f3c::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
