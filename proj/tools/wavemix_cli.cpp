// wavemix: mean-curve estimation from replicate curves via wavelet-domain
// averaging and heteroscedastic thresholding.
//
// Subcommands: denoise (estimate from a panel CSV), simulate (synthetic
// panels), study (Monte-Carlo MISE studies from a JSON spec).
//
// Exit codes: 0 success, 2 malformed input data, 3 configuration errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavemix/bench.hpp"
#include "wavemix/estimator.hpp"
#include "wavemix/panel_io.hpp"
#include "wavemix/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

struct DenoiseArgs {
    std::string input;
    std::string outdir = ".";
    std::string filter = "d2";
    std::string rule = "scad";
    std::string selector = "universal";
    std::string variance = "het";
    std::string denominator = "mn";
    double scale = 1.0;
    double scad_a = 3.7;
    std::size_t j0 = 3;
    std::size_t crop_left = 0;
    std::size_t crop_right = 0;
};

struct SimulateArgs {
    std::string outdir = ".";
    std::string fn = "blocks";
    std::string mask = "zeros";
    std::string snr_convention = "sd";
    std::string filter;  // empty: the function's designated filter
    std::size_t M = 1024;
    std::size_t N = 100;
    double snr = 5.0;
    std::string tau = "1";
    double eta = 1.5;
    double p = 0.3;
    double zero_tol = 1e-12;
    std::uint64_t seed = 0;
};

struct StudyArgs {
    std::string spec_path;
    std::string outdir = ".";
    bool traces = false;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw wavemix::panel_io::InputError("cannot write '" + path.string() + "'");
    }
    return out;
}

double parse_tau_flag(const std::string& s) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("--tau expects a number or 'inf', got '" + s + "'");
}

wavemix::threshold::ThresholdPolicy make_policy(const std::string& rule,
                                                const std::string& selector, double scale,
                                                double scad_a, std::size_t j0,
                                                const std::string& denominator) {
    wavemix::threshold::ThresholdPolicy policy;
    policy.rule.kind = wavemix::shrinkage::rule_by_name(rule);
    policy.rule.scad_a = scad_a;
    policy.selector = wavemix::threshold::selector_by_name(selector);
    policy.scale = scale;
    policy.j0 = j0;
    policy.denominator = wavemix::threshold::denominator_by_name(denominator);
    return policy;
}

json policy_json(const wavemix::threshold::ThresholdPolicy& policy) {
    return json{
        {"rule", std::string(wavemix::shrinkage::name(policy.rule.kind))},
        {"scad_a", policy.rule.scad_a},
        {"selector", std::string(wavemix::threshold::name(policy.selector))},
        {"scale", policy.scale},
        {"j0", policy.j0},
        {"denominator", std::string(wavemix::threshold::name(policy.denominator))},
    };
}

int cmd_denoise(const DenoiseArgs& args) {
    auto rows = wavemix::panel_io::read_panel_file(args.input);
    if (args.crop_left + args.crop_right > 0) {
        for (auto& r : rows) {
            if (args.crop_left + args.crop_right >= r.size()) {
                throw std::invalid_argument("crop flags remove the entire row");
            }
            r.erase(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(args.crop_left));
            r.resize(r.size() - args.crop_right);
        }
    }
    const auto panel = wavemix::estimator::CurvePanel::from_rows(rows);

    const auto mode = wavemix::estimator::variance_mode_by_name(args.variance);
    if (mode == wavemix::estimator::VarianceMode::Heteroscedastic && panel.rows < 2) {
        throw std::invalid_argument(
            "heteroscedastic variances need at least 2 replicates; use --variance mad");
    }
    const auto filter = wavemix::dwt::filter_by_name(args.filter);
    const auto policy = make_policy(args.rule, args.selector, args.scale, args.scad_a, args.j0,
                                    args.denominator);

    const auto result = wavemix::estimator::average_then_shrink(panel, filter, policy, mode);

    fs::create_directories(args.outdir);
    {
        auto out = open_out(fs::path(args.outdir) / "mu_hat.csv");
        wavemix::panel_io::write_row_csv(out, result.mu_hat);
    }
    {
        auto out = open_out(fs::path(args.outdir) / "variances.csv");
        out << "j,k,sigma2\n";
        out << "-1,0," << wavemix::panel_io::format_double(result.variances.sigma2_c) << '\n';
        for (std::size_t j = 0; j < result.variances.sigma2.size(); ++j) {
            for (std::size_t k = 0; k < result.variances.sigma2[j].size(); ++k) {
                out << j << ',' << k << ','
                    << wavemix::panel_io::format_double(result.variances.sigma2[j][k]) << '\n';
            }
        }
    }
    {
        json report;
        report["version"] = 1;
        report["input"] = args.input;
        report["M"] = panel.cols;
        report["N"] = panel.rows;
        report["filter"] = args.filter;
        report["variance_mode"] = std::string(wavemix::estimator::name(mode));
        report["policy"] = policy_json(policy);
        json levels = json::array();
        for (const auto& lv : result.diagnostics.levels) {
            const char* branch = "untouched";
            if (lv.branch == wavemix::threshold::LevelBranch::Universal) branch = "universal";
            if (lv.branch == wavemix::threshold::LevelBranch::Sure) branch = "sure";
            levels.push_back(json{{"level", lv.level},
                                  {"kept", lv.kept},
                                  {"killed", lv.killed},
                                  {"branch", branch}});
        }
        report["diagnostics"] = {
            {"levels", levels},
            {"zero_variance_positions", result.diagnostics.zero_variance_positions},
        };
        auto out = open_out(fs::path(args.outdir) / "report.json");
        out << report.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const SimulateArgs& args) {
    wavemix::simgen::SimulationConfig cfg;
    cfg.test_function = wavemix::simgen::function_by_name(args.fn);
    cfg.M = args.M;
    cfg.N = args.N;
    cfg.snr = args.snr;
    cfg.tau = parse_tau_flag(args.tau);
    cfg.eta = args.eta;
    cfg.structure = wavemix::simgen::mask_by_name(args.mask);
    cfg.bernoulli_p = args.p;
    cfg.zero_tol = args.zero_tol;
    cfg.snr_convention = wavemix::simgen::snr_convention_by_name(args.snr_convention);
    cfg.seed = args.seed;
    cfg.validate();

    const auto filter = args.filter.empty()
                            ? wavemix::simgen::designated_filter(cfg.test_function)
                            : wavemix::dwt::filter_by_name(args.filter);
    const auto mu = wavemix::simgen::sample(cfg.test_function, cfg.M);
    const auto mu_tree = wavemix::dwt::forward(mu, filter);
    const auto noise = wavemix::simgen::calibrate(cfg, mu_tree);
    auto stream = wavemix::simgen::repetition_stream(cfg, 0);
    const auto trees = wavemix::simgen::generate_panel(cfg, noise, mu_tree, stream);

    fs::create_directories(args.outdir);
    {
        auto out = open_out(fs::path(args.outdir) / "panel.csv");
        for (const auto& t : trees) {
            wavemix::panel_io::write_row_csv(out, wavemix::dwt::inverse(t, filter));
        }
    }
    {
        auto out = open_out(fs::path(args.outdir) / "mu_true.csv");
        wavemix::panel_io::write_row_csv(out, mu);
    }
    return kExitOk;
}

int cmd_study(const StudyArgs& args) {
    std::ifstream in(args.spec_path);
    if (!in) {
        throw wavemix::panel_io::InputError("cannot open '" + args.spec_path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    auto spec = wavemix::bench::parse_study_spec(buf.str());
    if (args.traces) spec.traces = true;

    const auto report =
        wavemix::bench::run_study(spec.cells, spec.master_seed, spec.repetitions);

    // Full success before anything is written.
    fs::create_directories(args.outdir);
    {
        auto out = open_out(fs::path(args.outdir) / "report.csv");
        report.write_csv(out);
    }
    {
        auto out = open_out(fs::path(args.outdir) / "report.json");
        report.write_json(out);
    }
    if (spec.traces) {
        const fs::path dir = fs::path(args.outdir) / "traces";
        fs::create_directories(dir);
        for (std::size_t c = 0; c < report.cells.size(); ++c) {
            auto out = open_out(dir / ("cell_" + std::to_string(c) + ".csv"));
            out << "repetition,mise\n";
            for (std::size_t r = 0; r < report.cells[c].mise_per_rep.size(); ++r) {
                out << r << ','
                    << wavemix::panel_io::format_double(report.cells[c].mise_per_rep[r]) << '\n';
            }
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavemix: wavelet mean-curve estimation for replicate curves"};
    app.require_subcommand(1);

    DenoiseArgs dn;
    auto* denoise = app.add_subcommand("denoise", "estimate the mean curve from a panel CSV");
    denoise->add_option("input", dn.input, "panel CSV (one row per replicate)")->required();
    denoise->add_option("-o,--out", dn.outdir, "output directory (mu_hat.csv, variances.csv, report.json)");
    denoise->add_option("--filter", dn.filter, "wavelet filter: d1, d2, d5, d7");
    denoise->add_option("--rule", dn.rule, "shrinkage rule: hard, soft, scad");
    denoise->add_option("--selector", dn.selector, "threshold selector: universal, sure, hybrid");
    denoise->add_option("--scale", dn.scale, "multiplier on the universal threshold");
    denoise->add_option("--scad-a", dn.scad_a, "SCAD parameter a (> 2)");
    denoise->add_option("--j0", dn.j0, "first shrunk level");
    denoise->add_option("--variance", dn.variance, "variance mode: het, mad");
    denoise->add_option("--denominator", dn.denominator,
                        "universal threshold denominator: mn, m, m-model");
    denoise->add_option("--crop-left", dn.crop_left, "drop this many leading samples per row");
    denoise->add_option("--crop-right", dn.crop_right, "drop this many trailing samples per row");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic panel and its truth");
    simulate->add_option("-o,--out", sim.outdir, "output directory (panel.csv, mu_true.csv)");
    simulate->add_option("--fn", sim.fn, "test function: blocks, bumps, heavisine, doppler");
    simulate->add_option("--M", sim.M, "grid length (power of two)");
    simulate->add_option("--N", sim.N, "number of replicates");
    simulate->add_option("--snr", sim.snr, "signal-to-noise ratio (> 0)");
    simulate->add_option("--tau", sim.tau, "heteroscedasticity intensity (> 0, or 'inf')");
    simulate->add_option("--eta", sim.eta, "scale-wise decay exponent of the extra variance");
    simulate->add_option("--mask", sim.mask, "extra-variance mask: zeros, bernoulli, none");
    simulate->add_option("--p", sim.p, "Bernoulli mask probability");
    simulate->add_option("--zero-tol", sim.zero_tol, "|beta| below this counts as a zero coefficient");
    simulate->add_option("--snr-convention", sim.snr_convention, "sigma from SNR via: sd, rms");
    simulate->add_option("--filter", sim.filter, "wavelet filter (default: the function's designated one)");
    simulate->add_option("--seed", sim.seed, "RNG seed (same seed, same files)");

    StudyArgs st;
    auto* study = app.add_subcommand("study", "run a Monte-Carlo study from a JSON spec");
    study->add_option("spec", st.spec_path, "study spec JSON (version 1)")->required();
    study->add_option("-o,--out", st.outdir, "output directory (report.csv, report.json)");
    study->add_flag("--traces", st.traces, "also write per-repetition MISE traces");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(denoise)) return cmd_denoise(dn);
        if (app.got_subcommand(simulate)) return cmd_simulate(sim);
        if (app.got_subcommand(study)) return cmd_study(st);
    } catch (const wavemix::panel_io::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitConfig;
}
