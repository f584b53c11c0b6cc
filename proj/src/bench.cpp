#include "wavemix/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "wavemix/panel_io.hpp"

namespace wavemix::bench {

namespace {

using json = nlohmann::json;

struct CellSetup {
    std::vector<double> mu;
    CoefficientTree mu_tree;
    simgen::NoiseModel noise;
    dwt::WaveletFilter filter;
};

double run_repetition(const StudyCell& cell, const CellSetup& setup, std::size_t rep) {
    auto stream = simgen::repetition_stream(cell.config, rep);
    const auto trees = simgen::generate_panel(cell.config, setup.noise, setup.mu_tree, stream);

    std::vector<std::vector<double>> rows;
    rows.reserve(trees.size());
    for (const auto& t : trees) rows.push_back(dwt::inverse(t, setup.filter));
    const auto panel = estimator::CurvePanel::from_rows(rows);

    const auto est =
        estimator::average_then_shrink(panel, setup.filter, cell.policy, cell.variance_mode);
    return mise(est.mu_hat, setup.mu);
}

}  // namespace

double mise(std::span<const double> mu_hat, std::span<const double> mu_true) {
    if (mu_hat.size() != mu_true.size()) {
        throw std::invalid_argument("mise: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_hat.size(); ++i) {
        const double d = mu_hat[i] - mu_true[i];
        acc += d * d;
    }
    return acc / static_cast<double>(mu_hat.size());
}

std::string StudyCell::id() const {
    std::ostringstream out;
    out << simgen::name(config.test_function) << "/M" << config.M << "/N" << config.N << "/snr"
        << panel_io::format_double(config.snr) << "/tau" << panel_io::format_double(config.tau)
        << "/" << simgen::name(config.structure);
    if (config.structure == simgen::MaskLaw::Bernoulli) {
        out << "/p" << panel_io::format_double(config.bernoulli_p);
    }
    out << "/" << shrinkage::name(policy.rule.kind) << "/" << threshold::name(policy.selector)
        << "/s" << panel_io::format_double(policy.scale) << "/j0-" << policy.j0 << "/"
        << threshold::name(policy.denominator) << "/" << estimator::name(variance_mode);
    return out.str();
}

unsigned thread_cap_from_env(unsigned requested) {
    unsigned threads = requested != 0 ? requested : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (const char* env = std::getenv("WAVEMIX_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < threads) {
            threads = static_cast<unsigned>(cap);
        }
    }
    return threads;
}

StudyReport run_study(std::span<const StudyCell> cells, std::uint64_t master_seed,
                      std::size_t repetitions, unsigned threads) {
    if (cells.empty()) {
        throw std::invalid_argument("run_study: empty cell grid");
    }
    if (repetitions < 1) {
        throw std::invalid_argument("run_study: repetitions must be >= 1");
    }

    StudyReport report;
    report.master_seed = master_seed;
    report.repetitions = repetitions;
    report.cells.resize(cells.size());

    // Sequential setup: cell seeds, truth curves, frozen noise structures.
    std::vector<CellSetup> setups(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto& cr = report.cells[c];
        cr.cell = cells[c];
        cr.cell.config.seed = rng::derive_seed(master_seed, {c});
        cr.cell.config.repetitions = repetitions;
        cr.mise_per_rep.assign(repetitions, 0.0);
        try {
            auto& setup = setups[c];
            setup.filter = simgen::designated_filter(cr.cell.config.test_function);
            setup.mu = simgen::sample(cr.cell.config.test_function, cr.cell.config.M);
            setup.mu_tree = dwt::forward(setup.mu, setup.filter);
            setup.noise = simgen::calibrate(cr.cell.config, setup.mu_tree);
            cr.cell.policy.validate(setup.mu_tree.levels());
        } catch (const std::exception& e) {
            throw std::runtime_error("study cell '" + cr.cell.id() + "': " + e.what());
        }
    }

    const std::size_t total = cells.size() * repetitions;
    const unsigned workers =
        std::min<unsigned>(thread_cap_from_env(threads), static_cast<unsigned>(total));

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::string first_error;
    std::vector<std::vector<double>> rep_ms(cells.size(),
                                            std::vector<double>(repetitions, 0.0));

    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= total) return;
            const std::size_t c = task / repetitions;
            const std::size_t r = task % repetitions;
            try {
                const auto start = std::chrono::steady_clock::now();
                report.cells[c].mise_per_rep[r] = run_repetition(report.cells[c].cell, setups[c], r);
                const auto stop = std::chrono::steady_clock::now();
                rep_ms[c][r] = std::chrono::duration<double, std::milli>(stop - start).count();
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty()) {
                    first_error = "study cell '" + report.cells[c].cell.id() + "': " + e.what();
                }
                next.store(total);  // drain remaining tasks
                return;
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (!first_error.empty()) {
        throw std::runtime_error(first_error);
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto& cr = report.cells[c];
        double mean = 0.0;
        for (double v : cr.mise_per_rep) mean += v;
        mean /= static_cast<double>(repetitions);
        double var = 0.0;
        for (double v : cr.mise_per_rep) var += (v - mean) * (v - mean);
        cr.mean_mise = mean;
        cr.sd_mise = repetitions > 1
                         ? std::sqrt(var / static_cast<double>(repetitions - 1))
                         : 0.0;
        for (double ms : rep_ms[c]) cr.wall_ms += ms;
    }
    return report;
}

void StudyReport::write_csv(std::ostream& out) const {
    out << "function,M,N,snr,tau,eta,mask,p,zero_tol,snr_convention,rule,selector,scale,j0,"
           "denominator,variance,repetitions,mean_mise,sd_mise\n";
    for (const auto& cr : cells) {
        const auto& cfg = cr.cell.config;
        const auto& pol = cr.cell.policy;
        out << simgen::name(cfg.test_function) << ',' << cfg.M << ',' << cfg.N << ','
            << panel_io::format_double(cfg.snr) << ',' << panel_io::format_double(cfg.tau) << ','
            << panel_io::format_double(cfg.eta) << ',' << simgen::name(cfg.structure) << ','
            << panel_io::format_double(cfg.bernoulli_p) << ','
            << panel_io::format_double(cfg.zero_tol) << ',' << simgen::name(cfg.snr_convention)
            << ',' << shrinkage::name(pol.rule.kind) << ',' << threshold::name(pol.selector) << ','
            << panel_io::format_double(pol.scale) << ',' << pol.j0 << ','
            << threshold::name(pol.denominator) << ',' << estimator::name(cr.cell.variance_mode)
            << ',' << cr.mise_per_rep.size() << ',' << panel_io::format_double(cr.mean_mise)
            << ',' << panel_io::format_double(cr.sd_mise) << '\n';
    }
}

void StudyReport::write_json(std::ostream& out) const {
    json doc;
    doc["version"] = 1;
    doc["master_seed"] = master_seed;
    doc["repetitions"] = repetitions;
    doc["cells"] = json::array();
    for (const auto& cr : cells) {
        const auto& cfg = cr.cell.config;
        const auto& pol = cr.cell.policy;
        json c;
        c["id"] = cr.cell.id();
        c["config"] = {
            {"function", std::string(simgen::name(cfg.test_function))},
            {"M", cfg.M},
            {"N", cfg.N},
            {"snr", cfg.snr},
            {"tau", std::isfinite(cfg.tau) ? json(cfg.tau) : json("inf")},
            {"eta", cfg.eta},
            {"mask", std::string(simgen::name(cfg.structure))},
            {"p", cfg.bernoulli_p},
            {"zero_tol", cfg.zero_tol},
            {"snr_convention", std::string(simgen::name(cfg.snr_convention))},
            {"seed", cfg.seed},
        };
        c["policy"] = {
            {"rule", std::string(shrinkage::name(pol.rule.kind))},
            {"scad_a", pol.rule.scad_a},
            {"selector", std::string(threshold::name(pol.selector))},
            {"scale", pol.scale},
            {"j0", pol.j0},
            {"denominator", std::string(threshold::name(pol.denominator))},
        };
        c["variance"] = std::string(estimator::name(cr.cell.variance_mode));
        c["mean_mise"] = cr.mean_mise;
        c["sd_mise"] = cr.sd_mise;
        c["mise"] = cr.mise_per_rep;
        c["wall_ms"] = cr.wall_ms;
        doc["cells"].push_back(std::move(c));
    }
    out << doc.dump(2) << '\n';
}

namespace {

[[noreturn]] void spec_error(const std::string& what) {
    throw std::invalid_argument("study spec: " + what);
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        spec_error(std::string("field '") + key + "' has the wrong type");
    }
}

double parse_tau(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        spec_error("tau must be a number or \"inf\"");
    }
    return j.get<double>();
}

}  // namespace

StudySpec parse_study_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        spec_error(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.contains("version") || doc["version"] != 1) {
        spec_error("field 'version' must be 1");
    }
    for (const char* key : {"master_seed", "repetitions", "M", "functions", "snr", "tau",
                            "policies", "variance_modes"}) {
        if (!doc.contains(key)) spec_error(std::string("missing field '") + key + "'");
    }

    StudySpec spec;
    spec.master_seed = doc["master_seed"].get<std::uint64_t>();
    spec.repetitions = doc["repetitions"].get<std::size_t>();
    spec.traces = field_or(doc, "traces", false);
    if (spec.repetitions < 1) spec_error("'repetitions' must be >= 1");

    simgen::SimulationConfig base;
    base.M = doc["M"].get<std::size_t>();
    base.eta = field_or(doc, "eta", 1.5);
    base.bernoulli_p = field_or(doc, "p", 0.3);
    base.zero_tol = field_or(doc, "zero_tol", 1e-12);
    base.structure = simgen::mask_by_name(field_or<std::string>(doc, "mask", "zeros"));
    base.snr_convention =
        simgen::snr_convention_by_name(field_or<std::string>(doc, "snr_convention", "sd"));
    base.repetitions = spec.repetitions;

    std::vector<std::size_t> ns;
    if (!doc.contains("N")) {
        spec_error("missing field 'N'");
    } else if (doc["N"].is_array()) {
        for (const auto& v : doc["N"]) ns.push_back(v.get<std::size_t>());
    } else {
        ns.push_back(doc["N"].get<std::size_t>());
    }

    std::vector<threshold::ThresholdPolicy> policies;
    for (const auto& p : doc["policies"]) {
        threshold::ThresholdPolicy pol;
        if (!p.contains("rule")) spec_error("policy missing field 'rule'");
        if (!p.contains("selector")) spec_error("policy missing field 'selector'");
        pol.rule.kind = shrinkage::rule_by_name(p["rule"].get<std::string>());
        pol.rule.scad_a = field_or(p, "scad_a", 3.7);
        pol.selector = threshold::selector_by_name(p["selector"].get<std::string>());
        pol.scale = field_or(p, "scale", 1.0);
        pol.j0 = field_or<std::size_t>(p, "j0", 3);
        pol.denominator =
            threshold::denominator_by_name(field_or<std::string>(p, "denominator", "mn"));
        policies.push_back(pol);
    }

    std::vector<estimator::VarianceMode> modes;
    for (const auto& v : doc["variance_modes"]) {
        modes.push_back(estimator::variance_mode_by_name(v.get<std::string>()));
    }

    for (const auto& f : doc["functions"]) {
        const auto fn = simgen::function_by_name(f.get<std::string>());
        for (const auto& s : doc["snr"]) {
            for (const auto& t : doc["tau"]) {
                for (std::size_t n : ns) {
                    for (const auto& pol : policies) {
                        for (const auto mode : modes) {
                            StudyCell cell;
                            cell.config = base;
                            cell.config.test_function = fn;
                            cell.config.snr = s.get<double>();
                            cell.config.tau = parse_tau(t);
                            cell.config.N = n;
                            cell.policy = pol;
                            cell.variance_mode = mode;
                            cell.config.validate();
                            spec.cells.push_back(std::move(cell));
                        }
                    }
                }
            }
        }
    }
    if (spec.cells.empty()) {
        spec_error("the cell grid is empty");
    }
    return spec;
}

}  // namespace wavemix::bench
