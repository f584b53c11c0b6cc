// Python bindings for the core operations: transforms, shrinkage, threshold
// selection, estimators, test functions, simulation and MISE.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavemix/bench.hpp"
#include "wavemix/dwt.hpp"
#include "wavemix/estimator.hpp"
#include "wavemix/rng.hpp"
#include "wavemix/shrinkage.hpp"
#include "wavemix/simgen.hpp"
#include "wavemix/threshold.hpp"

namespace py = pybind11;
using wavemix::CoefficientTree;

namespace {

std::vector<double> to_vector(const py::array_t<double, py::array::c_style>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
    return std::vector<double>(a.data(), a.data() + a.shape(0));
}

py::array_t<double> to_array(const std::vector<double>& v) {
    // explicit strides: the count/shape-only constructors of this pybind11
    // version produce zero-stride arrays
    const std::vector<py::ssize_t> shape = {static_cast<py::ssize_t>(v.size())};
    const std::vector<py::ssize_t> strides = {static_cast<py::ssize_t>(sizeof(double))};
    return py::array_t<double>(shape, strides, v.data());
}

wavemix::estimator::CurvePanel to_panel(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d (N x M) array");
    wavemix::estimator::CurvePanel panel;
    panel.rows = static_cast<std::size_t>(a.shape(0));
    panel.cols = static_cast<std::size_t>(a.shape(1));
    panel.data.assign(a.data(), a.data() + panel.rows * panel.cols);
    panel.validate();
    return panel;
}

wavemix::threshold::ThresholdPolicy make_policy(const std::string& rule,
                                                const std::string& selector, double scale,
                                                std::size_t j0, double scad_a,
                                                const std::string& denominator) {
    wavemix::threshold::ThresholdPolicy p;
    p.rule.kind = wavemix::shrinkage::rule_by_name(rule);
    p.rule.scad_a = scad_a;
    p.selector = wavemix::threshold::selector_by_name(selector);
    p.scale = scale;
    p.j0 = j0;
    p.denominator = wavemix::threshold::denominator_by_name(denominator);
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wavelet mean-curve estimation for replicate curves";

    py::class_<CoefficientTree>(m, "CoefficientTree")
        .def(py::init([](double scaling, const std::vector<std::vector<double>>& details) {
                 CoefficientTree t{scaling, details};
                 t.validate();
                 return t;
             }),
             py::arg("scaling"), py::arg("details"))
        .def_readwrite("scaling", &CoefficientTree::scaling)
        .def_readwrite("details", &CoefficientTree::details)
        .def_property_readonly("levels", &CoefficientTree::levels)
        .def_property_readonly("signal_length", &CoefficientTree::signal_length);











    m.def(
        "forward",
        [](const py::array_t<double, py::array::c_style>& x, const std::string& filter) {
            return wavemix::dwt::forward(to_vector(x), wavemix::dwt::filter_by_name(filter));
        },
        py::arg("signal"), py::arg("filter") = "d2",
        "Orthonormal periodized DWT down to a single scaling coefficient.");

    m.def(
        "inverse",
        [](const CoefficientTree& tree, const std::string& filter) {
            return to_array(wavemix::dwt::inverse(tree, wavemix::dwt::filter_by_name(filter)));
        },
        py::arg("tree"), py::arg("filter") = "d2");

    m.def(
        "shrink",
        [](double d, double lam, const std::string& rule, double a) {
            return wavemix::shrinkage::apply({wavemix::shrinkage::rule_by_name(rule), a}, d, lam);
        },
        py::arg("d"), py::arg("lam"), py::arg("rule") = "scad", py::arg("a") = 3.7);

    m.def(
        "sure_criterion",
        [](double lam, const py::array_t<double, py::array::c_style>& standardized,
           const std::string& rule, double a) {
            const auto data = to_vector(standardized);
            return wavemix::threshold::sure_criterion(
                {wavemix::shrinkage::rule_by_name(rule), a}, lam, data);
        },
        py::arg("lam"), py::arg("standardized"), py::arg("rule") = "scad", py::arg("a") = 3.7);

    m.def(
        "sure_threshold",
        [](const py::array_t<double, py::array::c_style>& standardized, const std::string& rule,
           double cap, double a) {
            const auto data = to_vector(standardized);
            return wavemix::threshold::sure_threshold_level(
                data, {wavemix::shrinkage::rule_by_name(rule), a}, cap);
        },
        py::arg("standardized"), py::arg("rule"), py::arg("cap"), py::arg("a") = 3.7);

    m.def(
        "test_function",
        [](const std::string& name, std::size_t M) {
            return to_array(wavemix::simgen::sample(wavemix::simgen::function_by_name(name), M));
        },
        py::arg("name"), py::arg("M"),
        "Blocks, bumps, heavisine or doppler on the midpoint grid.");

    m.def(
        "simulate_panel",
        [](const std::string& fn, std::size_t M, std::size_t N, double snr, double tau,
           double eta, const std::string& mask, double p, double zero_tol,
           const std::string& snr_convention, std::uint64_t seed) {
            wavemix::simgen::SimulationConfig cfg;
            cfg.test_function = wavemix::simgen::function_by_name(fn);
            cfg.M = M;
            cfg.N = N;
            cfg.snr = snr;
            cfg.tau = tau;
            cfg.eta = eta;
            cfg.structure = wavemix::simgen::mask_by_name(mask);
            cfg.bernoulli_p = p;
            cfg.zero_tol = zero_tol;
            cfg.snr_convention = wavemix::simgen::snr_convention_by_name(snr_convention);
            cfg.seed = seed;
            cfg.validate();
            const auto filter = wavemix::simgen::designated_filter(cfg.test_function);
            const auto mu = wavemix::simgen::sample(cfg.test_function, M);
            const auto mu_tree = wavemix::dwt::forward(mu, filter);
            const auto noise = wavemix::simgen::calibrate(cfg, mu_tree);
            auto stream = wavemix::simgen::repetition_stream(cfg, 0);
            const auto trees = wavemix::simgen::generate_panel(cfg, noise, mu_tree, stream);

            py::array_t<double> panel({static_cast<py::ssize_t>(N), static_cast<py::ssize_t>(M)});
            auto view = panel.mutable_unchecked<2>();
            for (std::size_t i = 0; i < N; ++i) {
                const auto row = wavemix::dwt::inverse(trees[i], filter);
                for (std::size_t t = 0; t < M; ++t) view(i, t) = row[t];
            }
            return py::make_tuple(panel, to_array(mu));
        },
        py::arg("fn"), py::arg("M") = 1024, py::arg("N") = 100, py::arg("snr") = 5.0,
        py::arg("tau") = 1.0, py::arg("eta") = 1.5, py::arg("mask") = "zeros",
        py::arg("p") = 0.3, py::arg("zero_tol") = 1e-12, py::arg("snr_convention") = "sd",
        py::arg("seed") = 0,
        "Synthetic replicate panel and its truth; returns (panel, mu_true).");

    m.def(
        "denoise",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& panel,
           const std::string& filter, const std::string& rule, const std::string& selector,
           double scale, std::size_t j0, const std::string& variance, double scad_a,
           const std::string& denominator) {
            const auto cp = to_panel(panel);
            const auto f = wavemix::dwt::filter_by_name(filter);
            const auto policy = make_policy(rule, selector, scale, j0, scad_a, denominator);
            const auto mode = wavemix::estimator::variance_mode_by_name(variance);
            const auto r = wavemix::estimator::average_then_shrink(cp, f, policy, mode);

            py::dict out;
            out["mu_hat"] = to_array(r.mu_hat);
            out["scaling"] = r.tree_hat.scaling;
            out["details"] = r.tree_hat.details;
            out["thresholds"] = r.thresholds;
            out["variances"] = r.variances.sigma2;
            out["zero_variance_positions"] = r.diagnostics.zero_variance_positions;
            py::list levels;
            for (const auto& lv : r.diagnostics.levels) {
                py::dict d;
                d["level"] = lv.level;
                d["kept"] = lv.kept;
                d["killed"] = lv.killed;
                const char* branch = "untouched";
                if (lv.branch == wavemix::threshold::LevelBranch::Universal) branch = "universal";
                if (lv.branch == wavemix::threshold::LevelBranch::Sure) branch = "sure";
                d["branch"] = branch;
                levels.append(d);
            }
            out["levels"] = levels;
            return out;
        },
        py::arg("panel"), py::arg("filter") = "d2", py::arg("rule") = "scad",
        py::arg("selector") = "universal", py::arg("scale") = 1.0, py::arg("j0") = 3,
        py::arg("variance") = "het", py::arg("scad_a") = 3.7, py::arg("denominator") = "mn",
        "Average-then-shrink mean-curve estimate of an N x M replicate panel.");

    m.def(
        "shrink_then_average",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& panel,
           const std::string& filter, const std::string& rule, const std::string& selector,
           double scale, std::size_t j0, double scad_a, const std::string& denominator) {
            const auto cp = to_panel(panel);
            const auto r = wavemix::estimator::shrink_then_average(
                cp, wavemix::dwt::filter_by_name(filter),
                make_policy(rule, selector, scale, j0, scad_a, denominator));
            return to_array(r.mu_hat);
        },
        py::arg("panel"), py::arg("filter") = "d2", py::arg("rule") = "scad",
        py::arg("selector") = "universal", py::arg("scale") = 1.0, py::arg("j0") = 3,
        py::arg("scad_a") = 3.7, py::arg("denominator") = "mn");

    m.def(
        "pointwise_average",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& panel,
           const std::string& filter) {
            const auto r = wavemix::estimator::pointwise_average(
                to_panel(panel), wavemix::dwt::filter_by_name(filter));
            return to_array(r.mu_hat);
        },
        py::arg("panel"), py::arg("filter") = "d2");

    m.def(
        "mise",
        [](const py::array_t<double, py::array::c_style>& a,
           const py::array_t<double, py::array::c_style>& b) {
            return wavemix::bench::mise(to_vector(a), to_vector(b));
        },
        py::arg("mu_hat"), py::arg("mu_true"));
}
