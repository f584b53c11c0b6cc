#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wavemix/estimator.hpp"
#include "wavemix/simgen.hpp"
#include "wavemix/threshold.hpp"

namespace wavemix::bench {

/// Grid Riemann approximation of the integrated squared error,
/// (1/M) sum (mu_hat - mu)^2.
double mise(std::span<const double> mu_hat, std::span<const double> mu_true);

struct StudyCell {
    simgen::SimulationConfig config;
    threshold::ThresholdPolicy policy;
    estimator::VarianceMode variance_mode = estimator::VarianceMode::Heteroscedastic;

    std::string id() const;  // stable identity used in reports and errors
};

struct CellReport {
    StudyCell cell;
    std::vector<double> mise_per_rep;
    double mean_mise = 0.0;
    double sd_mise = 0.0;
    double wall_ms = 0.0;
};

struct StudyReport {
    std::uint64_t master_seed = 0;
    std::size_t repetitions = 0;
    std::vector<CellReport> cells;

    void write_csv(std::ostream& out) const;   // deterministic bytes
    void write_json(std::ostream& out) const;  // includes wall times
};

/// Reads WAVEMIX_THREADS; 0 means "use hardware_concurrency".
unsigned thread_cap_from_env(unsigned requested = 0);

/// Runs every cell for `repetitions` repetitions. Each cell's RNG is seeded
/// from (master_seed, cell index); each repetition from its own substream, so
/// the report is identical for any thread count. Simulation uses each cell's
/// function-designated filter, as does estimation. A failing cell aborts the
/// study with its identity in the error message.
StudyReport run_study(std::span<const StudyCell> cells, std::uint64_t master_seed,
                      std::size_t repetitions, unsigned threads = 0);

/// Parsed "version 1" study specification (see cmd_study): the cell grid is
/// the cross product of functions x snr x tau x N x policies x variance modes.
struct StudySpec {
    std::uint64_t master_seed = 0;
    std::size_t repetitions = 0;
    bool traces = false;
    std::vector<StudyCell> cells;
};

StudySpec parse_study_spec(const std::string& json_text);

}  // namespace wavemix::bench
