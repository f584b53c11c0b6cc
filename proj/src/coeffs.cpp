#include "wavemix/coeffs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavemix {

RaggedField make_ragged(std::size_t levels, double fill) {
    RaggedField field(levels);
    for (std::size_t j = 0; j < levels; ++j) {
        field[j].assign(std::size_t{1} << j, fill);
    }
    return field;
}

bool congruent(const RaggedField& a, const RaggedField& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j].size() != b[j].size()) return false;
    }
    return true;
}

CoefficientTree CoefficientTree::zeros(std::size_t levels) {
    return CoefficientTree{0.0, make_ragged(levels)};
}

void CoefficientTree::validate() const {
    if (!std::isfinite(scaling)) {
        throw std::invalid_argument("coefficient tree: non-finite scaling coefficient");
    }
    for (std::size_t j = 0; j < details.size(); ++j) {
        const std::size_t want = std::size_t{1} << j;
        if (details[j].size() != want) {
            throw std::invalid_argument("coefficient tree: level " + std::to_string(j) +
                                        " has " + std::to_string(details[j].size()) +
                                        " entries, expected " + std::to_string(want));
        }
        for (double v : details[j]) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("coefficient tree: non-finite detail at level " +
                                            std::to_string(j));
            }
        }
    }
}

CoefficientTree mean_tree(std::span<const CoefficientTree> trees) {
    if (trees.empty()) {
        throw std::invalid_argument("mean_tree: no trees");
    }
    const std::size_t levels = trees.front().levels();
    CoefficientTree out = CoefficientTree::zeros(levels);
    for (const auto& t : trees) {
        if (t.levels() != levels) {
            throw std::invalid_argument("mean_tree: mismatched tree depths");
        }
        out.scaling += t.scaling;
        for (std::size_t j = 0; j < levels; ++j) {
            for (std::size_t k = 0; k < out.details[j].size(); ++k) {
                out.details[j][k] += t.details[j][k];
            }
        }
    }
    const double inv_n = 1.0 / static_cast<double>(trees.size());
    out.scaling *= inv_n;
    for (auto& level : out.details) {
        for (double& v : level) v *= inv_n;
    }
    return out;
}

}  // namespace wavemix
