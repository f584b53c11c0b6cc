#include "wavemix/shrinkage.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavemix::shrinkage {

RuleKind rule_by_name(std::string_view name) {
    if (name == "hard") return RuleKind::Hard;
    if (name == "soft") return RuleKind::Soft;
    if (name == "scad") return RuleKind::Scad;
    throw std::invalid_argument("unknown shrinkage rule '" + std::string(name) +
                                "' (expected hard, soft or scad)");
}

std::string_view name(RuleKind kind) {
    switch (kind) {
        case RuleKind::Hard: return "hard";
        case RuleKind::Soft: return "soft";
        case RuleKind::Scad: return "scad";
    }
    return "?";
}

void ShrinkageRule::validate() const {
    if (kind == RuleKind::Scad && !(scad_a > 2.0)) {
        throw std::invalid_argument("scad: parameter a must be > 2");
    }
}

double apply(const ShrinkageRule& rule, double d, double lambda) {
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("shrinkage: lambda must be >= 0");
    }
    const double ad = std::abs(d);
    const double sgn = (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    switch (rule.kind) {
        case RuleKind::Hard:
            return ad > lambda ? d : 0.0;
        case RuleKind::Soft:
            return ad > lambda ? sgn * (ad - lambda) : 0.0;
        case RuleKind::Scad: {
            rule.validate();
            const double a = rule.scad_a;
            if (ad <= 2.0 * lambda) return ad > lambda ? sgn * (ad - lambda) : 0.0;
            if (ad <= a * lambda) return ((a - 1.0) * d - a * lambda * sgn) / (a - 2.0);
            return d;
        }
    }
    return 0.0;
}

CoefficientTree apply_vector(const ShrinkageRule& rule, const CoefficientTree& tree,
                             const RaggedField& lambdas, std::size_t j0) {
    rule.validate();
    if (j0 > tree.levels()) {
        throw std::invalid_argument("apply_vector: j0 exceeds the tree depth");
    }
    if (lambdas.size() != tree.levels()) {
        throw std::invalid_argument("apply_vector: threshold field depth mismatch");
    }
    CoefficientTree out = tree;
    for (std::size_t j = j0; j < tree.levels(); ++j) {
        if (lambdas[j].size() != tree.details[j].size()) {
            throw std::invalid_argument("apply_vector: missing thresholds at level " +
                                        std::to_string(j));
        }
        for (std::size_t k = 0; k < out.details[j].size(); ++k) {
            out.details[j][k] = apply(rule, tree.details[j][k], lambdas[j][k]);
        }
    }
    return out;
}

}  // namespace wavemix::shrinkage
