#pragma once

#include <string_view>

#include "wavemix/coeffs.hpp"

namespace wavemix::shrinkage {

enum class RuleKind { Hard, Soft, Scad };

RuleKind rule_by_name(std::string_view name);
std::string_view name(RuleKind kind);

struct ShrinkageRule {
    RuleKind kind = RuleKind::Scad;
    double scad_a = 3.7;  // must be > 2

    void validate() const;
};

/// Pointwise shrinkage delta(d, lambda) for lambda >= 0.
///   hard: d * 1{|d| > lambda}
///   soft: sign(d) (|d| - lambda)+
///   scad: soft for |d| <= 2 lambda, ((a-1)d - a lambda sign d)/(a-2) for
///         2 lambda < |d| <= a lambda, identity beyond.
double apply(const ShrinkageRule& rule, double d, double lambda);

/// Shrinks levels j >= j0 elementwise with per-position thresholds; the
/// scaling coefficient and levels below j0 pass through untouched.
/// `lambdas` must cover every level j >= j0 with the exact level size.
CoefficientTree apply_vector(const ShrinkageRule& rule, const CoefficientTree& tree,
                             const RaggedField& lambdas, std::size_t j0);

}  // namespace wavemix::shrinkage
