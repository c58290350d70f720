#pragma once

#include <string>
#include <string_view>

#include "ruleagg/model.hpp"

namespace ruleagg {

// Deterministic one-line form, e.g.
//   good → credit_history=critical/other existing credit (conf=1.000, sup=12, ante=12)
// Items on each side are joined by " ∧ " in canonical item order.
std::string canonical_render(const AssociationRule& rule, const FeatureSchema& schema);

// Inverse of canonical_render. Confidence is recomputed from the counts, so
// parse_rule(canonical_render(r)) == r for rules built from counts.
AssociationRule parse_rule(std::string_view text, const FeatureSchema& schema);

}  // namespace ruleagg
