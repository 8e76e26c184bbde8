#pragma once

#include <string>

#include "qens/ensemble.hpp"

namespace qens {

// Ensemble definition schema:
//   {
//     "type":   "iid" | "sequence" | "finite",
//     "states": [[[re, im], [re, im]], ...]   one amplitude pair per qubit state
//     "probs":  [p, ...]                      iid only, parallel to states
//     "pattern": [i, ...]                     sequence only, indices into states;
//                                             defaults to states in order
//     "counts": [c, ...]                      finite only, parallel to states
//     "n_total": N                            finite only, must equal sum(counts)
//   }
// Malformed documents raise std::invalid_argument with the offending field.
Ensemble parse_ensemble(const std::string& json_text);
Ensemble load_ensemble_file(const std::string& path);

// Debug form of an operator: {"dims": [...], "re": [[...]], "im": [[...]]}.
// Round-trips exactly; intended for test fixtures and inspection.
std::string to_debug_json(const DensityOperator& rho);
DensityOperator from_debug_json(const std::string& json_text);

}  // namespace qens
