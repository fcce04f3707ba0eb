#pragma once

#include <string>

#include "blockspec/model.hpp"

namespace blockspec {

/// Parses the JSON model description. Schema sketch:
///
///   { "kind": "square" | "rectangular" | "wishart",
///     "block_names": { "A": {"selfadjoint": true,
///                            "correlated_with": {"name": "B", "rho": 0.5}}, ... },
///     "d": 3, "grid": [[ {"name":"A","adjoint":false,"scale":1.0} | null, ...]],
///     "alpha": ["1/3","2/3"] or "sizes": [1,2],       // rectangular
///     "sigma": [{"i":1,"j":2,"k":2,"l":1,"re":1,"im":0}, ...],  // explicit
///     "r": 4, "s": 7, "row_sizes": [...], "col_sizes": [...] }  // wishart
///
/// Indices in "sigma" are 1-based. "grid" and "sigma" are alternatives.
AnySpec parse_spec(const std::string& json_text);
AnySpec load_spec_file(const std::string& path);

}  // namespace blockspec
