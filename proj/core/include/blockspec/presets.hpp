#pragma once

#include <string>

#include "blockspec/model.hpp"

namespace blockspec {

/// Built-in models:
///   toeplitz3 | toeplitz4 | toeplitz5  - symmetric block Toeplitz, unit taps
///   mp:<lambda>                        - single-block Gram matrix scaled so
///                                        the limit is Marchenko-Pastur(lambda);
///                                        lambda as "2", "1/2" or "0.5"
///   mimo:<K>,<L>,<ratio>               - banded ISI channel grid, K frames,
///                                        L taps, receive/transmit ratio 1 or 2
///                                        (ratio 2 is the square-block layout)
///   mimo-rect:<K>,<L>,<ratio>          - same channel with rectangular
///                                        receive blocks kept whole
AnySpec preset(const std::string& name);

/// Table of preset names for --help and error messages.
std::string preset_help();

}  // namespace blockspec
