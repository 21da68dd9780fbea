#pragma once

#include <vector>

namespace pleg::fd {

/// Weights of the finite-difference approximation of the derivative of the
/// given order at `center`, on the nodes `offsets` (in units of the
/// spacing). Fornberg's recursion.
std::vector<double> fornberg_weights(double center,
                                     const std::vector<double>& offsets,
                                     int order);

/// Stencil for one output level of a derivative on levels 0..last.
struct Stencil {
  int first = 0;                // first level used
  std::vector<double> weights;  // already divided by spacing^order
};

/// Stencils of the requested accuracy order for every level 0..last.
/// Interior levels get centred stencils; levels near the ends get the
/// narrowest one-sided window with the same formal order.
std::vector<Stencil> plan_stencils(int last, double spacing, int order,
                                   int accuracy);

}  // namespace pleg::fd
