#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bevclust/geometry.hpp"

namespace bevclust {

struct SplitParams {
  double ref_length = 0.0;  // class reference box, meters
  double ref_width = 0.0;
  double margin = 0.30;     // proportional enlargement of the reference box
  double epsilon = 1e-3;    // dichotomy floor, meters
  std::size_t k = 32;       // neighbor count used when re-clustering
};

/// True when the minimum-area box of the points fits inside the reference box
/// enlarged by the margin. Both boxes are compared side-by-side after sorting
/// their sides in descending order, so orientation does not matter. Throws
/// ContractViolation on empty input.
bool fits_in_reference(std::span<const Point2> points, const SplitParams& params);

/// One subset of a split cluster. `fits` is false only for subsets the
/// dichotomy could not break apart at the epsilon floor (or at the recursion
/// depth cap); callers may surface those in debug output.
struct SplitPiece {
  std::vector<std::uint32_t> indices;  // into the input point sequence
  bool fits = true;
};

/// Recursively splits a cluster that does not fit the margin-enlarged
/// reference box, via binary search on the clustering threshold: halve t, then
/// walk it by halving steps until re-clustering yields exactly two components,
/// and recurse into each. When the step drops below epsilon the current
/// component list is accepted: its members are recursed if there are several,
/// otherwise the cluster is returned unsplit and flagged. The returned subsets
/// are non-empty and partition the input. The initial t is the class threshold
/// the cluster was produced at.
std::vector<SplitPiece> split_cluster(std::span<const Point2> points, const SplitParams& params,
                                      double t);

}  // namespace bevclust
