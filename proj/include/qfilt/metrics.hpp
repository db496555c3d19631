#pragma once

#include <vector>

#include "qfilt/types.hpp"

namespace qfilt::harness {

/// Trajectory-error summary (1/T) sqrt(sum_k |est_k - ref_k|^2 dt) using
/// left-endpoint quadrature over the rows; rows span [0, T) at spacing
/// dt = T / rows.
Real mise(const RealMatrix& est, const RealMatrix& ref, Real T);

/// Per-time mean and standard deviation across a set of equally shaped
/// series (trials x [rows x cols] -> rows x cols each).
struct BandStats {
  RealMatrix mean;
  RealMatrix std;
};
BandStats bands(const std::vector<RealMatrix>& series);

}  // namespace qfilt::harness
