#include "qfilt/metrics.hpp"

#include <cmath>

namespace qfilt::harness {

Real mise(const RealMatrix& est, const RealMatrix& ref, Real T) {
  if (est.rows() != ref.rows() || est.cols() != ref.cols()) {
    throw DimensionError("mise: series shapes differ");
  }
  if (T <= 0.0 || est.rows() == 0) {
    throw std::invalid_argument("mise: need T > 0 and a nonempty series");
  }
  const Real dt = T / static_cast<Real>(est.rows());
  const Real sum_sq = (est - ref).squaredNorm() * dt;
  return std::sqrt(sum_sq) / T;
}

BandStats bands(const std::vector<RealMatrix>& series) {
  if (series.empty()) {
    throw std::invalid_argument("bands: no series");
  }
  RealMatrix mean = RealMatrix::Zero(series[0].rows(), series[0].cols());
  for (const auto& s : series) {
    if (s.rows() != mean.rows() || s.cols() != mean.cols()) {
      throw DimensionError("bands: series shapes differ");
    }
    mean += s;
  }
  mean /= static_cast<Real>(series.size());
  RealMatrix var = RealMatrix::Zero(mean.rows(), mean.cols());
  for (const auto& s : series) {
    var += (s - mean).cwiseAbs2();
  }
  var /= static_cast<Real>(series.size());
  return BandStats{std::move(mean), var.cwiseSqrt()};
}

}  // namespace qfilt::harness
