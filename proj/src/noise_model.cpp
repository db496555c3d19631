#include "qfilt/noise_model.hpp"

namespace qfilt::scenarios {

RealMatrix symplectic_form(int n_modes) {
  RealMatrix j = RealMatrix::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    j(2 * i, 2 * i + 1) = 1.0;
    j(2 * i + 1, 2 * i) = -1.0;
  }
  return j;
}

NoiseModel build_noise_model(const ComplexMatrix& coupling_coeffs,
                             const ComplexMatrix& scattering,
                             const std::vector<sme::DetectorKind>& kinds,
                             Real intensity_floor) {
  const Eigen::Index n = coupling_coeffs.rows();
  const Eigen::Index m = coupling_coeffs.cols();
  if (scattering.rows() != m || scattering.cols() != m ||
      static_cast<Eigen::Index>(kinds.size()) != m || n % 2 != 0) {
    throw DimensionError("build_noise_model: inconsistent shapes");
  }

  NoiseModel out;
  const RealMatrix J = symplectic_form(static_cast<int>(n) / 2);

  // Composite couplings after scattering: L_k = (C S^T)_k applied to x.
  const ComplexMatrix C = coupling_coeffs * scattering.transpose();

  // QSDE noise coefficients G = [x, L] S^* = i J C0 S^T S^*.
  out.G = kI * J.cast<Complex>() * coupling_coeffs * scattering.transpose() *
          scattering.conjugate();

  // Process covariance from dA dA^dag = dt.
  const ComplexMatrix q_raw = out.G.conjugate() * out.G.transpose();
  out.Q = 0.5 * (q_raw + q_raw.transpose()).real();

  // Homodyne noise rows are rows of S^*; counting rows carry the coupling
  // itself, evaluated at the estimate.
  const ComplexMatrix M = scattering.conjugate();
  const ComplexMatrix S_hom = (out.G.conjugate() * M.transpose());
  const ComplexMatrix V_cnt = (out.G.conjugate() * scattering.adjoint());
  const ComplexMatrix row_gram = scattering * scattering.adjoint();

  auto coupling_at = [C](const RealVector& x, Eigen::Index k) -> Complex {
    return (C.col(k).transpose() * x.cast<Complex>())(0);
  };

  out.h = [C, kinds, coupling_at, m](const RealVector& x) {
    RealVector h(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Complex lk = coupling_at(x, k);
      h(k) = (kinds[k] == sme::DetectorKind::Homodyne)
                 ? 2.0 * lk.real()            // L + L^dag
                 : std::norm(lk);             // intensity L^dag L
    }
    return h;
  };

  out.H = [C, kinds, coupling_at, m, n](const RealVector& x) {
    RealMatrix H(m, n);
    for (Eigen::Index k = 0; k < m; ++k) {
      if (kinds[k] == sme::DetectorKind::Homodyne) {
        H.row(k) = 2.0 * C.col(k).real().transpose();
      } else {
        const Complex lk = coupling_at(x, k);
        H.row(k) = 2.0 * (C.col(k).conjugate() * lk).real().transpose();
      }
    }
    return H;
  };

  out.R = [kinds, coupling_at, row_gram, m, intensity_floor](const RealVector& x) {
    RealMatrix R = RealMatrix::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = a; b < m; ++b) {
        const bool a_hom = kinds[a] == sme::DetectorKind::Homodyne;
        const bool b_hom = kinds[b] == sme::DetectorKind::Homodyne;
        Real v = 0.0;
        if (a_hom && b_hom) {
          v = row_gram(a, b).real();
        } else if (!a_hom && !b_hom) {
          v = (std::conj(coupling_at(x, a)) * coupling_at(x, b) * row_gram(a, b))
                  .real();
          if (a == b) {
            v = std::max(v, intensity_floor);
          }
        } else {
          const Eigen::Index cnt = a_hom ? b : a;
          v = (row_gram(a, b) * coupling_at(x, cnt)).real();
        }
        R(a, b) = v;
        R(b, a) = v;
      }
    }
    return R;
  };

  out.S = [kinds, coupling_at, S_hom, V_cnt, m, n](const RealVector& x) {
    RealMatrix S(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      if (kinds[k] == sme::DetectorKind::Homodyne) {
        S.col(k) = S_hom.col(k).real();
      } else {
        S.col(k) = (V_cnt.col(k) * coupling_at(x, k)).real();
      }
    }
    return S;
  };

  return out;
}

}  // namespace qfilt::scenarios
