#include "qfilt/lindblad.hpp"

namespace qfilt {

ComplexMatrix lindblad_heisenberg(const ComplexMatrix& x,
                                  const ComplexMatrix& h,
                                  const std::vector<ComplexMatrix>& ls) {
  require_square(x, "lindblad_heisenberg");
  require_same_dim(x, h, "lindblad_heisenberg");
  ComplexMatrix out = -kI * (x * h - h * x);
  for (const auto& l : ls) {
    require_same_dim(x, l, "lindblad_heisenberg");
    const ComplexMatrix ldl = l.adjoint() * l;
    out += l.adjoint() * x * l - 0.5 * (ldl * x + x * ldl);
  }
  return out;
}

ComplexMatrix lindblad_schrodinger(const ComplexMatrix& rho,
                                   const ComplexMatrix& h,
                                   const std::vector<ComplexMatrix>& ls) {
  require_square(rho, "lindblad_schrodinger");
  require_same_dim(rho, h, "lindblad_schrodinger");
  ComplexMatrix out = -kI * (h * rho - rho * h);
  for (const auto& l : ls) {
    require_same_dim(rho, l, "lindblad_schrodinger");
    const ComplexMatrix ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

}  // namespace qfilt
