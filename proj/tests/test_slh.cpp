#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qfilt/fock.hpp"
#include "qfilt/slh.hpp"

using namespace qfilt;
using slh::SLHTriple;

namespace {

SLHTriple random_triple(const FockSpace& space, int m, std::mt19937& gen) {
  std::normal_distribution<Real> dist;
  const int d = space.total_dim();
  auto rand_op = [&] {
    ComplexMatrix x(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = Complex{dist(gen), dist(gen)};
    }
    return x;
  };
  // Random unitary scattering from the QR of a Gaussian matrix.
  ComplexMatrix g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g(i, j) = Complex{dist(gen), dist(gen)};
  }
  const Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix s = qr.householderQ();

  std::vector<ComplexMatrix> couplings;
  for (int k = 0; k < m; ++k) couplings.push_back(rand_op());
  return SLHTriple{std::move(s), std::move(couplings), hermitize(rand_op()),
                   space};
}

Real triple_distance(const SLHTriple& a, const SLHTriple& b) {
  Real d = (a.scattering - b.scattering).cwiseAbs().maxCoeff();
  d = std::max(d, (a.hamiltonian - b.hamiltonian).cwiseAbs().maxCoeff());
  for (int k = 0; k < a.n_channels(); ++k) {
    d = std::max(d, (a.couplings[k] - b.couplings[k]).cwiseAbs().maxCoeff());
  }
  return d;
}

}  // namespace

TEST_CASE("beam splitter") {
  CHECK((slh::beam_splitter(0.0) - ComplexMatrix::Identity(2, 2)).norm() == 0.0);

  const Real r = std::sqrt(0.5);
  const ComplexMatrix s = slh::beam_splitter(r);
  CHECK(std::abs(s(0, 0) - Complex{std::sqrt(0.5), 0.0}) < 1e-15);
  CHECK(std::abs(s(0, 1) - Complex{0.0, std::sqrt(0.5)}) < 1e-15);

  const ComplexMatrix uu = s * s.adjoint();
  CHECK((uu - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS(slh::beam_splitter(1.5));
  CHECK_THROWS(slh::beam_splitter(-0.1));
}

TEST_CASE("concatenation stacks channels") {
  const FockSpace space(5);
  const Real gamma = 2.0;
  ComplexMatrix h = ComplexMatrix(number_operator(space, 0));
  SLHTriple cavity{ComplexMatrix::Identity(1, 1),
                   {std::sqrt(gamma) * annihilation(space, 0)},
                   h,
                   space};
  SLHTriple vac = slh::trivial_system(space, 1);

  const SLHTriple g = slh::concatenate(cavity, vac);
  CHECK(g.n_channels() == 2);
  CHECK((g.scattering - ComplexMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK((g.couplings[0] - cavity.couplings[0]).norm() == 0.0);
  CHECK(g.couplings[1].norm() == 0.0);
  CHECK((g.hamiltonian - h).norm() == 0.0);

  const SLHTriple both = slh::concatenate(slh::trivial_system(space, 1), vac);
  CHECK(both.n_channels() == 2);
  CHECK(both.hamiltonian.norm() == 0.0);
}

TEST_CASE("series against a passive splitter") {
  const FockSpace space(5);
  const Real gamma = 2.0;
  SLHTriple cavity{ComplexMatrix::Identity(1, 1),
                   {std::sqrt(gamma) * annihilation(space, 0)},
                   ComplexMatrix(number_operator(space, 0)),
                   space};
  const SLHTriple upstream = slh::concatenate(cavity, slh::trivial_system(space, 1));

  const ComplexMatrix s = slh::beam_splitter(std::sqrt(0.5));
  const int d = space.total_dim();
  SLHTriple splitter{s,
                     {ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d)},
                     ComplexMatrix::Zero(d, d),
                     space};

  const SLHTriple g = slh::series(splitter, upstream);
  g.validate();
  CHECK((g.scattering - s).cwiseAbs().maxCoeff() < 1e-14);
  for (int i = 0; i < 2; ++i) {
    const ComplexMatrix expected = s(i, 0) * upstream.couplings[0];
    CHECK((g.couplings[i] - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Passive downstream element leaves the Hamiltonian alone.
  CHECK((g.hamiltonian - upstream.hamiltonian).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("series with identity triple is the identity map") {
  std::mt19937 gen(3);
  const FockSpace space(4);
  const SLHTriple g = random_triple(space, 2, gen);
  const SLHTriple eye = slh::trivial_system(space, 2);
  CHECK(triple_distance(slh::series(eye, g), g) < 1e-12);
  CHECK(triple_distance(slh::series(g, eye), g) < 1e-12);
}

TEST_CASE("products preserve unitarity and hermiticity; series associates") {
  std::mt19937 gen(9);
  const FockSpace space(3);
  for (int rep = 0; rep < 10; ++rep) {
    const SLHTriple a = random_triple(space, 2, gen);
    const SLHTriple b = random_triple(space, 2, gen);
    const SLHTriple c = random_triple(space, 2, gen);
    const SLHTriple ab = slh::series(a, b);
    ab.validate();
    slh::concatenate(a, b).validate();
    CHECK(triple_distance(slh::series(slh::series(a, b), c),
                          slh::series(a, slh::series(b, c))) < 1e-9);
  }
  CHECK_THROWS(slh::series(random_triple(space, 2, gen),
                           random_triple(space, 1, gen)));
}
