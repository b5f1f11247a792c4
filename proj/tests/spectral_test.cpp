#include <cmath>

#include <gtest/gtest.h>

#include "rtk/example1.hpp"
#include "support.hpp"

namespace rtk {
namespace {

using testing::diff;
using testing::Gen;
using testing::kCases;
using testing::max_abs;

std::vector<Complex> matrix_eigenvalues(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> eig(m, false);
  return {eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size()};
}

std::vector<Complex> pairwise_products(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> out;
  for (const Complex& x : a) {
    for (const Complex& y : b) out.push_back(x * y);
  }
  return out;
}

PairedTensor random_hamiltonian(Gen& g, const Dims& d) {
  return hamiltonian_assemble({g.square(d), g.hermitian(d), g.hermitian(d)});
}

TEST(UEigenvalues, DiagonalTensor) {
  const Dims d{2, 3};
  CMatrix m = CMatrix::Zero(6, 6);
  std::vector<Complex> want;
  for (Index k = 0; k < 6; ++k) {
    m(k, k) = Complex(-1.0 * k, 0.5 * k);
    want.push_back(m(k, k));
  }
  const auto ev = u_eigenvalues(PairedTensor(Shape::square(d), m));
  EXPECT_LE(multiset_distance(ev, want), 1e-14);
  for (std::size_t k = 1; k < ev.size(); ++k) EXPECT_GE(ev[k - 1].real(), ev[k].real());
  EXPECT_FALSE(is_stable(ev));
  EXPECT_TRUE(is_stable(PairedTensor(Shape::square(d), m - CMatrix::Identity(6, 6))));
}

TEST(UEigenvalues, ExampleClosedLoop) {
  const ArteProblem p = example1::problem();
  const ArteReport r = arte_schur_solve(p);
  const auto ev = u_eigenvalues(p.A - p.G * r.E);
  EXPECT_LE(multiset_distance(ev, example1::reference_closed_loop()), 1e-3);
  EXPECT_TRUE(is_stable(ev));
}

TEST(UEigenvalues, RankOneProducts) {
  Gen g(61);
  for (int c = 0; c < kCases; ++c) {
    const Index n1 = g.pick(1, 3), n2 = g.pick(1, 3);
    const CMatrix f1 = g.matrix(n1, n1), f2 = g.matrix(n2, n2);
    const auto want = pairwise_products(matrix_eigenvalues(f1), matrix_eigenvalues(f2));
    ASSERT_LE(multiset_distance(u_eigenvalues(outer({f1, f2})), want), 1e-9);
  }
}

TEST(MultisetDistance, SizesAndMatching) {
  EXPECT_EQ(multiset_distance({1.0, 2.0}, {2.0, 1.0}), 0.0);
  EXPECT_TRUE(std::isinf(multiset_distance({1.0}, {1.0, 2.0})));
  EXPECT_NEAR(multiset_distance({Complex(0, 1), Complex(0, -1)}, {Complex(0, -1.1), Complex(0, 1)}), 0.1, 1e-15);
}

TEST(TensorSchur, UpperTriangularInput) {
  Gen g(62);
  const CMatrix t = g.matrix(4, 4).triangularView<Eigen::Upper>();
  const PairedTensor a(Shape::square({2, 2}), t);
  const TensorSchur s = tensor_schur(a);
  EXPECT_LE(diff(s.Q * s.T * conj_transpose(s.Q), a), 1e-12);
}

TEST(TensorSchur, ReconstructionAndTriangularity) {
  Gen g(63);
  for (int c = 0; c < kCases; ++c) {
    const Dims d = g.dims(2, 3);
    const PairedTensor a = g.square(d);
    const TensorSchur s = tensor_schur(a);
    const double scale = frobenius_norm(a);
    ASSERT_LE(frobenius_norm(s.Q * s.T * conj_transpose(s.Q) - a), 1e-10 * scale);
    ASSERT_LE(diff(conj_transpose(s.Q) * s.Q, PairedTensor::Identity(d)), 1e-12);
    ASSERT_EQ(max_abs(CMatrix(s.T.unfolding().triangularView<Eigen::StrictlyLower>())), 0.0);
    ASSERT_LE(multiset_distance(s.eigenvalues, u_eigenvalues(a)), 1e-9 * scale);
  }
}

TEST(TensorSchur, KroneckerDiagonalIsProducts) {
  Gen g(64);
  for (int c = 0; c < kCases; ++c) {
    const PairedTensor b = g.square({2, 1}), cc = g.square({1, 2});
    const TensorSchur sb = tensor_schur(b), sc = tensor_schur(cc), sk = tensor_schur(kron(b, cc));
    std::vector<Complex> diag;
    for (Index k = 0; k < 4; ++k) diag.push_back(sk.T.unfolding()(k, k));
    std::vector<Complex> db, dc;
    for (Index k = 0; k < 2; ++k) {
      db.push_back(sb.T.unfolding()(k, k));
      dc.push_back(sc.T.unfolding()(k, k));
    }
    ASSERT_LE(multiset_distance(diag, pairwise_products(db, dc)), 1e-9);
  }
}

TEST(TensorSvd, IdentityAndUnitaryRankOne) {
  for (double s : tensor_svd(PairedTensor::Identity({2, 3})).singular_values) EXPECT_NEAR(s, 1.0, 1e-14);
  Gen g(65);
  const CMatrix u1 = Eigen::HouseholderQR<CMatrix>(g.matrix(3, 3)).householderQ();
  const CMatrix u2 = Eigen::HouseholderQR<CMatrix>(g.matrix(2, 2)).householderQ();
  for (double s : tensor_svd(outer({u1, u2})).singular_values) EXPECT_NEAR(s, 1.0, 1e-13);
}

TEST(TensorSvd, ReconstructionAndSpectralNorm) {
  Gen g(66);
  for (int c = 0; c < kCases; ++c) {
    const PairedTensor a = g.paired(Shape({2, 3}, {2, 2}));
    const TensorSvd s = tensor_svd(a);
    const double scale = frobenius_norm(a);
    ASSERT_LE(frobenius_norm(s.U * s.D * conj_transpose(s.V) - a), 1e-10 * scale);
    // Oracle: sqrt of the largest eigenvalue of A^H A.
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a.unfolding().adjoint() * a.unfolding());
    const double sigma = std::sqrt(eig.eigenvalues().maxCoeff());
    ASSERT_NEAR(s.singular_values.front(), sigma, 1e-10 * sigma);
    ASSERT_NEAR(spectral_norm(a), sigma, 1e-10 * sigma);
    for (std::size_t k = 1; k < s.singular_values.size(); ++k) ASSERT_GE(s.singular_values[k - 1], s.singular_values[k]);
  }
}

TEST(Rayleigh, IdentityAndDiagonal) {
  Gen g(67);
  const EigenPair id = rayleigh_quotient_extreme(PairedTensor::Identity({2, 2}), Extreme::kSmallest, g.plain({2, 2}));
  EXPECT_NEAR(id.eigenvalue, 1.0, 1e-14);

  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 2.0;
  m(2, 2) = 3.0;
  const PairedTensor d(Shape::square({3}), m);
  EXPECT_NEAR(rayleigh_quotient_extreme(d, Extreme::kLargest).eigenvalue, 3.0, 1e-12);
  EXPECT_NEAR(rayleigh_quotient_extreme(d, Extreme::kSmallest).eigenvalue, 1.0, 1e-12);
}

TEST(Rayleigh, ExampleSmallestEigenvalue) {
  const PairedTensor e = arte_schur_solve(example1::problem()).E;
  const EigenPair p = rayleigh_quotient_extreme(hermitian_part(e), Extreme::kSmallest);
  EXPECT_NEAR(p.eigenvalue, example1::kReferenceMinEigenvalue, 1e-3);
  EXPECT_LE(p.residual, 1e-10 * spectral_norm(e));
}

TEST(Rayleigh, MatchesDenseEigensolver) {
  Gen g(68);
  for (int c = 0; c < kCases; ++c) {
    const PairedTensor h = g.hermitian({2, 3});
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h.unfolding());
    const double scale = spectral_norm(h);
    const EigenPair lo = rayleigh_quotient_extreme(h, Extreme::kSmallest);
    const EigenPair hi = rayleigh_quotient_extreme(h, Extreme::kLargest);
    ASSERT_NEAR(lo.eigenvalue, eig.eigenvalues().minCoeff(), 1e-9 * scale);
    ASSERT_NEAR(hi.eigenvalue, eig.eigenvalues().maxCoeff(), 1e-9 * scale);
    ASSERT_LE(frobenius_norm(h * lo.eigentensor - Complex(lo.eigenvalue) * lo.eigentensor), 1e-10 * scale);
  }
}

TEST(Rayleigh, Errors) {
  Gen g(69);
  EXPECT_THROW(rayleigh_quotient_extreme(g.square({3}), Extreme::kSmallest), Error);
  EXPECT_THROW(rayleigh_quotient_extreme(g.hermitian({3}), Extreme::kSmallest, PlainTensor({3})), Error);
}

TEST(Hamiltonian, ZeroAIdentityWeights) {
  const Dims d{2, 2};
  const PairedTensor id = PairedTensor::Identity(d);
  const PairedTensor m = hamiltonian_assemble({PairedTensor(Shape::square(d)), id, id});
  EXPECT_TRUE(hamiltonian_check(m));
  std::vector<Complex> want(4, 1.0);
  want.insert(want.end(), 4, -1.0);
  EXPECT_LE(multiset_distance(u_eigenvalues(m), want), 1e-12);
}

TEST(Hamiltonian, ExamplePassesCheck) {
  const ArteProblem p = example1::problem();
  EXPECT_TRUE(hamiltonian_check(hamiltonian_assemble({p.A, p.G, p.K})));
  Gen g(70);
  EXPECT_FALSE(hamiltonian_check(block2x2(p.A, p.G, p.K, p.A, 0)));
  EXPECT_THROW(hamiltonian_assemble({p.A, g.square({3, 2}), p.K}), Error);
}

TEST(Hamiltonian, SpectralSymmetry) {
  Gen g(71);
  for (int c = 0; c < kCases; ++c) {
    const PairedTensor m = random_hamiltonian(g, g.dims(2, 2));
    ASSERT_TRUE(hamiltonian_check(m));
    const auto ev = u_eigenvalues(m);
    std::vector<Complex> mirrored;
    for (const Complex& z : ev) mirrored.push_back(-std::conj(z));
    ASSERT_LE(multiset_distance(ev, mirrored), 1e-8 * spectral_norm(m));
  }
}

TEST(Hamiltonian, EigenpairQuadraticIdentity) {
  Gen g(72);
  for (int c = 0; c < kCases; ++c) {
    const Dims d = g.dims(2, 2);
    const PairedTensor a = g.square(d), gg = g.hermitian(d), k = g.hermitian(d);
    const PairedTensor m = hamiltonian_assemble({a, gg, k});
    const Index n = numel(d);
    // Undo the mode-0 shuffle so each eigenvector splits into its X and Y halves.
    const CMatrix p = shuffle_permutation(0, d).cast<Complex>();
    Eigen::ComplexEigenSolver<CMatrix> eig(m.unfolding());
    const double scale = spectral_norm(m);
    for (Index j = 0; j < 2 * n; ++j) {
      const CVector w = p.transpose() * eig.eigenvectors().col(j);
      const PlainTensor x(d, w.head(n)), y(d, w.tail(n));
      const Complex lambda = eig.eigenvalues()(j);
      const Complex lhs = inner_product(x, k * x) + inner_product(y, gg * y) -
                          (lambda + std::conj(lambda)) * inner_product(x, y);
      ASSERT_LE(std::abs(lhs), 1e-8 * scale);
    }
  }
}

TEST(Symplectic, Checks) {
  const Dims d{2, 3};
  EXPECT_TRUE(symplectic_check(j_tensor(d)));
  EXPECT_FALSE(symplectic_check(Complex(2.0) * PairedTensor::Identity({4, 3})));
  EXPECT_TRUE(symplectic_check(PairedTensor::Identity({4, 3})));
}

// Q1, Q2 from an orthonormal basis of a Lagrangian subspace: [W1; W2] with W^H J W = 0.
void random_unitary_symplectic_blocks(Gen& g, const Dims& d, PairedTensor& q1, PairedTensor& q2) {
  const Index n = numel(d);
  const PairedTensor h = g.hermitian(d);
  // Graph of a Hermitian map is Lagrangian.
  CMatrix w(2 * n, n);
  w << CMatrix::Identity(n, n), h.unfolding();
  const CMatrix u1 = Eigen::HouseholderQR<CMatrix>(g.matrix(n, n)).householderQ();
  Eigen::HouseholderQR<CMatrix> qr(w);
  const CMatrix basis = (qr.householderQ() * CMatrix::Identity(2 * n, n)) * u1;
  q1 = PairedTensor(Shape::square(d), basis.topRows(n));
  q2 = PairedTensor(Shape::square(d), -basis.bottomRows(n));
}

TEST(Symplectic, BlockConstruction) {
  Gen g(73);
  for (int c = 0; c < kCases; ++c) {
    const Dims d = g.dims(2, 2);
    PairedTensor q1, q2;
    random_unitary_symplectic_blocks(g, d, q1, q2);
    ASSERT_LE(frobenius_norm(hermitian_part(conj_transpose(q1) * q2) - conj_transpose(q1) * q2), 1e-12);
    ASSERT_LE(diff(conj_transpose(q1) * q1 + conj_transpose(q2) * q2, PairedTensor::Identity(d)), 1e-12);
    ASSERT_TRUE(symplectic_check(block2x2(q1, q2, -q2, q1, 0)));
  }
}

TEST(SchurHamiltonian, TrivialBlocks) {
  const Dims d{2, 2};
  const PairedTensor o(Shape::square(d));
  const PairedTensor id = PairedTensor::Identity(d);
  const SchurHamiltonian s = schur_hamiltonian(hamiltonian_assemble({-id, o, o}));
  EXPECT_LE(diff(s.T, -id), 1e-12);
  EXPECT_LE(max_abs(s.R.unfolding()), 1e-12);
}

TEST(SchurHamiltonian, ExampleStableEigenvalues) {
  const ArteProblem p = example1::problem();
  const SchurHamiltonian s = schur_hamiltonian(hamiltonian_assemble({p.A, p.G, p.K}));
  EXPECT_LE(multiset_distance(s.eigenvalues, example1::reference_closed_loop()), 1e-3);
}

TEST(SchurHamiltonian, Invariants) {
  Gen g(74);
  for (int c = 0; c < kCases; ++c) {
    const Dims d = g.pick(0, 1) == 0 ? Dims{2, 2} : Dims{3, 2};
    const testing::ArteCase ac = testing::random_arte(g, d, g.pick(0, 1) == 0);
    const PairedTensor m = hamiltonian_assemble({ac.problem.A, ac.problem.G, ac.problem.K});
    const SchurHamiltonian s = schur_hamiltonian(m);
    const double scale = spectral_norm(m);
    const PairedTensor j = j_tensor(d);
    ASSERT_LE(frobenius_norm(conj_transpose(s.Q) * j * s.Q - j), 1e-8 * frobenius_norm(j));
    const PairedTensor x = conj_transpose(s.Q) * m * s.Q;
    ASSERT_LE(frobenius_norm(block_of_2x2(x, 0, 1, 0)), 1e-8 * scale);
    ASSERT_LE(diff(block_of_2x2(x, 0, 0, 0), s.T), 1e-8 * scale);
    ASSERT_LE(diff(block_of_2x2(x, 0, 1, 1), -conj_transpose(s.T)), 1e-8 * scale);
    ASSERT_TRUE(is_stable(s.T));
    ASSERT_LE(diff(s.Q, block2x2(s.Q1, s.Q2, -s.Q2, s.Q1, 0)), 1e-12);
  }
}

TEST(SchurHamiltonian, ImaginaryAxisRejected) {
  const Dims d{2};
  const PairedTensor o(Shape::square(d));
  try {
    schur_hamiltonian(hamiltonian_assemble({o, PairedTensor::Identity(d), -PairedTensor::Identity(d)}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kImaginaryAxisEigenvalue);
  }
}

void expect_svd_identities(const PairedTensor& q, const SymplecticSvd& r, double tol) {
  const PairedTensor o(r.U.shape());
  const PairedTensor left = block2x2(conj_transpose(r.U), o, o, conj_transpose(r.U), 0);
  const PairedTensor right = block2x2(r.V, o, o, r.V, 0);
  EXPECT_LE(frobenius_norm(left * q * right - block2x2(r.S, r.D, -r.D, r.S, 0)), tol);
  for (std::size_t k = 0; k < r.s.size(); ++k) {
    EXPECT_GE(r.s[k], -tol);
    EXPECT_LE(r.s[k], 1.0 + tol);
    EXPECT_NEAR(r.s[k] * r.s[k] + r.d[k] * r.d[k], 1.0, tol);
  }
}

TEST(SymplecticSvd, IdentityAndJ) {
  const Dims half{2, 2};
  const PairedTensor id = PairedTensor::Identity({4, 2});
  const SymplecticSvd a = symplectic_svd(id);
  expect_svd_identities(id, a, 1e-12);
  for (std::size_t k = 0; k < a.s.size(); ++k) {
    EXPECT_NEAR(a.s[k], 1.0, 1e-12);
    EXPECT_NEAR(a.d[k], 0.0, 1e-12);
  }
  const PairedTensor j = j_tensor(half);
  const SymplecticSvd b = symplectic_svd(j);
  expect_svd_identities(j, b, 1e-12);
  for (std::size_t k = 0; k < b.s.size(); ++k) {
    EXPECT_NEAR(b.s[k], 0.0, 1e-12);
    EXPECT_NEAR(std::abs(b.d[k]), 1.0, 1e-12);
  }
  EXPECT_THROW(symplectic_svd(Complex(2.0) * id), Error);
}

TEST(SymplecticSvd, DiagonalIdentitiesOnSchurFactors) {
  Gen g(75);
  for (int c = 0; c < kCases; ++c) {
    const Dims d = g.dims(2, 2);
    const PairedTensor m = random_hamiltonian(g, d);
    SchurHamiltonian s;
    try {
      s = schur_hamiltonian(m);
    } catch (const Error&) {
      continue;  // a random Hamiltonian may touch the imaginary axis
    }
    const SymplecticSvd r = symplectic_svd(s.Q);
    expect_svd_identities(s.Q, r, 1e-10);
    ASSERT_LE(diff(conj_transpose(r.U) * r.U, PairedTensor::Identity(d)), 1e-12);
    ASSERT_LE(diff(conj_transpose(r.V) * r.V, PairedTensor::Identity(d)), 1e-12);
  }
}

TEST(SymplecticSvd, RandomBlockForm) {
  Gen g(76);
  for (int c = 0; c < kCases; ++c) {
    const Dims d = g.dims(2, 2);
    PairedTensor q1, q2;
    random_unitary_symplectic_blocks(g, d, q1, q2);
    const PairedTensor q = block2x2(q1, q2, -q2, q1, 0);
    expect_svd_identities(q, symplectic_svd(q), 1e-10);
  }
}

}  // namespace
}  // namespace rtk
