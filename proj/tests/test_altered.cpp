#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qalt/altered.hpp"
#include "qalt/linalg.hpp"
#include "qalt/models.hpp"

using namespace qalt;

namespace {

Graph four_cycle() { return Graph{4, {{0, 1}, {0, 3}, {1, 2}, {2, 3}}}; }

double min_eigenvalue(const MatC& m) {
  Eigen::SelfAdjointEigenSolver<MatC> eig(m);
  return eig.eigenvalues().minCoeff();
}

}  // namespace

TEST_SUITE("altered") {
  TEST_CASE("sample_local_alteration draws rank-1 projectors in range") {
    RngStream rng(1);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    for (int draw = 0; draw < 20; ++draw) {
      const LocalAlteration a = sample_local_alteration(h, rng);
      REQUIRE(a.phis.size() == h.terms.size());
      for (std::size_t i = 0; i < a.phis.size(); ++i) {
        const Projector& phi = a.phis[i];
        REQUIRE(phi.rank == 1);
        REQUIRE(phi.support == h.terms[i].support);
        phi.validate();
        REQUIRE((h.terms[i].mat * phi.mat - phi.mat).cwiseAbs().maxCoeff() <
                1e-10);
      }
    }
  }

  TEST_CASE("alteration equal to the projectors doubles the operator") {
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    LocalAlteration a;
    a.phis = h.terms;
    const auto doubled = assemble_altered(h, a);
    const auto base = h.assemble();
    REQUIRE((doubled.mat - 2.0 * base.mat).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("altered operator is positive semidefinite") {
    RngStream rng(2);
    const LocalHamiltonian h = qmc_hamiltonian(four_cycle());
    for (int draw = 0; draw < 5; ++draw) {
      const LocalAlteration a = sample_local_alteration(h, rng);
      REQUIRE(min_eigenvalue(assemble_altered(h, a).mat) > -1e-10);
    }
  }

  TEST_CASE("altered operator is pinched between H and 2H") {
    RngStream rng(3);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    const MatC base = h.assemble().mat;
    for (int draw = 0; draw < 5; ++draw) {
      const LocalAlteration a = sample_local_alteration(h, rng);
      const MatC alt = assemble_altered(h, a).mat;
      REQUIRE(min_eigenvalue(alt - base) > -1e-10);
      REQUIRE(min_eigenvalue(2.0 * base - alt) > -1e-10);
    }
  }

  TEST_CASE("altered terms annihilate the aklt ground space") {
    RngStream rng(4);
    const LocalHamiltonian h = aklt_hamiltonian(5);
    const auto gs = aklt_ground_states(5);
    for (int draw = 0; draw < 5; ++draw) {
      const LocalAlteration a = sample_local_alteration(h, rng);
      const LocalApplier alt(h.shape, altered_term_ops(h, a));
      for (const auto& g : gs) REQUIRE(alt.apply(g.amp).norm() < 1e-8);
    }
  }

  TEST_CASE("altered_term_ops agree with the dense assembly") {
    RngStream rng(5);
    const LocalHamiltonian h = qmc_hamiltonian(four_cycle());
    const LocalAlteration a = sample_local_alteration(h, rng);
    const MatC dense = assemble_altered(h, a).mat;
    const LocalApplier ap(h.shape, altered_term_ops(h, a));
    for (int trial = 0; trial < 4; ++trial) {
      const VecC psi = oracles::random_state(h.shape.total_dim, rng);
      REQUIRE((ap.apply(psi) - dense * psi).norm() < 1e-11);
    }
  }

  TEST_CASE("empty alteration leaves the projector sum unchanged") {
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    LocalAlteration a;
    for (const auto& t : h.terms) {
      Projector zero;
      zero.support = t.support;
      zero.mat = MatC::Zero(t.mat.rows(), t.mat.cols());
      zero.rank = 0;
      a.phis.push_back(zero);
    }
    REQUIRE((assemble_altered(h, a).mat - h.assemble().mat)
                .cwiseAbs()
                .maxCoeff() < 1e-13);
  }

  TEST_CASE("pattern_columns band windows clip at the boundaries") {
    const SparsityPattern p1 = band_pattern(1, 8);
    REQUIRE(pattern_columns(p1, 0) == std::vector<std::int64_t>{0, 1});
    REQUIRE(pattern_columns(p1, 3) == std::vector<std::int64_t>{2, 3, 4});
    REQUIRE(pattern_columns(p1, 7) == std::vector<std::int64_t>{6, 7});
    const SparsityPattern p2 = band_pattern(2, 16);
    REQUIRE(pattern_columns(p2, 0) == std::vector<std::int64_t>{0, 1, 2});
    REQUIRE(pattern_columns(p2, 8).size() == 5);  // 2t+1 in the interior
    REQUIRE(pattern_columns(p2, 15) == std::vector<std::int64_t>{13, 14, 15});
  }

  TEST_CASE("pattern_columns hamming lists the bit-flip neighbors") {
    const SparsityPattern p = hamming_pattern(3);
    REQUIRE(p.dim == 8);
    REQUIRE(pattern_columns(p, 0) == std::vector<std::int64_t>{1, 2, 4});
    REQUIRE(pattern_columns(p, 5) == std::vector<std::int64_t>{1, 4, 7});
    for (std::int64_t b = 0; b < 8; ++b)
      REQUIRE(pattern_columns(p, b).size() == 3);  // t_beta = n everywhere
  }

  TEST_CASE("sparse couplings have variance E_beta / t_beta") {
    RngStream rng(6);
    VecR e(5);
    e << 0.0, 1.0, 2.0, 4.0, 0.5;
    const SparsityPattern p = band_pattern(2, 5);
    const int n = 10000;
    std::vector<oracles::MeanAccumulator> acc(5);
    for (int draw = 0; draw < n; ++draw) {
      const SparseAlteration s = sample_sparse_alteration(e, p, rng);
      for (std::size_t b = 0; b < 5; ++b)
        for (double f : s.f[b]) acc[b].add(f * f);
    }
    // Column 0 has zero energy: identically zero couplings.
    REQUIRE((acc[0].n == 0 || acc[0].mean() == 0.0));
    for (std::size_t b = 1; b < 5; ++b) {
      const double tb =
          static_cast<double>(pattern_columns(p, static_cast<std::int64_t>(b)).size());
      const double want = e[static_cast<std::int64_t>(b)] / tb;
      REQUIRE(std::abs(acc[b].mean() - want) < 4.0 * acc[b].stderr_mean());
    }
  }

  TEST_CASE("gram of W averages to the energy diagonal") {
    RngStream rng(7);
    const DiagonalLandscape l = grover_landscape(3, 5);
    VecR e = 4.0 * l.e;  // energies 4 except the marked 0
    const SparsityPattern p = band_pattern(1, 8);
    const int n = 10000;
    MatR mean = MatR::Zero(8, 8);
    for (int i = 0; i < n; ++i)
      mean += gram_of_w(sample_sparse_alteration(e, p, rng));
    mean /= n;
    // Diagonal entry stderr sqrt(2/t_b) E_b / sqrt(n) <= 0.06.
    REQUIRE((mean - MatR(e.asDiagonal())).cwiseAbs().maxCoeff() < 0.3);
  }

  TEST_CASE("zeroed couplings reduce to the bare landscape") {
    RngStream rng(8);
    const DiagonalLandscape l = grover_landscape(3, 2);
    const SparsityPattern p = hamming_pattern(3);
    SparseAlteration s = sample_sparse_alteration(l.e, p, rng);
    for (auto& col : s.f) std::fill(col.begin(), col.end(), 0.0);
    const auto h = assemble_sparse_altered(l, s);
    REQUIRE((h.mat - MatR(l.e.asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("zero-energy strings stay exact eigenvectors") {
    RngStream rng(9);
    const DiagonalLandscape l = grover_landscape(4, 11);
    const SparsityPattern p = hamming_pattern(4);
    for (int draw = 0; draw < 10; ++draw) {
      const SparseAlteration s = sample_sparse_alteration(l.e, p, rng);
      const auto h = assemble_sparse_altered(l, s);
      REQUIRE((h.mat * VecR::Unit(16, 11)).norm() < 1e-14);
      REQUIRE(min_eigenvalue(h.mat.cast<cplx>()) > -1e-12);
    }
  }

  TEST_CASE("apply_w and the dense gram agree") {
    RngStream rng(10);
    VecR e(8);
    for (int i = 0; i < 8; ++i) e[i] = rng.uniform() * 3.0;
    const SparsityPattern p = band_pattern(2, 8);
    const SparseAlteration s = sample_sparse_alteration(e, p, rng);
    const MatR gram = gram_of_w(s);
    REQUIRE((gram - gram.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(min_eigenvalue(gram.cast<cplx>()) > -1e-12);
    for (int c = 0; c < 8; ++c) {
      const VecR col = s.apply_w_adjoint(s.apply_w(VecR(VecR::Unit(8, c))));
      REQUIRE((col - gram.col(c)).cwiseAbs().maxCoeff() < 1e-12);
    }
    DiagonalLandscape l{3, e, "rand"};
    const auto h = assemble_sparse_altered(l, s);
    REQUIRE((h.mat - (MatR(e.asDiagonal()) + gram)).cwiseAbs().maxCoeff() <
            1e-12);
  }

  TEST_CASE("eigensystem-base assembly rotates the gram into place") {
    RngStream rng(11);
    HermitianOp<cplx> h0;
    h0.shape = RegisterShape::qubits(3);
    h0.mat = oracles::random_hermitian(8, rng);
    const auto es = spectral(h0);
    const VecR shifted = es.energy.array() - es.energy.minCoeff();
    const SparsityPattern p = band_pattern(2, 8);
    const SparseAlteration s = sample_sparse_alteration(shifted, p, rng);
    const auto h = assemble_sparse_altered(es, h0.shape, s);
    h.validate();
    const MatC want = es.basis *
                      (MatC(es.energy.cast<cplx>().asDiagonal()) +
                       gram_of_w(s).cast<cplx>()) *
                      es.basis.adjoint();
    REQUIRE((h.mat - want).cwiseAbs().maxCoeff() < 1e-11);
  }
}
