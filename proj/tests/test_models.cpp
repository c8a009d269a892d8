#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qalt/linalg.hpp"
#include "qalt/models.hpp"
#include "qalt/stats.hpp"

using namespace qalt;

namespace {

// Brute-force uncut-edge count per bitstring (site 0 = most significant bit).
VecR maxcut_diagonal_oracle(const Graph& g) {
  const std::int64_t dim = std::int64_t{1} << g.n;
  VecR e = VecR::Zero(dim);
  for (std::int64_t x = 0; x < dim; ++x)
    for (const auto& [i, j] : g.edges) {
      const int bi = static_cast<int>((x >> (g.n - 1 - i)) & 1);
      const int bj = static_cast<int>((x >> (g.n - 1 - j)) & 1);
      if (bi == bj) e[x] += 1.0;
    }
  return e;
}

int hamming(std::int64_t a, std::int64_t b) {
  int c = 0;
  for (std::int64_t x = a ^ b; x; x >>= 1) c += static_cast<int>(x & 1);
  return c;
}

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("random_regular_graph produces simple regular graphs") {
    RngStream rng(1);
    for (const auto& [n, deg] : std::vector<std::pair<int, int>>{
             {2, 1}, {8, 3}, {12, 4}, {10, 6}}) {
      const Graph g = random_regular_graph(n, deg, rng);
      REQUIRE(g.n == n);
      REQUIRE(static_cast<int>(g.edges.size()) == n * deg / 2);
      std::vector<int> degree(static_cast<std::size_t>(n), 0);
      std::set<std::pair<int, int>> seen;
      for (const auto& e : g.edges) {
        REQUIRE(e.first < e.second);
        REQUIRE(e.first >= 0);
        REQUIRE(e.second < n);
        REQUIRE(seen.insert(e).second);  // no parallel edges
        ++degree[static_cast<std::size_t>(e.first)];
        ++degree[static_cast<std::size_t>(e.second)];
      }
      for (int d : degree) REQUIRE(d == deg);
      for (std::size_t i = 1; i < g.edges.size(); ++i)
        REQUIRE(g.edges[i - 1] < g.edges[i]);
    }
    // n=2, degree=1 has a unique simple graph.
    RngStream r2(99);
    const Graph g21 = random_regular_graph(2, 1, r2);
    REQUIRE(g21.edges == std::vector<std::pair<int, int>>{{0, 1}});
  }

  TEST_CASE("random_regular_graph is seed-deterministic") {
    RngStream a(7), b(7), c(8);
    const Graph ga = random_regular_graph(12, 4, a);
    const Graph gb = random_regular_graph(12, 4, b);
    const Graph gc = random_regular_graph(12, 4, c);
    REQUIRE(ga.edges == gb.edges);
    REQUIRE(ga.edges != gc.edges);
  }

  TEST_CASE("path_graph chains consecutive sites") {
    const Graph g = path_graph(5);
    REQUIRE(g.n == 5);
    REQUIRE(g.edges == std::vector<std::pair<int, int>>{
                           {0, 1}, {1, 2}, {2, 3}, {3, 4}});
  }

  TEST_CASE("maxcut single edge is the uncut-pair projector") {
    Graph g{2, {{0, 1}}};
    const LocalHamiltonian h = maxcut_hamiltonian(g);
    REQUIRE(h.terms.size() == 1);
    REQUIRE(h.terms[0].rank == 2);
    h.terms[0].validate();
    REQUIRE(h.is_diagonal());
    VecR want(4);
    want << 1, 0, 0, 1;
    REQUIRE((h.diagonal() - want).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("maxcut 4-cycle has two perfect cuts") {
    Graph g{4, {{0, 1}, {0, 3}, {1, 2}, {2, 3}}};
    const LocalHamiltonian h = maxcut_hamiltonian(g);
    const auto es = spectral(h.assemble_real());
    REQUIRE(std::abs(es.energy[0]) < 1e-12);
    REQUIRE(std::abs(es.energy[1]) < 1e-12);
    REQUIRE(es.energy[2] > 0.5);  // next level cuts two edges fewer
  }

  TEST_CASE("maxcut diagonal matches the exhaustive count on n=8") {
    RngStream rng(5);
    const Graph g = random_regular_graph(8, 4, rng);
    const LocalHamiltonian h = maxcut_hamiltonian(g);
    const VecR want = maxcut_diagonal_oracle(g);
    REQUIRE((h.diagonal() - want).cwiseAbs().maxCoeff() < 1e-12);
    // Dense assembly agrees with the diagonal shortcut.
    const auto dense = h.assemble_real();
    REQUIRE((dense.mat.diagonal() - want).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((dense.mat - MatR(want.asDiagonal())).cwiseAbs().maxCoeff() <
            1e-12);
  }

  TEST_CASE("qmc single edge spectra for both forms") {
    Graph g{2, {{0, 1}}};
    const auto proj = spectral(qmc_hamiltonian(g).assemble());
    VecR want(4);
    want << 0, 1, 1, 1;
    REQUIRE((proj.energy - want).cwiseAbs().maxCoeff() < 1e-12);
    const auto swap_half =
        spectral(qmc_hamiltonian(g, QmcForm::swap_half).assemble());
    VecR want2(4);
    want2 << -0.5, 0.5, 0.5, 0.5;
    REQUIRE((swap_half.energy - want2).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("qmc symmetric states saturate the projector form") {
    Graph g{4, {{0, 1}, {0, 3}, {1, 2}, {2, 3}}};
    const LocalHamiltonian h = qmc_hamiltonian(g);
    REQUIRE(!h.is_diagonal());
    const StateVector plus = uniform_product_state(h.shape);
    REQUIRE(std::abs(mean_energy(plus, h.applier()) - 4.0) < 1e-12);
    const StateVector up = basis_state(h.shape, 0);
    const LocalApplier ap = h.applier();
    REQUIRE((ap.apply(up.amp) - 4.0 * up.amp).norm() < 1e-12);
  }

  TEST_CASE("aklt terms are rank-5 projectors") {
    const LocalHamiltonian h = aklt_hamiltonian(4);
    REQUIRE(h.shape.dims == std::vector<int>(4, 3));
    REQUIRE(h.terms.size() == 3);
    for (const auto& t : h.terms) {
      REQUIRE(t.rank == 5);
      t.validate();
    }
    REQUIRE(aklt_hamiltonian(4, true).terms.size() == 4);
  }

  TEST_CASE("open aklt chain has a 4-fold zero-energy ground space") {
    const LocalHamiltonian h = aklt_hamiltonian(6);
    const auto es = spectral(h.assemble_real());
    for (int i = 0; i < 4; ++i) REQUIRE(std::abs(es.energy[i]) < 1e-8);
    REQUIRE(es.energy[4] > 0.05);
  }

  TEST_CASE("periodic aklt chain has a unique zero-energy ground state") {
    const LocalHamiltonian h = aklt_hamiltonian(4, true);
    const auto es = spectral(h.assemble_real());
    REQUIRE(std::abs(es.energy[0]) < 1e-10);
    REQUIRE(es.energy[1] > 1e-3);
  }

  TEST_CASE("aklt_ground_states are orthonormal and annihilated") {
    const int n = 6;
    const LocalHamiltonian h = aklt_hamiltonian(n);
    const LocalApplier ap = h.applier();
    const auto gs = aklt_ground_states(n);
    REQUIRE(gs.size() == 4);
    for (std::size_t i = 0; i < gs.size(); ++i) {
      gs[i].validate();
      REQUIRE(ap.apply(gs[i].amp).norm() < 1e-10);
      for (std::size_t j = 0; j < i; ++j)
        REQUIRE(std::abs(gs[i].amp.dot(gs[j].amp)) < 1e-10);
    }
  }

  TEST_CASE("grover_landscape marks a single string") {
    const DiagonalLandscape l = grover_landscape(4, 11);
    REQUIRE(l.dim() == 16);
    for (std::int64_t x = 0; x < 16; ++x)
      REQUIRE(l.e[x] == (x == 11 ? 0.0 : 1.0));
  }

  TEST_CASE("well_landscape without decoys is the two-well distance cone") {
    RngStream rng(9);
    const int n = 6;
    const double mult = 2.0;
    const DiagonalLandscape l = well_landscape(n, 0, mult, rng);
    const std::int64_t top = (std::int64_t{1} << n) - 1;
    for (std::int64_t x = 0; x <= top; ++x) {
      const double want =
          mult * std::min(hamming(x, 0), hamming(x, top));
      REQUIRE(std::abs(l.e[x] - want) < 1e-14);
    }
  }

  TEST_CASE("well_landscape decoys respect the ground anchors") {
    RngStream rng(10);
    const int n = 8;
    const DiagonalLandscape l = well_landscape(n, 10, 2.0, rng);
    const std::int64_t top = (std::int64_t{1} << n) - 1;
    int zeros = 0;
    for (std::int64_t x = 0; x <= top; ++x) {
      REQUIRE(l.e[x] >= 0.0);
      REQUIRE(l.e[x] <=
              2.0 * std::min(hamming(x, 0), hamming(x, top)) + 1e-14);
      if (l.e[x] == 0.0) ++zeros;
    }
    REQUIRE(zeros == 2);
    // Same seed, same landscape.
    RngStream r2(10);
    const DiagonalLandscape l2 = well_landscape(n, 10, 2.0, r2);
    REQUIRE((l.e - l2.e).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("linear_landscape ramps evenly to e_max") {
    const DiagonalLandscape l = linear_landscape(3, 4.0);
    REQUIRE(l.dim() == 8);
    for (std::int64_t i = 0; i < 8; ++i)
      REQUIRE(std::abs(l.e[i] - static_cast<double>(i) * 4.0 / 8.0) < 1e-14);
  }

  TEST_CASE("landscape_to_operator is the diagonal matrix") {
    const DiagonalLandscape l = grover_landscape(3, 2);
    const auto h = landscape_to_operator(l);
    REQUIRE((h.mat.diagonal() - l.e).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE(h.mat.cwiseAbs().sum() == h.mat.diagonal().cwiseAbs().sum());
  }

  TEST_CASE("landscape_eigensystem sorts stably and permutes") {
    const DiagonalLandscape l = grover_landscape(3, 5);
    const auto es = landscape_eigensystem(l);
    REQUIRE(es.is_permutation());
    REQUIRE(es.energy[0] == 0.0);
    REQUIRE(es.perm[0] == 5);
    // Ties keep index order.
    const std::vector<std::int64_t> rest{0, 1, 2, 3, 4, 6, 7};
    for (std::size_t i = 0; i < rest.size(); ++i) {
      REQUIRE(es.energy[static_cast<std::int64_t>(i) + 1] == 1.0);
      REQUIRE(es.perm[i + 1] == rest[i]);
    }
  }

  TEST_CASE("canonical initial states") {
    const RegisterShape shape = RegisterShape::qubits(3);
    const StateVector plus = uniform_product_state(shape);
    plus.validate();
    for (std::int64_t i = 0; i < 8; ++i)
      REQUIRE(std::abs(plus.amp[i] - cplx(1.0 / std::sqrt(8.0), 0)) < 1e-14);
    const StateVector e5 = basis_state(shape, 5);
    e5.validate();
    REQUIRE(std::abs(e5.amp[5] - cplx(1, 0)) < 1e-14);
    REQUIRE(std::abs(e5.amp.cwiseAbs().sum() - 1.0) < 1e-14);
  }

  TEST_CASE("haar_state overlaps average to 1/D") {
    RngStream rng(12);
    const RegisterShape shape = RegisterShape::qubits(3);
    oracles::MeanAccumulator acc;
    for (int i = 0; i < 4000; ++i) {
      const StateVector psi = haar_state(shape, rng);
      psi.validate();
      acc.add(std::norm(psi.amp[0]));
    }
    REQUIRE(std::abs(acc.mean() - 1.0 / 8.0) < 4.0 * acc.stderr_mean());
  }
}
