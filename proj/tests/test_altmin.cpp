#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qalt/altmin.hpp"
#include "qalt/linalg.hpp"
#include "qalt/stats.hpp"

using namespace qalt;

namespace {

Graph four_cycle() { return Graph{4, {{0, 1}, {0, 3}, {1, 2}, {2, 3}}}; }

AltMinConfig measurement_cfg(int l, int k, FamilyKind fam = FamilyKind::local,
                             RunMode mode = RunMode::trajectory) {
  AltMinConfig cfg;
  cfg.l = l;
  cfg.k = k;
  cfg.family = fam;
  cfg.mode = mode;
  return cfg;
}

}  // namespace

TEST_SUITE("altmin") {
  TEST_CASE("physical_copies counts the preparation tree") {
    REQUIRE(physical_copies(8, 3) == 9841);
    REQUIRE(physical_copies(5, 3) == 364);
    REQUIRE(physical_copies(4, 3) == 121);
    REQUIRE(physical_copies(10, 3) == 88573);
    REQUIRE(physical_copies(7, 1) == 8);
    REQUIRE(physical_copies(0, 5) == 1);
    REQUIRE_THROWS_AS((void)physical_copies(-1, 2), ValidationError);
    REQUIRE_THROWS_AS((void)physical_copies(3, 0), ValidationError);
    REQUIRE_THROWS_AS((void)physical_copies(100, 100), ValidationError);
  }

  TEST_CASE("trajectory trace has the documented row layout") {
    RngStream rng(1);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    const AltMinConfig cfg = measurement_cfg(3, 2);
    const StateVector init = uniform_product_state(h.shape);
    const RunTrace t = altmin_measurement(h, cfg, init, rng);
    REQUIRE(t.rows.size() == 4);
    REQUIRE(t.physical_copy_count == physical_copies(3, 2));
    REQUIRE(t.label == h.label);
    for (int i = 0; i < 3; ++i) {
      const TraceRow& r = t.rows[static_cast<std::size_t>(i)];
      REQUIRE(r.iteration == i);
      REQUIRE(r.h_sample_id == i);  // 0 = base, then one fresh draw per round
      REQUIRE(r.measurements_logical == 2);
      REQUIRE(std::abs(r.k_i - (r.energy_current - r.quartile_current)) <
              1e-12);
      REQUIRE(std::isnan(r.theta));
    }
    // Round 0 measures the base Hamiltonian itself.
    REQUIRE(std::abs(t.rows[0].energy_current - t.rows[0].energy_base) <
            1e-10);
    REQUIRE(std::abs(t.rows[0].energy_base - 4.0 / 2.0) < 1e-10);
    const TraceRow& last = t.rows[3];
    REQUIRE(last.iteration == 3);
    REQUIRE(last.h_sample_id == -1);
    REQUIRE(last.measurements_logical == 0);
    REQUIRE(std::isnan(last.quartile_current));
    REQUIRE(std::isnan(last.k_i));
    REQUIRE(std::abs(last.energy_current - last.energy_base) < 1e-12);
  }

  TEST_CASE("altered-round energies sit between the base and its double") {
    RngStream rng(2);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    const AltMinConfig cfg = measurement_cfg(4, 2);
    const StateVector init = uniform_product_state(h.shape);
    const RunTrace t = altmin_measurement(h, cfg, init, rng);
    for (std::size_t i = 1; i + 1 < t.rows.size(); ++i) {
      REQUIRE(t.rows[i].energy_current >= t.rows[i].energy_base - 1e-9);
      REQUIRE(t.rows[i].energy_current <= 2.0 * t.rows[i].energy_base + 1e-9);
    }
  }

  TEST_CASE("store_states keeps states and alterations aligned") {
    RngStream rng(3);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    AltMinConfig cfg = measurement_cfg(3, 2);
    cfg.store_states = true;
    const StateVector init = uniform_product_state(h.shape);
    const RunTrace t = altmin_measurement(h, cfg, init, rng);
    REQUIRE(t.states.size() == 4);
    REQUIRE(t.alterations.size() == 3);
    REQUIRE(t.alterations[0].phis.empty());  // round 0 measures the base
    for (std::size_t i = 1; i < t.alterations.size(); ++i)
      REQUIRE(t.alterations[i].phis.size() == h.terms.size());
    const LocalApplier base = h.applier();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      t.states[i].validate();
      REQUIRE(std::abs(t.rows[i].energy_base -
                       mean_energy(t.states[i], base, h.offset)) < 1e-10);
    }
    // Rows measured against an altered draw report that draw's energy.
    for (std::size_t i = 1; i + 1 < t.rows.size(); ++i) {
      const LocalApplier alt(h.shape, altered_term_ops(h, t.alterations[i]));
      REQUIRE(std::abs(t.rows[i].energy_current -
                       mean_energy(t.states[i], alt)) < 1e-9);
    }
  }

  TEST_CASE("aklt ground states are fixed points of the whole loop") {
    RngStream rng(4);
    const LocalHamiltonian h = aklt_hamiltonian(4);
    AltMinConfig cfg = measurement_cfg(3, 2);
    cfg.store_states = true;
    const RunTrace t = altmin_measurement(h, cfg, aklt_ground_states(4)[1], rng);
    for (const auto& r : t.rows) REQUIRE(std::abs(r.energy_base) < 1e-8);
    const LocalApplier ap = h.applier();
    REQUIRE(ap.apply(t.states.back().amp).norm() < 1e-7);
  }

  TEST_CASE("sparse runs never leak mass onto an orthogonal ground string") {
    // The marked string stays an exact eigenvector of every sparse draw, so
    // a run started orthogonal to it keeps base energy 1 forever.
    RngStream rng(5);
    const DiagonalLandscape l = grover_landscape(4, 11);
    const StateVector init = basis_state(RegisterShape::qubits(4), 3);
    for (FamilyKind fam : {FamilyKind::sparse_hamming, FamilyKind::sparse_band}) {
      AltMinConfig cfg = measurement_cfg(5, 2, fam);
      cfg.band_t = 3;
      const RunTrace t = altmin_measurement(l, cfg, init, rng);
      REQUIRE(t.rows.size() == 6);
      for (const auto& r : t.rows)
        REQUIRE(std::abs(r.energy_base - 1.0) < 1e-10);
    }
  }

  TEST_CASE("exact-distribution grover round has a closed form") {
    RngStream rng(6);
    const DiagonalLandscape l = grover_landscape(4, 11);
    const StateVector init = uniform_product_state(RegisterShape::qubits(4));
    const AltMinConfig cfg =
        measurement_cfg(2, 3, FamilyKind::sparse_hamming,
                        RunMode::exact_distribution);
    const RunTrace t = altmin_measurement(l, cfg, init, rng);
    // Round 0 measures the landscape itself on |+>^4.
    REQUIRE(std::abs(t.rows[0].energy_base - 15.0 / 16.0) < 1e-12);
    REQUIRE(std::abs(t.rows[0].energy_current - 15.0 / 16.0) < 1e-12);
    REQUIRE(std::abs(t.rows[0].quartile_current - 1.0) < 1e-12);
    // Best-of-3 turns the 1/16 ground mass into 1 - (15/16)^3.
    const double miss = std::pow(15.0 / 16.0, 3);
    REQUIRE(std::abs(t.rows[1].energy_base - miss) < 1e-12);
    REQUIRE(t.rows[2].energy_base <= t.rows[1].energy_base + 1e-12);
  }

  TEST_CASE("exact-distribution mode is deterministic per seed") {
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    const AltMinConfig cfg =
        measurement_cfg(3, 2, FamilyKind::local, RunMode::exact_distribution);
    const StateVector init = uniform_product_state(h.shape);
    RngStream a(7), b(7), c(8);
    const RunTrace ta = altmin_measurement(h, cfg, init, a);
    const RunTrace tb = altmin_measurement(h, cfg, init, b);
    const RunTrace tc = altmin_measurement(h, cfg, init, c);
    REQUIRE(ta.rows.size() == tb.rows.size());
    bool any_diff = false;
    for (std::size_t i = 0; i < ta.rows.size(); ++i) {
      REQUIRE(ta.rows[i].energy_base == tb.rows[i].energy_base);
      REQUIRE(ta.rows[i].energy_current == tb.rows[i].energy_current);
      any_diff |= (ta.rows[i].energy_base != tc.rows[i].energy_base);
    }
    REQUIRE(any_diff);  // fresh draws actually differ across seeds
  }

  TEST_CASE("one-round trajectories reproduce the exact distribution") {
    // With L = 1 both modes measure only the base Hamiltonian, so the
    // trajectory mean over repetitions must converge to the exact row.
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    RngStream init_rng(9);
    const StateVector init = haar_state(h.shape, init_rng);
    const AltMinConfig exact_cfg =
        measurement_cfg(1, 2, FamilyKind::local, RunMode::exact_distribution);
    RngStream er(1);
    const RunTrace exact = altmin_measurement(h, exact_cfg, init, er);
    const AltMinConfig traj_cfg = measurement_cfg(1, 2);
    oracles::MeanAccumulator acc;
    for (int rep = 0; rep < 600; ++rep) {
      RngStream rr(1000 + static_cast<std::uint64_t>(rep));
      const RunTrace t = altmin_measurement(h, traj_cfg, init, rr);
      acc.add(t.rows[1].energy_base);
    }
    REQUIRE(std::abs(acc.mean() - exact.rows[1].energy_base) <
            4.0 * acc.stderr_mean());
  }

  TEST_CASE("variational standard schedule is monotone on the base energy") {
    RngStream rng(10);
    const LocalHamiltonian h = qmc_hamiltonian(four_cycle());
    const StateVector init = haar_state(h.shape, rng);
    const RunTrace t =
        altmin_variational(h, ScheduleKind::standard, 6, init, rng);
    REQUIRE(t.rows.size() == 7);
    REQUIRE(t.physical_copy_count == 7);
    REQUIRE(t.rows[0].h_sample_id == 0);
    REQUIRE(std::isnan(t.rows[0].theta));
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      REQUIRE(t.rows[i].iteration == static_cast<int>(i));
      REQUIRE(t.rows[i].h_sample_id == 0);  // never leaves the base target
      REQUIRE(!std::isnan(t.rows[i].theta));
      REQUIRE(t.rows[i].energy_base <= t.rows[i - 1].energy_base + 1e-10);
      REQUIRE(std::abs(t.rows[i].energy_current - t.rows[i].energy_base) <
              1e-10);
    }
  }

  TEST_CASE("variational hybrid schedule swaps targets after a stall") {
    RngStream rng(11);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    // A basis eigenstate stalls immediately: zero gradient, zero improvement.
    const StateVector init = basis_state(h.shape, 0);
    const RunTrace t = altmin_variational(h, ScheduleKind::hybrid, 8, init, rng);
    for (int step = 1; step <= 5; ++step)
      REQUIRE(t.rows[static_cast<std::size_t>(step)].h_sample_id == 0);
    REQUIRE(t.rows[6].h_sample_id == 1);  // five stalled steps then resample
    // Altered rows report energy against the altered target.
    for (std::size_t i = 1; i < t.rows.size(); ++i)
      if (t.rows[i].h_sample_id > 0)
        REQUIRE(t.rows[i].energy_current >= -1e-12);
  }

  TEST_CASE("variational altered schedule draws fresh targets each step") {
    RngStream rng(12);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    const StateVector init = uniform_product_state(h.shape);
    const RunTrace t = altmin_variational(h, ScheduleKind::altered, 4, init, rng);
    for (int step = 1; step <= 4; ++step)
      REQUIRE(t.rows[static_cast<std::size_t>(step)].h_sample_id == step);
  }

  TEST_CASE("variational eigenstate start stays put under the base") {
    RngStream rng(13);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    const StateVector init = basis_state(h.shape, 5);  // a perfect cut
    const RunTrace t =
        altmin_variational(h, ScheduleKind::standard, 5, init, rng);
    for (const auto& r : t.rows) REQUIRE(std::abs(r.energy_base) < 1e-12);
  }

  TEST_CASE("appendix diagnostics recompute from the stored run") {
    RngStream rng(14);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    AltMinConfig cfg = measurement_cfg(3, 2);
    cfg.store_states = true;
    const StateVector init = uniform_product_state(h.shape);
    const RunTrace t = altmin_measurement(h, cfg, init, rng);
    const AppendixBDiagnostics d = appendix_b_diagnostics(h, t);
    double mean_k = 0.0;
    for (int i = 0; i < 3; ++i)
      mean_k += t.rows[static_cast<std::size_t>(i)].k_i;
    mean_k /= 3.0;
    REQUIRE(std::abs(d.mean_k - mean_k) < 1e-12);
    double proj = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto& psi = t.states[static_cast<std::size_t>(i)];
      for (const auto& p : h.terms) {
        const auto emb = embed<cplx>(p.mat, p.support, h.shape);
        proj += psi.amp.dot(emb.mat * psi.amp).real() / p.rank;
      }
    }
    REQUIRE(std::abs(d.proj_term - proj / 3.0) < 1e-10);
    double corr = 0.0;
    for (int i = 1; i < 3; ++i) {
      const auto& psi = t.states[static_cast<std::size_t>(i) + 1];
      for (const auto& phi : t.alterations[static_cast<std::size_t>(i)].phis) {
        const auto emb = embed<cplx>(phi.mat, phi.support, h.shape);
        corr += psi.amp.dot(emb.mat * psi.amp).real();
      }
    }
    REQUIRE(std::abs(d.corr_term - corr / 3.0) < 1e-10);
  }

  TEST_CASE("appendix diagnostics require a stored local run") {
    RngStream rng(15);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    const AltMinConfig cfg = measurement_cfg(2, 2);
    const StateVector init = uniform_product_state(h.shape);
    const RunTrace t = altmin_measurement(h, cfg, init, rng);
    REQUIRE_THROWS_AS((void)appendix_b_diagnostics(h, t), ValidationError);
  }

  TEST_CASE("mismatched inputs are rejected") {
    RngStream rng(16);
    const LocalHamiltonian h = maxcut_hamiltonian(four_cycle());
    const StateVector wrong = uniform_product_state(RegisterShape::qubits(3));
    REQUIRE_THROWS_AS(
        (void)altmin_measurement(h, measurement_cfg(1, 1), wrong, rng),
        ValidationError);
    const StateVector init = uniform_product_state(h.shape);
    REQUIRE_THROWS_AS(
        (void)altmin_measurement(h, measurement_cfg(0, 1), init, rng),
        ValidationError);
    // Sparse families need a diagonal base; the quantum model is rejected.
    const LocalHamiltonian q = qmc_hamiltonian(four_cycle());
    REQUIRE_THROWS_AS(
        (void)altmin_measurement(
            q, measurement_cfg(1, 1, FamilyKind::sparse_hamming),
            uniform_product_state(q.shape), rng),
        ValidationError);
    // And the local family needs projector terms, not a landscape.
    const DiagonalLandscape l = grover_landscape(3, 0);
    REQUIRE_THROWS_AS(
        (void)altmin_measurement(l, measurement_cfg(1, 1),
                                 uniform_product_state(RegisterShape::qubits(3)),
                                 rng),
        ValidationError);
  }
}
