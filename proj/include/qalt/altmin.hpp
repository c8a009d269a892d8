#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qalt/altered.hpp"
#include "qalt/lowering.hpp"
#include "qalt/models.hpp"

namespace qalt {

enum class FamilyKind { local, sparse_band, sparse_hamming };
enum class RunMode { trajectory, exact_distribution };
enum class ScheduleKind { standard, hybrid, altered };

struct AltMinConfig {
  int l = 1;  // iterations
  int k = 1;  // measurements per iteration (best-of-K)
  FamilyKind family = FamilyKind::local;
  int band_t = 8;  // band half-width (sparse_band only)
  RunMode mode = RunMode::trajectory;
  bool store_states = false;  // keep states + alterations for diagnostics
};

/// One row per iteration i = 0..L: the state before the i-th measurement
/// (row L is the final state). Fields that do not apply hold NaN.
struct TraceRow {
  int iteration = 0;
  double energy_base = 0.0;
  double energy_current = 0.0;  // vs the operator measured/optimized at i
  double quartile_current = std::numeric_limits<double>::quiet_NaN();
  double k_i = std::numeric_limits<double>::quiet_NaN();  // mean - quartile
  double theta = std::numeric_limits<double>::quiet_NaN();  // variational only
  std::int64_t measurements_logical = 0;
  std::int64_t h_sample_id = -1;  // 0 = base Hamiltonian, 1.. = altered draws
};

struct RunTrace {
  std::vector<TraceRow> rows;
  std::int64_t physical_copy_count = 0;
  std::string label;

  // Populated when AltMinConfig::store_states is set (local trajectory runs):
  // states[i] is the state before iteration i; alterations[i] the draw
  // measured at iteration i (empty term list at base rounds).
  std::vector<StateVector> states;
  std::vector<LocalAlteration> alterations;
};

/// sum_{i=0}^{L} K^i physical state preparations.
std::int64_t physical_copies(int l, int k);

/// Algorithm 3 on a local Hamiltonian with the locally altered family.
RunTrace altmin_measurement(const LocalHamiltonian& h, const AltMinConfig& cfg,
                            const StateVector& initial, RngStream& rng);

/// Algorithm 3 on a classical base with a sparse family (band or Hamming).
/// Coupling rates use energies shifted so the base ground energy is 0.
RunTrace altmin_measurement(const DiagonalLandscape& base,
                            const AltMinConfig& cfg, const StateVector& initial,
                            RngStream& rng);

/// Algorithm 4: L variational line-search steps under one of the three
/// schedules (standard: always the base H; altered: a fresh draw per step;
/// hybrid: switch targets on stall - relative improvement < 1e-4 over 5
/// consecutive steps). Trace energies are always reported against base H.
RunTrace altmin_variational(const LocalHamiltonian& h, ScheduleKind schedule,
                            int l, const StateVector& initial, RngStream& rng,
                            const ThetaMode& theta = ThetaMode::line_search());

/// Convergence diagnostics from a stored local-family run: the running mean
/// of k_i = Tr(psi_i H_i) - Quar_{H_i}(psi_i), the mean projector term
/// (1/L) sum_i <psi_i| sum_j Pi_j/d_j |psi_i>, and the alteration correlation
/// (1/L) sum_i <psi_{i+1}| sum_j phi_{i,j} |psi_{i+1}>.
struct AppendixBDiagnostics {
  double mean_k = 0.0;
  double proj_term = 0.0;
  double corr_term = 0.0;
};

AppendixBDiagnostics appendix_b_diagnostics(const LocalHamiltonian& h,
                                            const RunTrace& trace);

}  // namespace qalt
