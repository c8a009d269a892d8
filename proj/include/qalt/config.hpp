#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qalt/altmin.hpp"
#include "qalt/anneal.hpp"
#include "qalt/lowering.hpp"
#include "qalt/models.hpp"

namespace qalt {

/// Thrown on any config schema violation; the message names the offending
/// key. Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  profile,       // spectral mean/quartile profile of source vs target basis
  altmin,        // alternating minimization by energy measurement
  variational,   // alternating minimization by variational steps
  anneal,        // simulated-annealing baseline on a diagonal landscape
  theory_check,  // Monte Carlo vs closed-form expected-variance report
  model_dump,    // spectrum of the configured model
};

enum class ModelKind { maxcut, qmc, aklt, well, grover, linear };
enum class GraphKind { random_regular, path };

/// Which Hamiltonian/landscape a run is built on. Per-kind knobs keep their
/// documented defaults when omitted from the config file.
struct ModelSpec {
  ModelKind kind = ModelKind::maxcut;
  int n = 0;                                  // sites (or bits for landscapes)
  int degree = 4;                             // maxcut | qmc
  GraphKind graph = GraphKind::random_regular;  // maxcut | qmc
  QmcForm form = QmcForm::projector;          // qmc
  int anchors = 10;                           // well: random decoy anchors
  double multiplier = 2.0;                    // well: per-unit-distance slope
  std::int64_t marked = 0;                    // grover
  double e_max = 4.0;                         // linear ramp maximum
  // aklt only: raise for matrix-free (variational) runs past the dense cap
  std::int64_t dim_cap = RegisterShape::kDefaultDimCap;
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::local;
  int band_t = 8;
};

enum class InitialKind { plus, haar, basis, file };

struct InitialStateSpec {
  InitialKind kind = InitialKind::plus;
  std::string digits;  // basis: one digit per site, site 0 first
  std::string path;    // file: whitespace-separated "re im" per amplitude
};

enum class ProfileBasis { base, altered };

struct ProfileSpec {
  ProfileBasis source = ProfileBasis::base;
  ProfileBasis target = ProfileBasis::altered;
  std::int64_t stride = 1;
};

struct AltMinSpec {
  int l = 1;
  int k = 1;
  RunMode mode = RunMode::trajectory;
  bool store_states = false;
};

struct VariationalSpec {
  int l = 1;
  std::vector<ScheduleKind> schedules = {
      ScheduleKind::standard, ScheduleKind::hybrid, ScheduleKind::altered};
  ThetaMode theta = ThetaMode::line_search();
};

struct AnnealSpec {
  AnnealConfig cfg;
  bool ensemble = false;  // evolve the full distribution instead of a walker
};

struct TheorySpec {
  int theorem = 1;  // 1 = local family, 2 = sparse family
  std::int64_t samples = 100000;
};

/// Fully resolved experiment description; serializes to/from the JSON config
/// dialect documented in the README. Unknown keys are rejected on parse.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::profile;
  std::string label = "run";
  std::uint64_t seed = 1;
  int repetitions = 1;
  std::string out_dir = "out";
  ModelSpec model;
  std::vector<FamilySpec> families = {FamilySpec{}};
  InitialStateSpec initial;
  ProfileSpec profile;
  AltMinSpec altmin;
  VariationalSpec variational;
  AnnealSpec anneal;
  TheorySpec theory;
};

/// Parse + schema-validate a JSON config document. Throws ConfigError with
/// the offending key path on any violation.
ExperimentConfig parse_config(const std::string& json_text);

/// Read the file and parse_config its contents.
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON echo of a resolved config (round-trips through
/// parse_config; used for the run manifest and --emit-config).
std::string dump_config(const ExperimentConfig& cfg);

/// Fully resolved preset for a figure panel (fig1a ... fig9c). `full`
/// switches fig9a to the complete L=10 sweep. Throws ConfigError on an
/// unknown name.
ExperimentConfig preset(const std::string& name, bool full = false);

std::vector<std::string> preset_names();

}  // namespace qalt
