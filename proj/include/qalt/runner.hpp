#pragma once

#include <string>
#include <vector>

#include "qalt/config.hpp"

namespace qalt {

/// Files written by one executed config, plus the per-run stdout summaries.
struct RunArtifacts {
  std::string run_dir;                 // out_dir/label
  std::string manifest_path;           // run_dir/manifest.json
  std::vector<std::string> csv_paths;  // deterministic (rep, variant) order
  std::vector<std::string> summaries;  // one line per run, same order
};

/// Execute a resolved config end-to-end: build the per-repetition model
/// instance, run every repetition x variant (altmin family / variational
/// schedule) over a pool of `workers` threads, then write one CSV per run
/// plus a JSON manifest echoing the resolved config and master seed. All
/// artifacts are written only after every run succeeded, and identical
/// config + seed produce byte-identical files for any worker count.
RunArtifacts run_experiment(const ExperimentConfig& cfg, int workers = 1);

}  // namespace qalt
