#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mints/harness/experiment.hpp"

namespace mints::harness {

/// Least-squares fit R ~ a + b log T.
struct LogFit {
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
};

/// Needs at least two distinct T > 0. r2 is 1 when R is constant.
LogFit fit_log_growth(std::span<const double> t, std::span<const double> regret);

/// Checkpoint statistics of one run directory, read back from run.json.
struct RunRecord {
  std::string family;
  std::string policy;
  std::string config_hash;
  std::size_t replications = 0;
  std::vector<CheckpointStat> checkpoints;
};

RunRecord load_run(const std::filesystem::path& dir);
RunRecord record_of(const RunSummary& s);

/// One row per (config_hash, policy); runs sharing both are pooled by
/// replication count. Rows are ordered by config_hash, then policy.
struct AggregateRow {
  RunRecord pooled;
  LogFit fit;
};

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs);

/// Long format: one line per checkpoint, ci_halfwidth = 2 * stderr.
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

}  // namespace mints::harness
