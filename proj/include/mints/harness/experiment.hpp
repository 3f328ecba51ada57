#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mints/core.hpp"
#include "mints/errors.hpp"
#include "mints/harness/config.hpp"

namespace mints::harness {

inline constexpr int kSchemaVersion = 1;

/// A replication failed; the message starts with its index.
class RunError : public Error {
 public:
  using Error::Error;
};

struct RunOptions {
  std::size_t jobs = 1;
  bool keep_rounds = true;  // build the per-round JSONL text
};

struct ReplicationResult {
  std::size_t rep = 0;
  std::vector<double> cumulative;             // R(t), t = 1..rounds
  std::string jsonl;                          // one record per round
  std::vector<std::size_t> decision_counts;   // finite decision sets only
  std::optional<std::size_t> posterior_mode;  // after the last round, when defined

  double final_regret() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
  /// R(min(t, rounds)): runs that stop early keep their last value.
  double regret_at(std::size_t t) const;
};

struct CheckpointStat {
  std::size_t t = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
};

struct RunSummary {
  ExperimentConfig config;
  std::uint64_t hash = 0;
  std::vector<ReplicationResult> replications;  // in replication order
  std::vector<CheckpointStat> checkpoints;
  double wall_seconds = 0.0;  // reported on stdout only, never written to files
};

/// {T/8, T/4, T/2, T}, each at least 1, duplicates removed.
std::vector<std::size_t> checkpoint_times(std::size_t horizon);

/// Mean and standard error of the mean (n - 1 denominator; 0 when n = 1).
std::pair<double, double> mean_and_stderr(const std::vector<double>& xs);

/// One replication, driven by RngStream(seed).split(rep).
ReplicationResult run_replication(const ExperimentConfig& cfg, std::size_t rep, bool keep_rounds);

/// Every replication, `jobs` at a time; results do not depend on `jobs`.
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

std::string rounds_jsonl(const RunSummary& s);
std::string summary_csv(const RunSummary& s);
std::string checkpoints_csv(const RunSummary& s);
std::string run_json(const RunSummary& s);

/// Writes rounds.jsonl, summary.csv, checkpoints.csv and run.json into dir.
void write_outputs(const RunSummary& s, const std::filesystem::path& dir);

/// Shortest round-trip decimal text.
std::string format_double(double v);

}  // namespace mints::harness
