#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "matta/checkpoint.hpp"
#include "matta/config.hpp"
#include "matta/extract.hpp"
#include "matta/nested.hpp"
#include "matta/optim.hpp"
#include "matta/task.hpp"

namespace matta {

// Preconditioner groups for a model. Every tensor appears in exactly one
// slot; tensors outside Θ get lr_scale = ta_lr / lr.
std::vector<PrecondGroup> make_param_groups(MatTAModel& model, const OptimConfig& optim);

struct MetricsRow {
  std::size_t step = 0;
  double wall_ms = 0.0;
  double w_d_effective = 0.0;
  double loss_s = 0.0;
  double loss_ta = 0.0;
  double loss_d = 0.0;
  double loss_total = 0.0;
  EvalMetrics eval_s;
  EvalMetrics eval_ta;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);
std::string metrics_csv(const std::vector<MetricsRow>& rows);

struct TrainResult {
  MatTAModel model;
  std::vector<MetricsRow> rows;
  Checkpoint checkpoint;
};

/// One training run of the MatTA loop for a single seed.
///
/// Each step samples a batch, forms ωᵀ[L_S, L_TA, L_D] with the curriculum
/// weight in place of w_d, back-propagates once and steps every parameter
/// tensor once. A metrics row is logged after step t when (t+1) is a
/// multiple of eval_every and after the final step. Before the final
/// evaluation the weights are rounded to float32, so the last row describes
/// exactly the checkpointed model.
TrainResult run_train(const RunConfig& config, std::uint64_t seed);

// Trains every seed in the config and writes metrics.csv and
// checkpoint.matt under output_dir (or output_dir/seed-<s> for several seeds).
std::vector<std::string> run_train_to_disk(const RunConfig& config);

struct FrontierRow {
  std::string label;
  std::optional<std::size_t> k;
  ParamCounts params;
  EvalMetrics metrics;
};

std::vector<FrontierRow> run_frontier(const Checkpoint& ckpt, const std::vector<std::size_t>& ks);
std::string frontier_csv(const std::vector<FrontierRow>& rows);

struct AblationRow {
  std::string grid;  // "optimizer" or "sharing"
  std::string cell;
  std::uint64_t seed = 0;
  EvalMetrics student;
  EvalMetrics ta;
  double ce_improvement_pct = 0.0;       // vs baseline, negative is better
  double aucloss_improvement_pct = 0.0;
};

// Cells of the optimizer x MatTA grid and the sharing comparison.
struct AblationCell {
  std::string grid;
  std::string cell;
  RunConfig config;
};

std::vector<AblationCell> ablation_cells(const RunConfig& base);
std::vector<AblationRow> run_ablation_grid(const RunConfig& base);
std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string ablation_summary_csv(const std::vector<AblationRow>& rows);

struct PreconditionerDump {
  std::string layer;
  std::string side;  // "left" or "right"
  PreconditionerReport report;
};

// Report for the joint preconditioner of a nested dense layer, e.g.
// "blocks.0.up" (hidden units index the right factor) or "blocks.0.down"
// (left factor). The nested split is the Student width h_s.
PreconditionerDump dump_preconditioner(const Checkpoint& ckpt, const std::string& layer);
std::string block_stats_csv_header();
std::string block_stats_csv_row(const std::string& layer, const std::string& side, const BlockStats& s);

}  // namespace matta
