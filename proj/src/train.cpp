#include "matta/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "matta/errors.hpp"
#include "matta/graph.hpp"
#include "matta/losses.hpp"

namespace matta {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

json metrics_json(const EvalMetrics& m) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"cross_entropy", num(m.cross_entropy)},
          {"accuracy", num(m.accuracy)},
          {"auroc", num(m.auroc)},
          {"aucloss", num(m.aucloss)}};
}

std::string last_finite_summary(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) return "no metrics logged yet";
  const MetricsRow& r = rows.back();
  return "last logged step " + std::to_string(r.step) + ": loss_total=" + fmt(r.loss_total) +
         " eval_ce_s=" + fmt(r.eval_s.cross_entropy) + " eval_ce_ta=" + fmt(r.eval_ta.cross_entropy);
}

}  // namespace

std::vector<PrecondGroup> make_param_groups(MatTAModel& model, const OptimConfig& optim) {
  const auto student = model.student_params();
  const double ta_scale = optim.ta_lr ? *optim.ta_lr / optim.hyper.lr : 1.0;
  auto slot = [&](Tensor& t, std::size_t r0, std::size_t c0) {
    return ParamSlot{&t, r0, c0, student.contains(&t) ? 1.0 : ta_scale};
  };
  auto single = [&](const std::string& name, Tensor& t) {
    return PrecondGroup{name, t.rows(), t.cols(), {slot(t, 0, 0)}};
  };

  std::vector<PrecondGroup> groups;
  if (optim.preconditioning == Preconditioning::per_tensor) {
    for (auto& [name, t] : model.named_params_mut()) groups.push_back(single(name, *t));
    return groups;
  }
  std::map<std::string, Tensor*> by_name;
  for (auto& [name, t] : model.named_params_mut()) by_name[name] = t;

  groups.push_back(single("encoder", *by_name.at("encoder")));
  if (by_name.contains("ta_encoder")) groups.push_back(single("ta_encoder", *by_name.at("ta_encoder")));
  for (std::size_t i = 0; i < model.blocks().size(); ++i) {
    for (const char* part : {"up", "down"}) {
      const std::string p = "blocks." + std::to_string(i) + "." + part;
      const NestedBlock& block = model.blocks()[i];
      const NestedDense& layer = std::string(part) == "up" ? block.up : block.down;
      const bool has_copy = by_name.contains(p + ".w_s_ta");
      Tensor& narrow = *by_name.at(p + (has_copy ? ".w_s_ta" : ".w_s"));
      groups.push_back(PrecondGroup{p,
                                    layer.m_ta,
                                    layer.n_ta,
                                    {slot(narrow, 0, 0), slot(*by_name.at(p + ".w_ta1"), layer.m_s, 0),
                                     slot(*by_name.at(p + ".w_ta2"), 0, layer.n_s)}});
      if (has_copy) groups.push_back(single(p + ".w_s", *by_name.at(p + ".w_s")));
    }
  }
  groups.push_back(single("readout", *by_name.at("readout")));
  if (by_name.contains("ta_readout")) groups.push_back(single("ta_readout", *by_name.at("ta_readout")));
  return groups;
}

std::string metrics_csv_header() {
  return "step,wall_ms,w_d_effective,loss_s,loss_ta,loss_d,loss_total,eval_ce_s,eval_ce_ta,"
         "eval_auroc_s,eval_auroc_ta,eval_aucloss_s,eval_aucloss_ta\n";
}

std::string metrics_csv_row(const MetricsRow& r) {
  return std::to_string(r.step) + "," + fmt(r.wall_ms) + "," + fmt(r.w_d_effective) + "," + fmt(r.loss_s) + "," +
         fmt(r.loss_ta) + "," + fmt(r.loss_d) + "," + fmt(r.loss_total) + "," + fmt(r.eval_s.cross_entropy) + "," +
         fmt(r.eval_ta.cross_entropy) + "," + fmt(r.eval_s.auroc) + "," + fmt(r.eval_ta.auroc) + "," +
         fmt(r.eval_s.aucloss) + "," + fmt(r.eval_ta.aucloss) + "\n";
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = metrics_csv_header();
  for (const auto& r : rows) out += metrics_csv_row(r);
  return out;
}

TrainResult run_train(const RunConfig& config, std::uint64_t seed) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const SyntheticTask task = SyntheticTask::create(config.task);
  Rng init = Rng::stream(seed, kInitStream);
  Rng data = Rng::stream(seed, kTrainStream);
  MatTAModel model = MatTAModel::create(config.model, config.sharing, config.activation, init);
  Optimizer optimizer(config.optim.method, config.optim.hyper, make_param_groups(model, config.optim));
  const EvalSet eval_set = make_eval_set(task, config.eval_n, seed);

  std::vector<MetricsRow> rows;
  auto log_row = [&](MetricsRow row) {
    auto [logits_s, logits_ta] = model.logits(eval_set.x);
    row.eval_s = evaluate([&](const Tensor&) { return logits_s; }, eval_set);
    row.eval_ta = evaluate([&](const Tensor&) { return logits_ta; }, eval_set);
    if (config.record_wall_time) {
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    rows.push_back(row);
  };

  for (std::size_t t = 0; t < config.steps; ++t) {
    MetricsRow row;
    try {
      const Batch batch = task.sample_batch(data, config.batch_size);
      Graph graph;
      ParamBinder params(graph);
      auto [logits_s, logits_ta] = model.forward(params, graph.leaf(batch.x));
      Var l_s = soft_cross_entropy(logits_s, batch.y);
      Var l_ta = soft_cross_entropy(logits_ta, batch.y);
      Var l_d = distill_loss(logits_s, logits_ta);
      LossWeights w = config.loss;
      w.w_d = curriculum_weight(t, config.curriculum, config.loss.w_d);
      Var total = composite_loss(w, l_s, l_ta, l_d);

      row.step = t;
      row.w_d_effective = w.w_d;
      row.loss_s = l_s.value().item();
      row.loss_ta = l_ta.value().item();
      row.loss_d = l_d.value().item();
      row.loss_total = total.value().item();
      if (!std::isfinite(row.loss_total)) {
        throw NumericalError("non-finite loss");
      }
      graph.backward(total);
      optimizer.step([&](const Tensor& p) { return params.grad(p); });
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(t) + ": " + e.what() + " (" + last_finite_summary(rows) + ")");
    }

    const bool last = t + 1 == config.steps;
    if (last) {
      for (auto& [name, p] : model.named_params_mut()) *p = round_to_f32(*p);
    }
    if (last || (t + 1) % config.eval_every == 0) log_row(row);
  }

  json summary = json::object();
  if (!rows.empty()) {
    summary = {{"step", rows.back().step},
               {"student", metrics_json(rows.back().eval_s)},
               {"ta", metrics_json(rows.back().eval_ta)}};
  }
  // Tensors in the checkpoint are stored at f32; the returned model matches.
  if (config.steps == 0) {
    for (auto& [name, p] : model.named_params_mut()) *p = round_to_f32(*p);
  }
  TrainResult result{model, rows, {}};
  result.checkpoint = make_checkpoint(config, seed, model, &optimizer, config.steps, summary);
  return result;
}

std::vector<std::string> run_train_to_disk(const RunConfig& config) {
  namespace fs = std::filesystem;
  std::vector<std::string> dirs;
  for (std::uint64_t seed : config.seeds) {
    fs::path dir = config.output_dir;
    if (config.seeds.size() > 1) dir /= "seed-" + std::to_string(seed);
    fs::create_directories(dir);
    TrainResult r = run_train(config, seed);
    write_file(dir / "metrics.csv", metrics_csv(r.rows));
    save_checkpoint((dir / "checkpoint.matt").string(), r.checkpoint);
    dirs.push_back(dir.string());
  }
  return dirs;
}

std::vector<FrontierRow> run_frontier(const Checkpoint& ckpt, const std::vector<std::size_t>& ks) {
  const RunConfig cfg = checkpoint_config(ckpt);
  const MatTAModel model = model_from_checkpoint(ckpt);
  const SyntheticTask task = SyntheticTask::create(cfg.task);
  const EvalSet eval_set = make_eval_set(task, cfg.eval_n, cfg.seeds.front());
  std::vector<FrontierRow> rows;
  for (const ExtractConfig& ec : enumerate_grid(cfg.model, ks)) {
    const StandaloneModel sub = materialize(model, ec);
    FrontierRow row;
    row.label = ec.label;
    row.k = ec.k;
    row.params = extracted_param_count(ec, cfg.model);
    row.metrics = evaluate([&](const Tensor& x) { return sub.forward(x); }, eval_set);
    rows.push_back(row);
  }
  return rows;
}

std::string frontier_csv(const std::vector<FrontierRow>& rows) {
  std::string out = "label,k,param_count_total,param_count_nonembedding,eval_ce,eval_auroc,eval_aucloss\n";
  for (const auto& r : rows) {
    out += r.label + "," + (r.k ? std::to_string(*r.k) : "") + "," + std::to_string(r.params.total) + "," +
           std::to_string(r.params.nonembedding) + "," + fmt(r.metrics.cross_entropy) + "," + fmt(r.metrics.auroc) +
           "," + fmt(r.metrics.aucloss) + "\n";
  }
  return out;
}

std::vector<AblationCell> ablation_cells(const RunConfig& base) {
  RunConfig shampoo = base;
  shampoo.optim.method = Method::shampoo;
  RunConfig first = base;
  first.optim.method = base.ablation.first_order;
  first.optim.hyper.lr = base.ablation.first_order_lr;
  first.optim.ta_lr.reset();

  RunConfig shared = shampoo;
  shared.sharing = Sharing::shared;
  RunConfig unshared = shampoo;
  unshared.sharing = Sharing::unshared_blocks;

  return {{"optimizer", "baseline", student_alone(first)},
          {"optimizer", "shampoo-only", student_alone(shampoo)},
          {"optimizer", "matta-first-order", first},
          {"optimizer", "matta-shampoo", shampoo},
          {"sharing", "shared", shared},
          {"sharing", "unshared-blocks", unshared}};
}

std::vector<AblationRow> run_ablation_grid(const RunConfig& base) {
  validate(base);
  const auto cells = ablation_cells(base);
  std::vector<AblationRow> rows;
  for (std::uint64_t seed : base.seeds) {
    std::vector<AblationRow> per_seed;
    for (const auto& cell : cells) {
      TrainResult r = run_train(cell.config, seed);
      AblationRow row;
      row.grid = cell.grid;
      row.cell = cell.cell;
      row.seed = seed;
      if (!r.rows.empty()) {
        row.student = r.rows.back().eval_s;
        row.ta = r.rows.back().eval_ta;
      }
      per_seed.push_back(row);
    }
    const AblationRow& baseline = per_seed.front();
    for (auto& row : per_seed) {
      row.ce_improvement_pct = 100.0 * (row.student.cross_entropy - baseline.student.cross_entropy) /
                               baseline.student.cross_entropy;
      row.aucloss_improvement_pct =
          100.0 * (row.student.aucloss - baseline.student.aucloss) / baseline.student.aucloss;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out =
      "grid,cell,seed,eval_ce_s,eval_aucloss_s,eval_ce_ta,eval_aucloss_ta,ce_improvement_pct,"
      "aucloss_improvement_pct\n";
  for (const auto& r : rows) {
    out += r.grid + "," + r.cell + "," + std::to_string(r.seed) + "," + fmt(r.student.cross_entropy) + "," +
           fmt(r.student.aucloss) + "," + fmt(r.ta.cross_entropy) + "," + fmt(r.ta.aucloss) + "," +
           fmt(r.ce_improvement_pct) + "," + fmt(r.aucloss_improvement_pct) + "\n";
  }
  return out;
}

std::string ablation_summary_csv(const std::vector<AblationRow>& rows) {
  struct Acc {
    std::string grid;
    double ce = 0.0, auc = 0.0;
    std::size_t n = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const auto& r : rows) {
    const std::string key = r.grid + "," + r.cell;
    if (!acc.contains(key)) order.push_back(key);
    Acc& a = acc[key];
    a.ce += r.ce_improvement_pct;
    a.auc += r.aucloss_improvement_pct;
    ++a.n;
  }
  auto mean_of = [&](const std::string& key, bool ce) {
    const Acc& a = acc.at(key);
    return (ce ? a.ce : a.auc) / static_cast<double>(a.n);
  };
  std::string out = "grid,cell,mean_ce_improvement_pct,mean_aucloss_improvement_pct,n_seeds\n";
  for (const auto& key : order) {
    out += key + "," + fmt(mean_of(key, true)) + "," + fmt(mean_of(key, false)) + "," + std::to_string(acc[key].n) +
           "\n";
  }
  // Interaction: combined improvement minus the sum of the individual ones.
  // More negative than zero means the two interventions are super-additive.
  const std::string both = "optimizer,matta-shampoo", sh = "optimizer,shampoo-only", mt = "optimizer,matta-first-order";
  if (acc.contains(both) && acc.contains(sh) && acc.contains(mt)) {
    out += "optimizer,interaction," + fmt(mean_of(both, true) - mean_of(sh, true) - mean_of(mt, true)) + "," +
           fmt(mean_of(both, false) - mean_of(sh, false) - mean_of(mt, false)) + "," + std::to_string(acc[both].n) +
           "\n";
  }
  return out;
}

PreconditionerDump dump_preconditioner(const Checkpoint& ckpt, const std::string& layer) {
  const RunConfig cfg = checkpoint_config(ckpt);
  const bool up = layer.size() > 3 && layer.ends_with(".up");
  const bool down = layer.size() > 5 && layer.ends_with(".down");
  if (!up && !down) {
    throw ContractError("dump-preconditioner: layer must name a nested dense layer such as blocks.0.up or blocks.0.down");
  }
  PreconditionerDump d;
  d.layer = layer;
  d.side = up ? "right" : "left";
  const std::string name = "optim." + layer + "." + d.side;
  const Tensor* acc = ckpt.find(name);
  if (!acc) {
    std::string available;
    for (const auto& t : ckpt.tensors)
      if (t.name.starts_with("optim.")) available += (available.empty() ? "" : ", ") + t.name;
    throw CheckpointError("checkpoint has no joint preconditioner '" + name + "' (available: " +
                          (available.empty() ? "none; train with optimizer.method=shampoo" : available) + ")");
  }
  d.report = preconditioner_report(*acc, cfg.model.h_s);
  return d;
}

std::string block_stats_csv_header() {
  return "layer,side,dim,split,mean_abs_student,mean_abs_extra,mean_abs_within,mean_abs_cross,within_cross_ratio,"
         "zero_diagonal\n";
}

std::string block_stats_csv_row(const std::string& layer, const std::string& side, const BlockStats& s) {
  return layer + "," + side + "," + std::to_string(s.dim) + "," + std::to_string(s.split) + "," +
         fmt(s.mean_abs_student) + "," + fmt(s.mean_abs_extra) + "," + fmt(s.mean_abs_within) + "," +
         fmt(s.mean_abs_cross) + "," + fmt(s.within_cross_ratio) + "," + (s.zero_diagonal ? "1" : "0") + "\n";
}

}  // namespace matta
