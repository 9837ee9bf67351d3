// Command-line front end: train, extract, eval, frontier, ablate and
// dump-preconditioner. Exit status is 0 on success, 1 on configuration or
// input errors and 2 on numerical failure.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matta/checkpoint.hpp"
#include "matta/errors.hpp"
#include "matta/extract.hpp"
#include "matta/train.hpp"

namespace fs = std::filesystem;
using namespace matta;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
    std::cout << "wrote " << out_path << "\n";
  }
}

Checkpoint standalone_checkpoint(const Checkpoint& source, const StandaloneModel& sub, const ExtractConfig& ec,
                                 const ParamCounts& counts) {
  Checkpoint out;
  out.config = source.config;
  out.final_step = source.final_step;
  nlohmann::json layout = nlohmann::json::array();
  out.tensors.push_back({"encoder", sub.encoder});
  for (std::size_t i = 0; i < sub.blocks.size(); ++i) {
    const auto& b = sub.blocks[i];
    const std::string p = "blocks." + std::to_string(i);
    out.tensors.push_back({p + ".up", b.up.weight});
    out.tensors.push_back({p + ".down", b.down.weight});
    layout.push_back({{"up_row_split", b.up.row_split},
                      {"down_row_split", b.down.row_split},
                      {"activation", to_string(b.act)}});
  }
  out.tensors.push_back({"readout", sub.readout});
  out.metrics = {{"label", ec.label},
                 {"param_count_total", counts.total},
                 {"param_count_nonembedding", counts.nonembedding},
                 {"blocks", layout}};
  if (ec.k) out.metrics["k"] = *ec.k;
  return out;
}

std::string eval_line(const std::string& label, const EvalMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n", label.c_str(), m.cross_entropy, m.accuracy,
                m.auroc, m.aucloss);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MatTA co-training, extraction and analysis"};
  app.require_subcommand(1);

  std::string config_path, ckpt_path, out, label, layer;
  std::vector<std::size_t> ks;

  auto* train = app.add_subcommand("train", "Train every seed of a config");
  train->add_option("--config", config_path, "JSON run config")->required();

  auto* extract = app.add_subcommand("extract", "Write wide-narrow-wide sub-models as standalone checkpoints");
  extract->add_option("--checkpoint", ckpt_path)->required();
  extract->add_option("--k", ks, "Number of wide blocks (repeatable)")->required()->delimiter(',');
  extract->add_option("--out", out, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate extracted sub-models on the held-out set");
  eval->add_option("--checkpoint", ckpt_path)->required();
  eval->add_option("--label", label, "student, ta or wnw-k<K>; default evaluates student and ta");

  auto* frontier = app.add_subcommand("frontier", "Cost/quality frontier over wide-narrow-wide configs");
  frontier->add_option("--checkpoint", ckpt_path)->required();
  frontier->add_option("--ks", ks, "Comma-separated k values")->required()->delimiter(',');
  frontier->add_option("--out", out, "CSV path (default stdout)");

  auto* ablate = app.add_subcommand("ablate", "Optimizer x MatTA grid and sharing ablation");
  ablate->add_option("--config", config_path)->required();

  auto* dump = app.add_subcommand("dump-preconditioner", "Correlation heatmap and block stats of a Shampoo factor");
  dump->add_option("--checkpoint", ckpt_path)->required();
  dump->add_option("--layer", layer, "Nested layer, e.g. blocks.0.up")->required();
  dump->add_option("--out", out, "Output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*train) {
      for (const auto& dir : run_train_to_disk(load_config(config_path))) std::cout << "wrote " << dir << "\n";
    } else if (*extract) {
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      const RunConfig cfg = checkpoint_config(ckpt);
      const MatTAModel model = model_from_checkpoint(ckpt);
      for (std::size_t k : ks) {
        const ExtractConfig ec = wide_narrow_wide_config(k, cfg.model);
        const StandaloneModel sub = materialize(model, ec);
        const ParamCounts counts = extracted_param_count(ec, cfg.model);
        const fs::path path = fs::path(out) / (ec.label + ".matt");
        fs::create_directories(out);
        save_checkpoint(path.string(), standalone_checkpoint(ckpt, sub, ec, counts));
        std::cout << "wrote " << path.string() << " params=" << counts.total
                  << " nonembedding=" << counts.nonembedding << "\n";
      }
    } else if (*eval) {
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      const RunConfig cfg = checkpoint_config(ckpt);
      const MatTAModel model = model_from_checkpoint(ckpt);
      const EvalSet set = make_eval_set(SyntheticTask::create(cfg.task), cfg.eval_n, cfg.seeds.front());
      std::vector<ExtractConfig> configs;
      if (label.empty()) {
        configs = {student_config(cfg.model), ta_config(cfg.model)};
      } else {
        configs = {config_from_label(label, cfg.model)};
      }
      std::cout << "label,eval_ce,eval_accuracy,eval_auroc,eval_aucloss\n";
      for (const auto& ec : configs) {
        const StandaloneModel sub = materialize(model, ec);
        std::cout << eval_line(ec.label, evaluate([&](const Tensor& x) { return sub.forward(x); }, set));
      }
    } else if (*frontier) {
      emit(out, frontier_csv(run_frontier(load_checkpoint(ckpt_path), ks)));
    } else if (*ablate) {
      const RunConfig cfg = load_config(config_path);
      const auto rows = run_ablation_grid(cfg);
      const fs::path dir = cfg.output_dir;
      write_text(dir / "ablation.csv", ablation_csv(rows));
      const std::string summary = ablation_summary_csv(rows);
      write_text(dir / "ablation_summary.csv", summary);
      std::cout << summary;
    } else if (*dump) {
      const PreconditionerDump d = dump_preconditioner(load_checkpoint(ckpt_path), layer);
      const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
      const std::string stem = layer + "." + d.side;
      write_text(dir / (stem + ".pgm"), heatmap_pgm(d.report.correlation));
      write_text(dir / (stem + ".csv"), matrix_csv(d.report.correlation));
      const std::string stats = block_stats_csv_header() + block_stats_csv_row(layer, d.side, d.report.stats);
      write_text(dir / "preconditioner_stats.csv", stats);
      std::cout << stats;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
