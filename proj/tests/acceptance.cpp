// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bowl.hpp"
#include "matta/checkpoint.hpp"
#include "matta/errors.hpp"
#include "matta/extract.hpp"
#include "matta/linalg.hpp"
#include "matta/losses.hpp"
#include "matta/optim.hpp"
#include "matta/train.hpp"
#include "oracles.hpp"

using namespace matta;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

// Runs the CLI with stdout/stderr captured; returns the exit status.
int run_cli(const std::string& matta, const std::string& args, const fs::path& log) {
  const std::string cmd = "\"" + matta + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

double worst_fd_error(const std::function<Var(Var)>& op, const Tensor& x, Rng& rng, std::size_t& checked) {
  Tensor probe = x;
  {
    Graph g;
    probe = oracle::random(op(g.leaf(x)).value().rows(), op(g.leaf(x)).value().cols(), rng);
  }
  auto scalar = [&](const Tensor& at) {
    Graph g;
    return sum(mul(op(g.leaf(at)), g.leaf(probe))).value().item();
  };
  Graph g;
  Var leaf = g.leaf(x);
  g.backward(sum(mul(op(leaf), g.leaf(probe))));
  const Tensor analytic = g.grad_or_zero(leaf);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double numeric = oracle::central_difference(scalar, x, i, 1e-5);
    worst = std::max(worst, oracle::relative_error(analytic.data()[i], numeric));
    ++checked;
  }
  return worst;
}

ModelDims toy_dims() {
  ModelDims d;
  d.d_in = 8;
  d.d = 8;
  d.h_s = 8;
  d.h_ta = 16;
  d.n_shared = 2;
  d.n_extra = 1;
  d.classes = 2;
  return d;
}

// 1 --------------------------------------------------------------------------
Outcome gradient_suite() {
  Rng rng(101);
  const Tensor x = oracle::random(3, 4, rng), w = oracle::random(4, 5, rng), other = oracle::random(3, 4, rng);
  Tensor away = x;
  for (auto& v : away.data()) v = v >= 0 ? v + 0.01 : v - 0.01;
  std::size_t op_coords = 0;
  double op_worst = 0.0;
  const std::vector<std::pair<std::function<Var(Var)>, const Tensor*>> ops{
      {[&](Var v) { return matmul(v, v.graph->leaf(w)); }, &x},
      {[&](Var v) { return matmul(v.graph->leaf(x), v); }, &w},
      {[&](Var v) { return add(v, v.graph->leaf(other)); }, &x},
      {[&](Var v) { return mul(v, v.graph->leaf(other)); }, &x},
      {[](Var v) { return scale(v, -1.7); }, &x},
      {[](Var v) { return slice_cols(v, 1, 2); }, &x},
      {[](Var v) { return split_cols(v, 3).first; }, &x},
      {[](Var v) { return concat_cols(v, scale(v, 2.0)); }, &x},
      {[](Var v) { return activation(v, Activation::tanh); }, &x},
      {[](Var v) { return activation(v, Activation::gelu_tanh); }, &x},
      {[](Var v) { return activation(v, Activation::relu); }, &away},
      {[](Var v) { return log_softmax_rows(v); }, &x},
      {[](Var v) { return exp(v); }, &x},
      {[](Var v) { return sum(v); }, &x},
  };
  for (const auto& [op, at] : ops) op_worst = std::max(op_worst, worst_fd_error(op, *at, rng, op_coords));

  const ModelDims dims = toy_dims();
  MatTAModel m = MatTAModel::create(dims, Sharing::shared, Activation::gelu_tanh, rng);
  const Tensor input = oracle::random(4, dims.d_in, rng);
  const Tensor y = softmax_rows(oracle::random(4, 2, rng));
  const LossWeights weights{1.0, 1.0, 1.0};
  auto loss_of = [&](ParamBinder& p) {
    Graph& g = p.graph();
    auto [ls, lt] = m.forward(p, g.leaf(input));
    return composite_loss(weights, soft_cross_entropy(ls, y), soft_cross_entropy(lt, y), distill_loss(ls, lt));
  };
  Graph g;
  ParamBinder p(g);
  g.backward(loss_of(p));
  // The numeric side treats the distillation target as the constant it is
  // for differentiation.
  const Tensor p_ta = softmax_rows(m.logits(input).second);
  auto fixed_target_loss = [&](ParamBinder& pp) {
    Graph& gg = pp.graph();
    auto [ls, lt] = m.forward(pp, gg.leaf(input));
    return composite_loss(weights, soft_cross_entropy(ls, y), soft_cross_entropy(lt, y), soft_cross_entropy(ls, p_ta));
  };
  std::vector<std::pair<Tensor*, Tensor>> analytic;
  for (auto& [name, t] : m.named_params_mut()) {
    if (t->size() == 0) continue;
    analytic.emplace_back(t, p.grad(*t) ? *p.grad(*t) : Tensor::zeros(t->rows(), t->cols()));
  }
  std::size_t model_coords = 0;
  double model_worst = 0.0;
  for (int k = 0; k < 150; ++k) {
    auto& [t, grad] = analytic[rng.below(analytic.size())];
    const std::size_t i = rng.below(t->size());
    const double orig = t->data()[i];
    auto at = [&](double v) {
      t->data()[i] = v;
      Graph gg;
      ParamBinder pp(gg);
      return fixed_target_loss(pp).value().item();
    };
    const double numeric = (at(orig + 1e-5) - at(orig - 1e-5)) / 2e-5;
    t->data()[i] = orig;
    model_worst = std::max(model_worst, oracle::relative_error(grad.data()[i], numeric));
    ++model_coords;
  }
  const bool pass = op_worst <= 1e-5 && model_worst <= 1e-5 && model_coords >= 100;
  return {pass, std::to_string(ops.size()) + " ops / " + std::to_string(op_coords) + " coords worst " + num(op_worst) +
                    "; composite loss " + std::to_string(model_coords) + " coords worst " + num(model_worst)};
}

// 2 --------------------------------------------------------------------------
Outcome containment() {
  Rng rng(202);
  int mismatches = 0, empty_ta1 = 0, empty_ta2 = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m_s = 1 + rng.below(32), n_s = 1 + rng.below(32);
    std::size_t m_ta = m_s + rng.below(33 - m_s), n_ta = n_s + rng.below(33 - n_s);
    if (trial % 10 == 0) m_ta = m_s;
    if (trial % 10 == 1) n_ta = n_s;
    empty_ta1 += m_ta == m_s;
    empty_ta2 += n_ta == n_s;
    const NestedDense layer = nested_dense_new(m_s, m_ta, n_s, n_ta, true, rng);
    const Tensor x = oracle::random(1 + rng.below(8), m_s, rng);
    Graph g;
    ParamBinder p(g);
    mismatches += !(nested_dense_student(layer, p, g.leaf(x)).value() == oracle::plain_dense(x, layer.w_s));
  }
  return {mismatches == 0 && empty_ta1 > 0 && empty_ta2 > 0,
          "200 layers, " + std::to_string(mismatches) + " mismatches, empty w_ta1 " + std::to_string(empty_ta1) +
              ", empty w_ta2 " + std::to_string(empty_ta2)};
}

// 3 --------------------------------------------------------------------------
bool exactly_zero(const ParamBinder& p, const Tensor& t) {
  const Tensor* g = p.grad(t);
  if (!g) return true;
  for (double v : g->data())
    if (v != 0.0) return false;
  return true;
}

Outcome stop_gradient_exact() {
  Rng rng(303);
  const ModelDims dims = toy_dims();
  const LossWeights only_d{0.0, 0.0, 1.0};
  std::size_t checked = 0, nonzero = 0, student_nonzero = 0;
  for (Sharing sharing : {Sharing::shared, Sharing::fully_unshared}) {
    const MatTAModel m = MatTAModel::create(dims, sharing, Activation::gelu_tanh, rng);
    const Tensor x = oracle::random(5, dims.d_in, rng);
    Graph g;
    ParamBinder p(g);
    auto [ls, lt] = m.forward(p, g.leaf(x));
    g.backward(composite_loss(only_d, soft_cross_entropy(ls, softmax_rows(ls.value())),
                              soft_cross_entropy(lt, softmax_rows(lt.value())), distill_loss(ls, lt)));
    const auto theta = m.student_params();
    std::set<const Tensor*> zero_set;
    for (const auto& [name, t] : m.named_params()) {
      if (!theta.contains(t)) zero_set.insert(t);
    }
    if (sharing == Sharing::fully_unshared) {
      for (const Tensor* t : m.ta_path_params()) zero_set.insert(t);
    }
    for (const Tensor* t : zero_set) {
      ++checked;
      nonzero += !exactly_zero(p, *t);
    }
    for (const Tensor* t : theta) student_nonzero += !exactly_zero(p, *t);
  }
  return {nonzero == 0 && student_nonzero > 0,
          std::to_string(checked) + " TA-side tensors, " + std::to_string(nonzero) +
              " with nonzero gradient; Student tensors with gradient " + std::to_string(student_nonzero)};
}

// 4 --------------------------------------------------------------------------
Outcome extraction_identity() {
  Rng rng(404);
  const RunConfig defaults;
  const ModelDims dims = defaults.model;
  const MatTAModel m = MatTAModel::create(dims, Sharing::shared, Activation::gelu_tanh, rng);
  const StandaloneModel s = materialize(m, student_config(dims));
  const StandaloneModel t = materialize(m, ta_config(dims));
  double worst = 0.0;
  for (int batch = 0; batch < 100; ++batch) {
    const Tensor x = oracle::random(1 + rng.below(32), dims.d_in, rng);
    auto [ls, lt] = m.logits(x);
    worst = std::max({worst, max_abs_diff(s.forward(x), ls), max_abs_diff(t.forward(x), lt)});
  }
  std::vector<std::size_t> ks;
  for (std::size_t k = 0; k <= dims.n_blocks(); ++k) ks.push_back(k);
  bool increasing = true;
  std::size_t prev = 0;
  std::string counts;
  for (const auto& c : enumerate_grid(dims, ks)) {
    if (!c.k) continue;
    const std::size_t n = extracted_param_count(c, dims).total;
    increasing = increasing && (*c.k == 0 || n > prev);
    prev = n;
    counts += (counts.empty() ? "" : "<") + std::to_string(n);
  }
  return {worst == 0.0 && increasing, "100 batches max |Δ| " + num(worst) + "; wnw counts " + counts};
}

// 5 --------------------------------------------------------------------------
Outcome shampoo_algebra() {
  Rng rng(505);
  double worst_ratio = 0.0;
  for (std::size_t k : {1u, 2u, 5u, 12u, 25u, 50u}) {
    for (double cond : {1.0, 1e3, 1e6}) {
      const Tensor a = bowl::rotated_spd(k == 1 ? 2 : k, cond, rng);
      const Tensor sub_a = k == 1 ? Tensor{{a(0, 0)}} : a;
      const double eps = 1e-12;
      const Tensor x = inv_pth_root(sub_a, 4, eps);
      Tensor shifted = sub_a;
      for (std::size_t i = 0; i < k; ++i) shifted(i, i) += eps;
      const Tensor x2 = oracle::naive_matmul(x, x);
      const Tensor r = sub(oracle::naive_matmul(oracle::naive_matmul(x2, x2), shifted), Tensor::identity(k));
      worst_ratio = std::max(worst_ratio, frobenius_norm(r) / (1e-8 * static_cast<double>(k)));
    }
  }

  double kron_worst = 0.0;
  for (std::size_t m = 1; m <= 4; ++m) {
    for (std::size_t n = 1; n <= 4; ++n) {
      const double eps = 1e-3;
      ShampooState st = shampoo_new(m, n, 1, eps);
      Tensor g;
      for (int t = 0; t < 3; ++t) {
        g = oracle::random(m, n, rng);
        shampoo_accumulate(st, g);
      }
      Tensor w = Tensor::zeros(m, n);
      shampoo_step(st, w, g, 1.0);
      Tensor l = st.left, r = st.right;
      for (std::size_t i = 0; i < m; ++i) l(i, i) += eps;
      for (std::size_t i = 0; i < n; ++i) r(i, i) += eps;
      const auto want = oracle::matvec(inv_pth_root(oracle::kron(l, r), 4, 0.0), oracle::vec(g));
      for (std::size_t i = 0; i < want.size(); ++i) kron_worst = std::max(kron_worst, std::abs(-want[i] - w.data()[i]));
    }
  }

  int scalar_bad = 0;
  for (int e = -10; e <= 10; ++e) {
    for (double sign : {1.0, -1.0}) {
      const double g = sign * std::ldexp(1.0, 2 * e);
      ShampooState st = shampoo_new(1, 1, 1, 0.0);
      Tensor w{{0.0}};
      shampoo_accumulate(st, Tensor{{g}});
      shampoo_step(st, w, Tensor{{g}}, 0.25);
      scalar_bad += w.item() != -0.25 * sign;
    }
  }
  const bool pass = worst_ratio <= 1.0 && kron_worst <= 1e-8 && scalar_bad == 0;
  return {pass, "root residual / bound " + num(worst_ratio) + "; Kronecker max |Δ| " + num(kron_worst) +
                    "; scalar sign-step mismatches " + std::to_string(scalar_bad) + "/42"};
}

// 6 --------------------------------------------------------------------------
Outcome optimizer_benefit() {
  const auto start = std::chrono::steady_clock::now();
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const bowl::Problem pr = bowl::Problem::create(6, 6, 1e3, seed);
    const std::size_t s = bowl::best_steps(pr, Method::shampoo, 1e-6, 20000);
    const std::size_t a = bowl::best_steps(pr, Method::adagrad, 1e-6, 20000);
    wins += s < a;
    detail += (detail.empty() ? "" : " ") + std::to_string(s) + "/" + std::to_string(a);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {wins == 5 && secs < 30.0,
          "steps shampoo/adagrad " + detail + "; " + std::to_string(wins) + "/5 wins; " + num(secs) + " s"};
}

// 7 --------------------------------------------------------------------------
struct BenefitRun {
  Outcome outcome;
  fs::path checkpoint;
  fs::path metrics;
};

BenefitRun matta_benefit(const fs::path& work) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg;
  int student_wins = 0, ta_wins = 0;
  std::string detail;
  BenefitRun out;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TrainResult r = run_train(cfg, seed);
    const TrainResult b = run_train(student_alone(cfg), seed);
    const double s = r.rows.back().eval_s.cross_entropy, ta = r.rows.back().eval_ta.cross_entropy;
    const double base = b.rows.back().eval_s.cross_entropy;
    student_wins += s < base;
    ta_wins += ta < s;
    detail += " seed" + std::to_string(seed) + "(S " + num(s) + " TA " + num(ta) + " base " + num(base) + ")";
    if (seed == 1) {
      out.checkpoint = work / "benefit-seed1.matt";
      out.metrics = work / "benefit-seed1.csv";
      save_checkpoint(out.checkpoint.string(), r.checkpoint);
      write_file(out.metrics, metrics_csv(r.rows));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.outcome = {student_wins >= 4 && ta_wins >= 4 && secs < 600.0,
                 "Student<baseline " + std::to_string(student_wins) + "/5, TA<Student " + std::to_string(ta_wins) +
                     "/5, " + num(secs) + " s;" + detail};
  return out;
}

// 8 --------------------------------------------------------------------------
Outcome preconditioner_structure(const std::string& matta, const fs::path& work, const fs::path& ckpt) {
  const fs::path dir = work / "precond";
  fs::remove_all(dir);
  const int code = run_cli(matta, "dump-preconditioner --checkpoint \"" + ckpt.string() +
                                      "\" --layer blocks.0.up --out \"" + dir.string() + "\"",
                           work / "dump.log");
  if (code != 0) return {false, "dump-preconditioner exited " + std::to_string(code) + ": " + read_file(work / "dump.log")};
  const fs::path pgm = dir / "blocks.0.up.right.pgm", csv = dir / "blocks.0.up.right.csv",
                 stats = dir / "preconditioner_stats.csv";
  for (const auto& p : {pgm, csv, stats}) {
    if (!fs::exists(p) || fs::file_size(p) == 0) return {false, "missing artifact " + p.string()};
  }
  const auto rows = parse_csv(read_file(stats));
  if (rows.size() < 2 || rows[0].size() < 9 || rows[0][4] != "mean_abs_student") return {false, "malformed stats csv"};
  const double student = std::stod(rows[1][4]), cross = std::stod(rows[1][7]), ratio = std::stod(rows[1][8]);
  return {std::isfinite(student) && student > 0.0,
          "mean |C| student " + num(student) + ", cross " + num(cross) + ", within/cross " + num(ratio)};
}

// 9 --------------------------------------------------------------------------
Outcome determinism(const std::string& matta, const fs::path& work) {
  RunConfig cfg;
  cfg.steps = 300;
  cfg.eval_every = 100;
  cfg.eval_n = 512;
  // Same config file twice into the same directory.
  cfg.output_dir = (work / "det").string();
  write_file(work / "det.json", to_json(cfg).dump(2));
  std::vector<std::string> csvs, ckpts;
  for (int run = 0; run < 2; ++run) {
    fs::remove_all(cfg.output_dir);
    const int code = run_cli(matta, "train --config \"" + (work / "det.json").string() + "\"", work / "train.log");
    if (code != 0) return {false, "train exited " + std::to_string(code) + ": " + read_file(work / "train.log")};
    csvs.push_back(read_file(work / "det" / "metrics.csv"));
    ckpts.push_back(read_file(work / "det" / "checkpoint.matt"));
  }
  const bool same_csv = !csvs[0].empty() && csvs[0] == csvs[1];
  const bool same_ckpt = !ckpts[0].empty() && ckpts[0] == ckpts[1];

  // Round trip: decoded tensors equal the in-memory run rounded to f32.
  const TrainResult r = run_train(cfg, cfg.seeds.front());
  const Checkpoint back = load_checkpoint((work / "det" / "checkpoint.matt").string());
  bool bitwise = back.tensors.size() == r.checkpoint.tensors.size();
  for (std::size_t i = 0; bitwise && i < back.tensors.size(); ++i) {
    bitwise = back.tensors[i].name == r.checkpoint.tensors[i].name &&
              back.tensors[i].value == round_to_f32(r.checkpoint.tensors[i].value);
  }

  const std::string& good = ckpts[0];
  std::string magic = good;
  magic[1] = 'Z';
  const std::vector<std::pair<std::string, std::string>> damaged{
      {"magic", magic}, {"truncated", good.substr(0, good.size() / 2)}, {"empty", ""}};
  int rejected = 0;
  std::string messages;
  for (const auto& [name, bytes] : damaged) {
    const fs::path p = work / ("bad-" + name + ".matt");
    write_file(p, bytes);
    const int code = run_cli(matta, "eval --checkpoint \"" + p.string() + "\"", work / "bad.log");
    const std::string log = read_file(work / "bad.log");
    if (code != 0 && log.find("checkpoint") != std::string::npos) ++rejected;
    messages += " [" + log.substr(0, log.find('\n')) + "]";
  }
  return {same_csv && same_ckpt && bitwise && rejected == 3,
          std::string("csv ") + (same_csv ? "identical" : "differs") + ", checkpoint " +
              (same_ckpt ? "identical" : "differs") + ", f32 round trip " + (bitwise ? "bitwise" : "MISMATCH") +
              ", corrupted rejected " + std::to_string(rejected) + "/3" + messages};
}

// 10 -------------------------------------------------------------------------
Outcome curriculum(const fs::path& metrics) {
  const RunConfig cfg;
  const auto rows = parse_csv(read_file(metrics));
  if (rows.size() < 2 || rows[0][2] != "w_d_effective") return {false, "metrics csv missing or malformed"};
  std::size_t before = 0, after = 0, bad = 0;
  double prev = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::size_t step = std::stoul(rows[i][0]);
    const double w = std::stod(rows[i][2]);
    if (step < cfg.curriculum.ramp_start) {
      ++before;
      bad += w != 0.0;
    }
    if (step >= cfg.curriculum.ramp_end) {
      ++after;
      bad += w != cfg.loss.w_d;
    }
    bad += w < prev;
    prev = w;
  }
  return {bad == 0 && before > 0 && after > 0,
          std::to_string(rows.size() - 1) + " rows (" + std::to_string(before) + " before ramp, " +
              std::to_string(after) + " after), violations " + std::to_string(bad)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string workdir = "acceptance_work";
  std::string matta = MATTA_CLI_PATH;
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Scratch directory for runs and artifacts");
  app.add_option("--matta", matta, "Path to the matta executable");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const fs::path work = fs::absolute(workdir);
  fs::create_directories(work);
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    if (!wanted(id)) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << " (" << num(secs) << " s): " << o.detail
              << std::endl;
  };

  report(1, "gradient suite", gradient_suite);
  report(2, "nested containment", containment);
  report(3, "stop-gradient", stop_gradient_exact);
  report(4, "extraction identity", extraction_identity);
  report(5, "Shampoo algebra", shampoo_algebra);
  report(6, "optimizer benefit", optimizer_benefit);

  // 8 and 10 read artifacts of the 7 run.
  BenefitRun benefit;
  report(7, "MatTA benefit", [&] {
    benefit = matta_benefit(work);
    return benefit.outcome;
  });
  report(8, "preconditioner structure", [&] {
    if (benefit.checkpoint.empty()) {
      RunConfig cfg;
      cfg.steps = 2000;
      const TrainResult r = run_train(cfg, 1);
      benefit.checkpoint = work / "structure.matt";
      benefit.metrics = work / "structure.csv";
      save_checkpoint(benefit.checkpoint.string(), r.checkpoint);
      write_file(benefit.metrics, metrics_csv(r.rows));
    }
    return preconditioner_structure(matta, work, benefit.checkpoint);
  });
  report(9, "determinism and persistence", [&] { return determinism(matta, work); });
  report(10, "curriculum", [&] {
    if (benefit.metrics.empty()) {
      RunConfig cfg;
      cfg.steps = 2000;
      cfg.eval_every = 50;
      benefit.metrics = work / "curriculum.csv";
      write_file(benefit.metrics, metrics_csv(run_train(cfg, 1).rows));
    }
    return curriculum(benefit.metrics);
  });
  return failures == 0 ? 0 : 1;
}
