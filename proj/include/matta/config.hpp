#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "matta/losses.hpp"
#include "matta/nested.hpp"
#include "matta/optim.hpp"
#include "matta/task.hpp"

namespace matta {

// joint: a nested dense layer's w_s, w_ta1, w_ta2 share one Shampoo
// preconditioner over the assembled TA matrix. per_tensor: one each.
enum class Preconditioning { joint, per_tensor };

struct OptimConfig {
  Method method = Method::shampoo;
  OptimHyper hyper{.lr = 0.1, .shampoo_epsilon = 1.0};
  Preconditioning preconditioning = Preconditioning::joint;
  // Learning rate for tensors outside Θ; defaults to hyper.lr.
  std::optional<double> ta_lr;
};

struct AblationConfig {
  Method first_order = Method::adagrad;
  double first_order_lr = 0.05;
};

struct RunConfig {
  std::vector<std::uint64_t> seeds{1};
  TaskParams task;
  ModelDims model;  // d_in and classes mirror task
  Activation activation = Activation::gelu_tanh;
  Sharing sharing = Sharing::shared;
  LossWeights loss{1.0, 1.0, 3.0};
  Curriculum curriculum{2000, 8000};
  OptimConfig optim;
  std::size_t steps = 20000;
  std::size_t batch_size = 64;
  std::size_t eval_every = 1000;
  std::size_t eval_n = 4096;
  std::string output_dir = "runs/default";
  // Off by default so metrics files stay byte-reproducible.
  bool record_wall_time = false;
  AblationConfig ablation;
};

// Strict parse: unknown keys, wrong types and invalid values throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
void validate(const RunConfig& c);

// Same run with the TA collapsed onto the Student: h_ta = h_s, no exclusive
// blocks, ω = (1, 0, 0), no curriculum.
RunConfig student_alone(const RunConfig& c);

}  // namespace matta
