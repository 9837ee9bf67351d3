#include "matta/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "matta/errors.hpp"

namespace matta {
namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects any key left unread.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = convert<T>(*it, key);
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const std::string& key = "") const {
    std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
    return p.empty() ? "config" : "config key '" + p + "'";
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError("unknown " + where(it.key()));
    }
  }

 private:
  template <typename T>
  T convert(const json& v, const char* key) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where(key) + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ConfigError(where(key) + ": expected a non-negative integer");
      }
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
      return v.get<T>();
    } else {
      if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
      return v.get<T>();
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum, typename Parse>
void read_enum(ObjectReader& r, const char* key, Enum& out, Parse parse) {
  std::string name;
  r.read(key, name);
  if (name.empty()) return;
  try {
    out = parse(name);
  } catch (const ContractError& e) {
    throw ConfigError(r.where(key) + ": " + e.what());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  ObjectReader root(j, "");

  if (const json* seed = root.child("seed")) {
    c.seeds.clear();
    auto one = [&](const json& v) {
      if (!v.is_number_unsigned()) throw ConfigError("config key 'seed': expected non-negative integers");
      c.seeds.push_back(v.get<std::uint64_t>());
    };
    if (seed->is_array()) {
      for (const auto& v : *seed) one(v);
    } else {
      one(*seed);
    }
  }

  if (const json* t = root.child("task")) {
    ObjectReader r(*t, "task");
    r.read("seed", c.task.seed);
    r.read("d_in", c.task.d_in);
    r.read("classes", c.task.classes);
    r.read("teacher_hidden", c.task.teacher_hidden);
    r.read("mixtures", c.task.mixtures);
    r.read("temperature", c.task.temperature);
    read_enum(r, "label_mode", c.task.label_mode, parse_label_mode);
    r.read("input_spread", c.task.input_spread);
    r.read("teacher_gain", c.task.teacher_gain);
    r.finish();
  }

  if (const json* m = root.child("model")) {
    ObjectReader r(*m, "model");
    r.read("d", c.model.d);
    r.read("h_s", c.model.h_s);
    r.read("h_ta", c.model.h_ta);
    r.read("n_shared", c.model.n_shared);
    r.read("n_extra", c.model.n_extra);
    read_enum(r, "activation", c.activation, parse_activation);
    read_enum(r, "sharing", c.sharing, parse_sharing);
    r.finish();
  }

  if (const json* l = root.child("loss")) {
    ObjectReader r(*l, "loss");
    r.read("w_s", c.loss.w_s);
    r.read("w_ta", c.loss.w_ta);
    r.read("w_d", c.loss.w_d);
    r.read("ramp_start", c.curriculum.ramp_start);
    r.read("ramp_end", c.curriculum.ramp_end);
    r.finish();
  }

  if (const json* o = root.child("optimizer")) {
    ObjectReader r(*o, "optimizer");
    read_enum(r, "method", c.optim.method, parse_method);
    r.read("lr", c.optim.hyper.lr);
    double ta_lr = -1.0;
    r.read("ta_lr", ta_lr);
    if (o->contains("ta_lr")) c.optim.ta_lr = ta_lr;
    r.read("epsilon", c.optim.hyper.epsilon);
    r.read("beta1", c.optim.hyper.beta1);
    r.read("beta2", c.optim.hyper.beta2);
    r.read("shampoo_epsilon", c.optim.hyper.shampoo_epsilon);
    r.read("update_interval", c.optim.hyper.update_interval);
    std::string precond;
    r.read("preconditioning", precond);
    if (precond == "joint") {
      c.optim.preconditioning = Preconditioning::joint;
    } else if (precond == "per-tensor") {
      c.optim.preconditioning = Preconditioning::per_tensor;
    } else if (!precond.empty()) {
      throw ConfigError("config key 'optimizer.preconditioning': expected 'joint' or 'per-tensor'");
    }
    r.finish();
  }

  if (const json* a = root.child("ablation")) {
    ObjectReader r(*a, "ablation");
    read_enum(r, "first_order", c.ablation.first_order, parse_method);
    r.read("first_order_lr", c.ablation.first_order_lr);
    r.finish();
  }

  root.read("steps", c.steps);
  root.read("batch_size", c.batch_size);
  root.read("eval_every", c.eval_every);
  root.read("eval_n", c.eval_n);
  root.read("output_dir", c.output_dir);
  root.read("record_wall_time", c.record_wall_time);
  root.finish();

  c.model.d_in = c.task.d_in;
  c.model.classes = c.task.classes;
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  require(!c.seeds.empty(), "config: 'seed' list is empty");
  require(c.task.classes >= 2, "config: task.classes must be >= 2");
  require(c.task.d_in >= 1 && c.task.teacher_hidden >= 1 && c.task.mixtures >= 1,
          "config: task.d_in, task.teacher_hidden and task.mixtures must be >= 1");
  require(c.task.temperature > 0.0, "config: task.temperature must be > 0");
  require(c.model.d >= 1 && c.model.h_s >= 1, "config: model.d and model.h_s must be >= 1");
  require(c.model.h_s <= c.model.h_ta, "config: model.h_s must be <= model.h_ta");
  require(c.model.d_in == c.task.d_in && c.model.classes == c.task.classes,
          "config: model input/output dims must match the task");
  require(c.loss.w_s >= 0.0 && c.loss.w_ta >= 0.0 && c.loss.w_d >= 0.0, "config: loss weights must be >= 0");
  require(c.loss.w_s > 0.0 || c.loss.w_ta > 0.0 || c.loss.w_d > 0.0, "config: loss weights are all zero");
  require(c.curriculum.ramp_start <= c.curriculum.ramp_end, "config: loss.ramp_start must be <= loss.ramp_end");
  require(c.optim.hyper.lr > 0.0, "config: optimizer.lr must be > 0");
  require(!c.optim.ta_lr || *c.optim.ta_lr > 0.0, "config: optimizer.ta_lr must be > 0");
  require(c.optim.hyper.epsilon >= 0.0 && c.optim.hyper.shampoo_epsilon >= 0.0,
          "config: optimizer epsilons must be >= 0");
  require(c.optim.hyper.beta1 >= 0.0 && c.optim.hyper.beta1 < 1.0 && c.optim.hyper.beta2 >= 0.0 &&
              c.optim.hyper.beta2 < 1.0,
          "config: optimizer betas must be in [0, 1)");
  require(c.optim.hyper.update_interval >= 1, "config: optimizer.update_interval must be >= 1");
  require(c.ablation.first_order != Method::shampoo, "config: ablation.first_order must be a first-order method");
  require(c.ablation.first_order_lr > 0.0, "config: ablation.first_order_lr must be > 0");
  require(c.batch_size >= 1, "config: batch_size must be >= 1");
  require(c.eval_every >= 1, "config: eval_every must be >= 1");
  require(c.eval_n >= 1, "config: eval_n must be >= 1");
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seeds.size() == 1 ? json(c.seeds.front()) : json(c.seeds);
  j["task"] = {{"seed", c.task.seed},
               {"d_in", c.task.d_in},
               {"classes", c.task.classes},
               {"teacher_hidden", c.task.teacher_hidden},
               {"mixtures", c.task.mixtures},
               {"temperature", c.task.temperature},
               {"label_mode", to_string(c.task.label_mode)},
               {"input_spread", c.task.input_spread},
               {"teacher_gain", c.task.teacher_gain}};
  j["model"] = {{"d", c.model.d},
                {"h_s", c.model.h_s},
                {"h_ta", c.model.h_ta},
                {"n_shared", c.model.n_shared},
                {"n_extra", c.model.n_extra},
                {"activation", to_string(c.activation)},
                {"sharing", to_string(c.sharing)}};
  j["loss"] = {{"w_s", c.loss.w_s},
               {"w_ta", c.loss.w_ta},
               {"w_d", c.loss.w_d},
               {"ramp_start", c.curriculum.ramp_start},
               {"ramp_end", c.curriculum.ramp_end}};
  j["optimizer"] = {{"method", to_string(c.optim.method)},
                    {"lr", c.optim.hyper.lr},
                    {"epsilon", c.optim.hyper.epsilon},
                    {"beta1", c.optim.hyper.beta1},
                    {"beta2", c.optim.hyper.beta2},
                    {"shampoo_epsilon", c.optim.hyper.shampoo_epsilon},
                    {"update_interval", c.optim.hyper.update_interval},
                    {"preconditioning",
                     c.optim.preconditioning == Preconditioning::joint ? "joint" : "per-tensor"}};
  if (c.optim.ta_lr) j["optimizer"]["ta_lr"] = *c.optim.ta_lr;
  j["ablation"] = {{"first_order", to_string(c.ablation.first_order)},
                   {"first_order_lr", c.ablation.first_order_lr}};
  j["steps"] = c.steps;
  j["batch_size"] = c.batch_size;
  j["eval_every"] = c.eval_every;
  j["eval_n"] = c.eval_n;
  j["output_dir"] = c.output_dir;
  j["record_wall_time"] = c.record_wall_time;
  return j;
}

RunConfig student_alone(const RunConfig& c) {
  RunConfig b = c;
  b.model.h_ta = b.model.h_s;
  b.model.n_extra = 0;
  b.sharing = Sharing::shared;
  b.loss = LossWeights{1.0, 0.0, 0.0};
  b.curriculum = Curriculum{};
  b.optim.ta_lr.reset();
  return b;
}

}  // namespace matta
