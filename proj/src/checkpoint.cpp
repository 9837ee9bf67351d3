#include "matta/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "matta/errors.hpp"

namespace matta {
namespace {

using nlohmann::json;

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(std::string_view s) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[i])) << (8 * i);
  return v;
}

void put_f32_le(std::string& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

float get_f32_le(const char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<float>(bits);
}

std::size_t align_up(std::size_t n, std::size_t a) { return (n + a - 1) / a * a; }

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t.value;
  return nullptr;
}

Tensor round_to_f32(const Tensor& t) {
  Tensor r = t;
  for (auto& v : r.data()) v = static_cast<double>(static_cast<float>(v));
  return r;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  json table = json::array();
  std::string data;
  for (const auto& nt : ckpt.tensors) {
    data.resize(align_up(data.size(), kTensorAlignment), '\0');
    const std::size_t offset = data.size();
    for (double v : nt.value.data()) put_f32_le(data, static_cast<float>(v));
    table.push_back({{"name", nt.name},
                     {"dtype", "f32"},
                     {"shape", {nt.value.rows(), nt.value.cols()}},
                     {"offset", offset},
                     {"byte_len", data.size() - offset}});
  }
  json header = {{"version", ckpt.version},
                 {"config", ckpt.config},
                 {"tensors", table},
                 {"final_step", ckpt.final_step},
                 {"metrics", ckpt.metrics}};
  std::string text = header.dump();
  const std::size_t prefix = kCheckpointMagic.size() + 8;
  text.resize(align_up(prefix + text.size(), kTensorAlignment) - prefix, ' ');

  std::string out(kCheckpointMagic);
  put_u64_le(out, text.size());
  out += text;
  out += data;
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  const std::size_t prefix = kCheckpointMagic.size() + 8;
  if (bytes.size() < prefix) throw CheckpointError("checkpoint truncated: file shorter than its fixed header");
  if (bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic) {
    throw CheckpointError("checkpoint has bad magic bytes (expected \"MATT1\\n\")");
  }
  const std::uint64_t header_len = get_u64_le(bytes.substr(kCheckpointMagic.size(), 8));
  if (header_len > bytes.size() - prefix) {
    throw CheckpointError("checkpoint truncated: header length " + std::to_string(header_len) +
                          " exceeds remaining " + std::to_string(bytes.size() - prefix) + " bytes");
  }
  json header;
  try {
    header = json::parse(bytes.substr(prefix, header_len));
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  const std::string_view data = bytes.substr(prefix + header_len);

  Checkpoint ckpt;
  try {
    ckpt.version = header.at("version").get<int>();
    if (ckpt.version != kCheckpointVersion) {
      throw CheckpointError("checkpoint version " + std::to_string(ckpt.version) + " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
    }
    ckpt.config = header.at("config");
    ckpt.final_step = header.at("final_step").get<std::size_t>();
    ckpt.metrics = header.value("metrics", json::object());

    std::vector<std::pair<std::size_t, std::size_t>> extents;
    for (const auto& entry : header.at("tensors")) {
      const std::string name = entry.at("name").get<std::string>();
      if (entry.at("dtype").get<std::string>() != "f32") {
        throw CheckpointError("tensor '" + name + "' has unsupported dtype " + entry.at("dtype").dump());
      }
      const auto& shape = entry.at("shape");
      if (!shape.is_array() || shape.size() != 2) throw CheckpointError("tensor '" + name + "' shape must be [rows, cols]");
      const std::size_t rows = shape[0].get<std::size_t>(), cols = shape[1].get<std::size_t>();
      const std::size_t offset = entry.at("offset").get<std::size_t>();
      const std::size_t byte_len = entry.at("byte_len").get<std::size_t>();
      if (byte_len != rows * cols * 4) {
        throw CheckpointError("tensor '" + name + "' byte_len " + std::to_string(byte_len) + " does not match shape [" +
                              std::to_string(rows) + "x" + std::to_string(cols) + "]");
      }
      if (offset % kTensorAlignment != 0) throw CheckpointError("tensor '" + name + "' offset is not 64-byte aligned");
      if (offset > data.size() || byte_len > data.size() - offset) {
        throw CheckpointError("checkpoint truncated: tensor '" + name + "' extends past end of data section");
      }
      extents.emplace_back(offset, byte_len);
      std::vector<double> values(rows * cols);
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_f32_le(data.data() + offset + 4 * i);
      try {
        ckpt.tensors.push_back({name, Tensor(rows, cols, std::move(values))});
      } catch (const NumericalError&) {
        throw CheckpointError("tensor '" + name + "' contains non-finite values");
      }
    }
    std::sort(extents.begin(), extents.end());
    for (std::size_t i = 1; i < extents.size(); ++i) {
      if (extents[i - 1].first + extents[i - 1].second > extents[i].first) {
        throw CheckpointError("checkpoint tensor table has overlapping extents");
      }
    }
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint header is malformed: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return decode_checkpoint(ss.str());
  } catch (const CheckpointError& e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

Checkpoint make_checkpoint(const RunConfig& config, std::uint64_t seed, const MatTAModel& model,
                           const Optimizer* optimizer, std::size_t final_step, const json& metrics) {
  Checkpoint ckpt;
  RunConfig echo = config;
  echo.seeds = {seed};
  ckpt.config = to_json(echo);
  for (const auto& [name, t] : model.named_params()) ckpt.tensors.push_back({name, *t});
  if (optimizer && optimizer->method() == Method::shampoo) {
    const auto& groups = optimizer->groups();
    const auto& states = optimizer->shampoo_states();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      ckpt.tensors.push_back({"optim." + groups[i].name + ".left", states[i].left});
      ckpt.tensors.push_back({"optim." + groups[i].name + ".right", states[i].right});
    }
  }
  ckpt.final_step = final_step;
  ckpt.metrics = metrics;
  return ckpt;
}

RunConfig checkpoint_config(const Checkpoint& ckpt) {
  try {
    return parse_config(ckpt.config);
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config echo is invalid: ") + e.what());
  }
}

std::uint64_t checkpoint_seed(const Checkpoint& ckpt) { return checkpoint_config(ckpt).seeds.front(); }

MatTAModel model_from_checkpoint(const Checkpoint& ckpt) {
  const RunConfig cfg = checkpoint_config(ckpt);
  Rng unused(0);
  MatTAModel model = MatTAModel::create(cfg.model, cfg.sharing, cfg.activation, unused);
  for (auto& [name, t] : model.named_params_mut()) {
    const Tensor* stored = ckpt.find(name);
    if (!stored) throw CheckpointError("checkpoint is missing tensor '" + name + "'");
    if (!stored->same_shape(*t)) {
      throw CheckpointError("tensor '" + name + "' has shape " + stored->shape_str() + ", model expects " +
                            t->shape_str());
    }
    *t = *stored;
  }
  return model;
}

}  // namespace matta
