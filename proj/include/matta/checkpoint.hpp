#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "matta/config.hpp"
#include "matta/nested.hpp"
#include "matta/optim.hpp"
#include "matta/tensor.hpp"

namespace matta {

// Container layout:
//   "MATT1\n" | u64 LE header length | UTF-8 JSON header | data section
// The header is padded with spaces so the data section starts on a 64-byte
// boundary. Tensor offsets are relative to the data section, 64-byte
// aligned, and hold little-endian IEEE-754 float32 values.
inline constexpr std::string_view kCheckpointMagic = "MATT1\n";
inline constexpr int kCheckpointVersion = 1;
inline constexpr std::size_t kTensorAlignment = 64;

struct NamedTensor {
  std::string name;
  Tensor value;
};

struct Checkpoint {
  int version = kCheckpointVersion;
  nlohmann::json config = nlohmann::json::object();
  std::vector<NamedTensor> tensors;
  std::size_t final_step = 0;
  nlohmann::json metrics = nlohmann::json::object();

  const Tensor* find(const std::string& name) const;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Rounds every entry to the nearest float32 (the stored precision).
Tensor round_to_f32(const Tensor& t);

// Builds a checkpoint of every Φ tensor (and Shampoo factors, when given).
Checkpoint make_checkpoint(const RunConfig& config, std::uint64_t seed, const MatTAModel& model,
                           const Optimizer* optimizer, std::size_t final_step,
                           const nlohmann::json& metrics);

// Config echo and run seed stored in a checkpoint.
RunConfig checkpoint_config(const Checkpoint& ckpt);
std::uint64_t checkpoint_seed(const Checkpoint& ckpt);
MatTAModel model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace matta
