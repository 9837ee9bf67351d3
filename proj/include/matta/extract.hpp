#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "matta/nested.hpp"
#include "matta/tensor.hpp"

namespace matta {

enum class Width { narrow, wide };
enum class ExclusiveChoice { skip, include_wide, include_narrow };

/// One Mix'n'Match sub-model: a width per block, plus what to do with each
/// TA-exclusive block (indexed from the first exclusive block).
struct ExtractConfig {
  std::vector<Width> width;
  std::vector<ExclusiveChoice> exclusive;
  std::string label;
  std::optional<std::size_t> k;  // set for wide-narrow-wide configs
};

// Bottom ceil(k/2) and top floor(k/2) positions wide, the rest narrow.
std::vector<Width> wide_narrow_wide(std::size_t k, std::size_t n_total);
ExtractConfig wide_narrow_wide_config(std::size_t k, const ModelDims& dims);
ExtractConfig student_config(const ModelDims& dims);
ExtractConfig ta_config(const ModelDims& dims);

// "student", one "wnw-k{K}" per k (ascending, unique), then "ta".
std::vector<ExtractConfig> enumerate_grid(const ModelDims& dims, const std::vector<std::size_t>& ks);

void validate(const ExtractConfig& cfg, const ModelDims& dims);

// Inverse of the labels above: "student", "ta" or "wnw-k<K>".
ExtractConfig config_from_label(const std::string& label, const ModelDims& dims);

// Plain dense layer. When 0 < row_split < rows the product is accumulated
// as x[:, :split]·W[:split] + x[:, split:]·W[split:], which is the order the
// nested TA path uses for the same weights.
struct StandaloneDense {
  Tensor weight;
  std::size_t row_split = 0;

  Tensor forward(const Tensor& x) const;
};

struct StandaloneBlock {
  StandaloneDense up;
  StandaloneDense down;
  Activation act = Activation::gelu_tanh;
};

struct StandaloneModel {
  std::string label;
  Tensor encoder;
  Tensor readout;
  std::vector<StandaloneBlock> blocks;

  Tensor forward(const Tensor& x) const;
  std::size_t param_count() const;
  std::size_t nonembedding_param_count() const;
};

StandaloneModel materialize(const MatTAModel& model, const ExtractConfig& cfg);

struct ParamCounts {
  std::size_t total = 0;
  std::size_t nonembedding = 0;  // blocks only (encoder and readout excluded)
};

ParamCounts extracted_param_count(const ExtractConfig& cfg, const ModelDims& dims);

}  // namespace matta
