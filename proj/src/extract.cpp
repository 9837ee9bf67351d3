#include "matta/extract.hpp"

#include <algorithm>

#include "matta/errors.hpp"

namespace matta {
namespace {

bool is_student_extreme(const ExtractConfig& cfg, const ModelDims& dims) {
  for (std::size_t i = 0; i < dims.n_shared; ++i)
    if (cfg.width[i] != Width::narrow) return false;
  return std::all_of(cfg.exclusive.begin(), cfg.exclusive.end(),
                     [](ExclusiveChoice c) { return c == ExclusiveChoice::skip; });
}

bool is_ta_extreme(const ExtractConfig& cfg) {
  return std::all_of(cfg.width.begin(), cfg.width.end(), [](Width w) { return w == Width::wide; }) &&
         std::all_of(cfg.exclusive.begin(), cfg.exclusive.end(),
                     [](ExclusiveChoice c) { return c == ExclusiveChoice::include_wide; });
}

ExclusiveChoice include_for(Width w) {
  return w == Width::wide ? ExclusiveChoice::include_wide : ExclusiveChoice::include_narrow;
}

StandaloneDense narrow_dense(const NestedDense& layer) { return {layer.w_s, 0}; }

StandaloneDense wide_dense(const NestedDense& layer) {
  return {layer.assembled_ta(), layer.m_s < layer.m_ta ? layer.m_s : 0};
}

}  // namespace

std::vector<Width> wide_narrow_wide(std::size_t k, std::size_t n_total) {
  if (k > n_total) {
    throw ContractError("wide_narrow_wide: k=" + std::to_string(k) + " exceeds block count " +
                        std::to_string(n_total));
  }
  const std::size_t bottom = (k + 1) / 2;
  const std::size_t top = k / 2;
  std::vector<Width> w(n_total, Width::narrow);
  for (std::size_t i = 0; i < bottom; ++i) w[i] = Width::wide;
  for (std::size_t i = n_total - top; i < n_total; ++i) w[i] = Width::wide;
  return w;
}

ExtractConfig wide_narrow_wide_config(std::size_t k, const ModelDims& dims) {
  ExtractConfig cfg;
  cfg.width = wide_narrow_wide(k, dims.n_blocks());
  for (std::size_t i = dims.n_shared; i < dims.n_blocks(); ++i) cfg.exclusive.push_back(include_for(cfg.width[i]));
  cfg.label = "wnw-k" + std::to_string(k);
  cfg.k = k;
  return cfg;
}

ExtractConfig student_config(const ModelDims& dims) {
  ExtractConfig cfg;
  cfg.width.assign(dims.n_blocks(), Width::narrow);
  cfg.exclusive.assign(dims.n_extra, ExclusiveChoice::skip);
  cfg.label = "student";
  return cfg;
}

ExtractConfig ta_config(const ModelDims& dims) {
  ExtractConfig cfg;
  cfg.width.assign(dims.n_blocks(), Width::wide);
  cfg.exclusive.assign(dims.n_extra, ExclusiveChoice::include_wide);
  cfg.label = "ta";
  return cfg;
}

std::vector<ExtractConfig> enumerate_grid(const ModelDims& dims, const std::vector<std::size_t>& ks) {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] > dims.n_blocks()) {
      throw ContractError("enumerate_grid: k=" + std::to_string(ks[i]) + " exceeds block count " +
                          std::to_string(dims.n_blocks()));
    }
    if (i > 0 && ks[i] <= ks[i - 1]) {
      throw ContractError("enumerate_grid: ks must be strictly ascending (duplicate or unsorted k=" +
                          std::to_string(ks[i]) + ")");
    }
  }
  std::vector<ExtractConfig> out;
  out.push_back(student_config(dims));
  for (std::size_t k : ks) out.push_back(wide_narrow_wide_config(k, dims));
  out.push_back(ta_config(dims));
  return out;
}

ExtractConfig config_from_label(const std::string& label, const ModelDims& dims) {
  if (label == "student") return student_config(dims);
  if (label == "ta") return ta_config(dims);
  const std::string prefix = "wnw-k";
  if (label.starts_with(prefix) && label.size() > prefix.size() &&
      label.find_first_not_of("0123456789", prefix.size()) == std::string::npos) {
    const std::size_t k = std::stoul(label.substr(prefix.size()));
    if (k > dims.n_blocks()) {
      throw ContractError("extract label '" + label + "': k exceeds block count " + std::to_string(dims.n_blocks()));
    }
    return wide_narrow_wide_config(k, dims);
  }
  throw ContractError("unknown extract label '" + label + "' (expected student, ta or wnw-k<K>)");
}

void validate(const ExtractConfig& cfg, const ModelDims& dims) {
  if (cfg.width.size() != dims.n_blocks() || cfg.exclusive.size() != dims.n_extra) {
    throw ContractError("extract config '" + cfg.label + "' has " + std::to_string(cfg.width.size()) +
                        " widths / " + std::to_string(cfg.exclusive.size()) +
                        " exclusive choices, model has " + std::to_string(dims.n_blocks()) +
                        " blocks / " + std::to_string(dims.n_extra) + " exclusive");
  }
  for (std::size_t e = 0; e < cfg.exclusive.size(); ++e) {
    const ExclusiveChoice c = cfg.exclusive[e];
    if (c != ExclusiveChoice::skip && c != include_for(cfg.width[dims.n_shared + e])) {
      throw ContractError("extract config '" + cfg.label + "': exclusive block " + std::to_string(e) +
                          " width disagrees with its include choice");
    }
  }
}

Tensor StandaloneDense::forward(const Tensor& x) const {
  if (row_split == 0 || row_split >= weight.rows()) return matmul(x, weight);
  const std::size_t rest = weight.rows() - row_split;
  return add(matmul(slice_cols(x, 0, row_split), slice_rows(weight, 0, row_split)),
             matmul(slice_cols(x, row_split, rest), slice_rows(weight, row_split, rest)));
}

Tensor StandaloneModel::forward(const Tensor& x) const {
  Tensor h = matmul(x, encoder);
  for (const auto& b : blocks) h = add(h, b.down.forward(activation(b.up.forward(h), b.act)));
  return matmul(h, readout);
}

std::size_t StandaloneModel::nonembedding_param_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.up.weight.size() + b.down.weight.size();
  return n;
}

std::size_t StandaloneModel::param_count() const {
  return encoder.size() + readout.size() + nonembedding_param_count();
}

StandaloneModel materialize(const MatTAModel& model, const ExtractConfig& cfg) {
  const ModelDims& dims = model.dims();
  validate(cfg, dims);
  const bool student_extreme = is_student_extreme(cfg, dims);
  const bool ta_extreme = is_ta_extreme(cfg);
  if (model.sharing() != Sharing::shared && !student_extreme && !ta_extreme) {
    throw ContractError("materialize: mixing widths ('" + cfg.label +
                        "') requires a model trained with shared parameters");
  }
  // With private TA storage the wide path must read the TA's tensors; the
  // narrow path always reads the Student's.
  const Which embed = (ta_extreme && !student_extreme) ? Which::ta : Which::student;

  StandaloneModel out;
  out.label = cfg.label;
  out.encoder = model.encoder(embed);
  out.readout = model.readout(embed);
  for (std::size_t i = 0; i < dims.n_blocks(); ++i) {
    const NestedBlock& block = model.blocks()[i];
    if (block.ta_exclusive && cfg.exclusive[i - dims.n_shared] == ExclusiveChoice::skip) continue;
    StandaloneBlock b;
    b.act = block.act;
    if (cfg.width[i] == Width::narrow) {
      b.up = narrow_dense(block.up);
      b.down = narrow_dense(block.down);
    } else {
      b.up = wide_dense(block.up);
      b.down = wide_dense(block.down);
    }
    out.blocks.push_back(std::move(b));
  }
  return out;
}

ParamCounts extracted_param_count(const ExtractConfig& cfg, const ModelDims& dims) {
  validate(cfg, dims);
  ParamCounts c;
  for (std::size_t i = 0; i < dims.n_blocks(); ++i) {
    if (i >= dims.n_shared && cfg.exclusive[i - dims.n_shared] == ExclusiveChoice::skip) continue;
    const std::size_t h = cfg.width[i] == Width::wide ? dims.h_ta : dims.h_s;
    c.nonembedding += 2 * dims.d * h;
  }
  c.total = c.nonembedding + dims.d_in * dims.d + dims.d * dims.classes;
  return c;
}

}  // namespace matta
