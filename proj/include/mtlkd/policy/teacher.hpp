#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mtlkd/policy/blocks.hpp"
#include "mtlkd/policy/policy.hpp"

namespace mtlkd::policy {

struct TeacherConfig {
  int encoder_layers = 6;
  int decoder_layers = 1;
  int embed_dim = 16;
  int heads = 2;
  int ff_hidden = 32;
  double logit_clip = 10.0;

  // Throws ConfigError on invalid sizes; only one decoder layer is supported.
  void validate() const;
  static TeacherConfig paper() { return {6, 1, 128, 8, 512, 10.0}; }
};

struct TeacherEncoding {
  nk::Var nodes;      // (n+1) x d
  nk::Var graph;      // 1 x d, mean of node rows
  nk::Var glimpse_k;  // (n+1) x d
  nk::Var glimpse_v;  // (n+1) x d
};

class TeacherModel final : public Policy {
 public:
  TeacherModel(const TeacherConfig& config, std::uint64_t seed);

  const TeacherConfig& config() const { return config_; }
  const nk::ParameterStore& params() const override { return store_; }
  nk::ParameterStore& params() override { return store_; }

  TeacherEncoding encode(nk::Tape& tape, const Instance& inst) const;

  // Clipped compatibilities before masking, one row of n+1 per state.
  nk::Var logits(nk::Tape& tape, const TeacherEncoding& enc, const Instance& inst,
                 std::span<const DecodeState> states) const;
  // Masked log-probabilities; masked nodes are exactly -infinity.
  nk::Var decode(nk::Tape& tape, const TeacherEncoding& enc, const Instance& inst,
                 std::span<const DecodeState> states) const;

  std::unique_ptr<PolicyRollout> begin(nk::Tape& tape, const Instance& inst) const override;

 private:
  nk::Tensor feasibility_rows(const Instance& inst, std::span<const DecodeState> states) const;

  TeacherConfig config_;
  nk::ParameterStore store_;
  nk::LinearLayer depot_embed_, node_embed_;
  std::vector<TransformerBlock> encoder_;
  nk::LinearLayer context_;
  int wq_ = -1, wk_ = -1, wv_ = -1, wo_ = -1;
};

}  // namespace mtlkd::policy
