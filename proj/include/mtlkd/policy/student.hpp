#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mtlkd/policy/blocks.hpp"
#include "mtlkd/policy/policy.hpp"

namespace mtlkd::policy {

struct StudentConfig {
  int encoder_layers = 1;
  int decoder_layers = 6;
  int embed_dim = 16;
  int heads = 2;
  int ff_hidden = 32;
  bool layer_norm_in_attention = false;

  // Throws ConfigError on non-positive sizes or embed_dim % heads != 0.
  void validate() const;
  static StudentConfig paper(int embed_dim) { return {1, 6, embed_dim, 8, 512, false}; }
};

// One decoding request: the instance encoding and the state to decode from.
struct DecodeItem {
  nk::Var h_enc;
  const Instance* inst = nullptr;
  const DecodeState* state = nullptr;
};

// Decoder input of a batch, stacked as groups of `max_len` rows. Position 0
// of a group is the last-node token, position 1 the depot token, then the
// unvisited customers in index order, then depot-embedding padding.
struct PaddedBatch {
  nk::Var tokens;              // (B * max_len) x d
  nk::Tensor pad_mask;         // B x max_len; 0 valid, kNegInf padded
  std::size_t max_len = 0;
  std::vector<std::vector<int>> position_node;  // node id per position, -1 if none
};

class StudentModel final : public Policy {
 public:
  StudentModel(const StudentConfig& config, std::uint64_t seed);

  const StudentConfig& config() const { return config_; }
  const nk::ParameterStore& params() const override { return store_; }
  nk::ParameterStore& params() override { return store_; }

  // (n+1) x embed_dim node embeddings.
  nk::Var encode(nk::Tape& tape, const Instance& inst) const;

  // Throws ContractViolation on an empty batch or a finished state.
  PaddedBatch pad_batch(nk::Tape& tape, std::span<const DecodeItem> items) const;

  // Node-space log-probabilities, one 1 x (n_b + 1) row per item.
  std::vector<nk::Var> decode_batch(nk::Tape& tape, std::span<const DecodeItem> items) const;

  std::unique_ptr<PolicyRollout> begin(nk::Tape& tape, const Instance& inst) const override;

 private:
  StudentConfig config_;
  nk::ParameterStore store_;
  nk::LinearLayer embed_;
  std::vector<TransformerBlock> encoder_;
  nk::LinearLayer last_token_, depot_token_;
  std::vector<TransformerBlock> decoder_;
  nk::LinearLayer query_;
  int compat_q_ = -1, compat_k_ = -1;
};

}  // namespace mtlkd::policy
