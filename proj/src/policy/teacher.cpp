#include "mtlkd/policy/teacher.hpp"

#include <cmath>
#include <string>

#include "mtlkd/core/error.hpp"
#include "mtlkd/policy/features.hpp"

namespace mtlkd::policy {

void TeacherConfig::validate() const {
  if (encoder_layers < 1 || embed_dim < 1 || heads < 1 || ff_hidden < 1) {
    throw ConfigError("teacher: layer counts and sizes must be positive");
  }
  if (decoder_layers != 1) throw ConfigError("teacher: decoder_layers must be 1");
  if (embed_dim % heads != 0) throw ConfigError("teacher: embed_dim must be divisible by heads");
  if (!(logit_clip > 0)) throw ConfigError("teacher: logit_clip must be positive");
}

TeacherModel::TeacherModel(const TeacherConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  const std::size_t d = config_.embed_dim;
  depot_embed_ = nk::LinearLayer::create(store_, "enc.depot", kNodeFeatureDim, d, rng);
  node_embed_ = nk::LinearLayer::create(store_, "enc.node", kNodeFeatureDim, d, rng);
  for (int l = 0; l < config_.encoder_layers; ++l) {
    encoder_.push_back(TransformerBlock::create(store_, "enc.l" + std::to_string(l), d,
                                                config_.heads, config_.ff_hidden, true, rng));
  }
  context_ = nk::LinearLayer::create(store_, "dec.context", 2 * d + kDynamicFeatureDim, d, rng,
                                     false);
  wq_ = store_.add("dec.wq", nk::uniform_init(d, d, d, rng));
  wk_ = store_.add("dec.wk", nk::uniform_init(d, d, d, rng));
  wv_ = store_.add("dec.wv", nk::uniform_init(d, d, d, rng));
  wo_ = store_.add("dec.wo", nk::uniform_init(d, d, d, rng));
}

TeacherEncoding TeacherModel::encode(nk::Tape& tape, const Instance& inst) const {
  nk::Var feats = tape.constant(node_features(inst));
  const std::size_t n = inst.num_customers();
  std::vector<nk::Var> parts = {depot_embed_(tape, store_, nk::slice_rows(feats, 0, 1))};
  if (n > 0) parts.push_back(node_embed_(tape, store_, nk::slice_rows(feats, 1, n)));
  nk::Var h = nk::concat_rows(parts);
  for (const auto& block : encoder_) h = block(tape, store_, h);

  TeacherEncoding enc;
  enc.nodes = h;
  enc.graph = nk::mean_rows(h);
  enc.glimpse_k = nk::matmul(h, tape.param(store_, wk_));
  enc.glimpse_v = nk::matmul(h, tape.param(store_, wv_));
  return enc;
}

nk::Tensor TeacherModel::feasibility_rows(const Instance& inst,
                                          std::span<const DecodeState> states) const {
  nk::Tensor mask(states.size(), inst.num_nodes());
  for (std::size_t r = 0; r < states.size(); ++r) {
    if (states[r].done) throw ContractViolation("teacher decode: state is done");
    const FeasibilityMask feas = feasibility_mask(inst, states[r]);
    for (int j = 0; j < inst.num_nodes(); ++j) {
      if (!feas.allowed[j]) mask(r, j) = nk::kNegInf;
    }
  }
  return mask;
}

nk::Var TeacherModel::logits(nk::Tape& tape, const TeacherEncoding& enc, const Instance& inst,
                             std::span<const DecodeState> states) const {
  const std::size_t K = states.size();
  const nk::Tensor mask = feasibility_rows(inst, states);
  std::vector<int> zeros(K, 0), last(K);
  nk::Tensor dyn(K, kDynamicFeatureDim);
  for (std::size_t r = 0; r < K; ++r) {
    last[r] = states[r].last;
    const nk::Tensor d = dynamic_features(inst, states[r]);
    for (std::size_t c = 0; c < kDynamicFeatureDim; ++c) dyn(r, c) = d(0, c);
  }
  nk::Var ctx = nk::concat_cols({nk::gather_rows(enc.graph, zeros),
                                 nk::gather_rows(enc.nodes, last), tape.constant(dyn)});
  nk::Var q = nk::matmul(context_(tape, store_, ctx), tape.param(store_, wq_));
  nk::Var glimpse = nk::matmul(nk::attention(q, enc.glimpse_k, enc.glimpse_v, mask, config_.heads),
                               tape.param(store_, wo_));
  const nk::Real inv = nk::Real(1) / std::sqrt(nk::Real(config_.embed_dim));
  nk::Var compat = nk::scale(nk::matmul_nt(glimpse, enc.nodes), inv);
  return nk::scale(nk::tanh(compat), nk::Real(config_.logit_clip));
}

nk::Var TeacherModel::decode(nk::Tape& tape, const TeacherEncoding& enc, const Instance& inst,
                             std::span<const DecodeState> states) const {
  return nk::masked_log_softmax(logits(tape, enc, inst, states), feasibility_rows(inst, states));
}

namespace {

class TeacherRollout final : public PolicyRollout {
 public:
  TeacherRollout(const TeacherModel& model, nk::Tape& tape, const Instance& inst)
      : model_(model), tape_(tape), inst_(inst), enc_(model.encode(tape, inst)) {}

  nk::Var log_probs(std::span<const DecodeState> states) override {
    return model_.decode(tape_, enc_, inst_, states);
  }

 private:
  const TeacherModel& model_;
  nk::Tape& tape_;
  const Instance& inst_;
  TeacherEncoding enc_;
};

}  // namespace

std::unique_ptr<PolicyRollout> TeacherModel::begin(nk::Tape& tape, const Instance& inst) const {
  return std::make_unique<TeacherRollout>(*this, tape, inst);
}

}  // namespace mtlkd::policy
