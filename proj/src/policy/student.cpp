#include "mtlkd/policy/student.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mtlkd/core/error.hpp"
#include "mtlkd/policy/features.hpp"

namespace mtlkd::policy {

void StudentConfig::validate() const {
  if (encoder_layers < 0 || decoder_layers < 1 || embed_dim < 1 || heads < 1 || ff_hidden < 1) {
    throw ConfigError("student: layer counts and sizes must be positive");
  }
  if (embed_dim % heads != 0) throw ConfigError("student: embed_dim must be divisible by heads");
}

StudentModel::StudentModel(const StudentConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  const std::size_t d = config_.embed_dim;
  const bool ln = config_.layer_norm_in_attention;
  embed_ = nk::LinearLayer::create(store_, "enc.embed", kNodeFeatureDim, d, rng);
  for (int l = 0; l < config_.encoder_layers; ++l) {
    encoder_.push_back(TransformerBlock::create(store_, "enc.l" + std::to_string(l), d,
                                                config_.heads, config_.ff_hidden, ln, rng));
  }
  last_token_ = nk::LinearLayer::create(store_, "dec.last", d + kDynamicFeatureDim, d, rng);
  depot_token_ = nk::LinearLayer::create(store_, "dec.depot", d + kDynamicFeatureDim, d, rng);
  for (int l = 0; l < config_.decoder_layers; ++l) {
    decoder_.push_back(TransformerBlock::create(store_, "dec.l" + std::to_string(l), d,
                                                config_.heads, config_.ff_hidden, ln, rng));
  }
  query_ = nk::LinearLayer::create(store_, "dec.query", 2 * d, d, rng);
  compat_q_ = store_.add("dec.compat.wq", nk::uniform_init(d, d, d, rng));
  compat_k_ = store_.add("dec.compat.wk", nk::uniform_init(d, d, d, rng));
}

nk::Var StudentModel::encode(nk::Tape& tape, const Instance& inst) const {
  nk::Var h = embed_(tape, store_, tape.constant(node_features(inst)));
  for (const auto& block : encoder_) h = block(tape, store_, h);
  return h;
}

PaddedBatch StudentModel::pad_batch(nk::Tape& tape, std::span<const DecodeItem> items) const {
  if (items.empty()) throw ContractViolation("pad_batch: empty batch");
  PaddedBatch batch;
  std::vector<std::vector<int>> unvisited(items.size());
  for (std::size_t b = 0; b < items.size(); ++b) {
    const DecodeState& s = *items[b].state;
    if (s.done) throw ContractViolation("pad_batch: state is done");
    for (std::size_t i = 1; i < s.visited.size(); ++i) {
      if (!s.visited[i]) unvisited[b].push_back(static_cast<int>(i));
    }
    batch.max_len = std::max(batch.max_len, unvisited[b].size() + 2);
  }

  batch.pad_mask = nk::Tensor(items.size(), batch.max_len);
  std::vector<nk::Var> groups;
  groups.reserve(items.size());
  for (std::size_t b = 0; b < items.size(); ++b) {
    const DecodeItem& it = items[b];
    const std::size_t len = unvisited[b].size() + 2;
    nk::Var dyn = tape.constant(dynamic_features(*it.inst, *it.state));
    const int last_idx[1] = {it.state->last};
    const int depot_idx[1] = {0};
    nk::Var h_last = nk::gather_rows(it.h_enc, last_idx);
    nk::Var h_depot = nk::gather_rows(it.h_enc, depot_idx);

    std::vector<int> rows = unvisited[b];
    rows.resize(batch.max_len - 2, 0);
    std::vector<nk::Var> parts = {last_token_(tape, store_, nk::concat_cols({dyn, h_last})),
                                  depot_token_(tape, store_, nk::concat_cols({dyn, h_depot}))};
    if (!rows.empty()) parts.push_back(nk::gather_rows(it.h_enc, rows));
    groups.push_back(nk::concat_rows(parts));

    std::vector<int> nodes(batch.max_len, -1);
    nodes[1] = 0;
    for (std::size_t p = 0; p < unvisited[b].size(); ++p) nodes[p + 2] = unvisited[b][p];
    batch.position_node.push_back(std::move(nodes));
    for (std::size_t p = len; p < batch.max_len; ++p) batch.pad_mask(b, p) = nk::kNegInf;
  }
  batch.tokens = nk::concat_rows(groups);
  return batch;
}

std::vector<nk::Var> StudentModel::decode_batch(nk::Tape& tape,
                                                std::span<const DecodeItem> items) const {
  PaddedBatch batch = pad_batch(tape, items);
  const std::size_t B = items.size();
  const std::size_t L = batch.max_len;
  const int groups = static_cast<int>(B);

  nk::Var h = batch.tokens;
  for (const auto& block : decoder_) h = block(tape, store_, h, batch.pad_mask, groups);

  std::vector<int> last_rows(B), depot_rows(B);
  for (std::size_t b = 0; b < B; ++b) {
    last_rows[b] = static_cast<int>(b * L);
    depot_rows[b] = static_cast<int>(b * L + 1);
  }
  nk::Var h_q = query_(tape, store_,
                       nk::concat_cols({nk::gather_rows(h, last_rows),
                                        nk::gather_rows(h, depot_rows)}));
  nk::Var q = nk::matmul(h_q, tape.param(store_, compat_q_));
  nk::Var k = nk::matmul(h, tape.param(store_, compat_k_));
  nk::Var scores = nk::scale(nk::group_dot(q, k), nk::Real(1) / std::sqrt(nk::Real(config_.embed_dim)));

  // Candidates are the depot token and the unvisited customers; the last-node
  // token and padding never are.
  nk::Tensor mask = batch.pad_mask;
  for (std::size_t b = 0; b < B; ++b) {
    const FeasibilityMask feas = feasibility_mask(*items[b].inst, *items[b].state);
    mask(b, 0) = nk::kNegInf;
    for (std::size_t p = 1; p < L; ++p) {
      const int node = batch.position_node[b][p];
      if (node >= 0 && !feas.allowed[node]) mask(b, p) = nk::kNegInf;
    }
  }
  nk::Var logp = nk::masked_log_softmax(scores, mask);

  std::vector<nk::Var> out;
  out.reserve(B);
  const nk::Real neg_inf = -std::numeric_limits<nk::Real>::infinity();
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<int> node_pos(items[b].inst->num_nodes(), -1);
    for (std::size_t p = 1; p < L; ++p) {
      const int node = batch.position_node[b][p];
      if (node >= 0) node_pos[node] = static_cast<int>(p);
    }
    out.push_back(nk::index_cols(nk::slice_rows(logp, b, 1), node_pos, neg_inf));
  }
  return out;
}

namespace {

class StudentRollout final : public PolicyRollout {
 public:
  StudentRollout(const StudentModel& model, nk::Tape& tape, const Instance& inst)
      : model_(model), tape_(tape), inst_(inst), h_enc_(model.encode(tape, inst)) {}

  nk::Var log_probs(std::span<const DecodeState> states) override {
    std::vector<DecodeItem> items;
    items.reserve(states.size());
    for (const auto& s : states) items.push_back({h_enc_, &inst_, &s});
    std::vector<nk::Var> rows = model_.decode_batch(tape_, items);
    return rows.size() == 1 ? rows[0] : nk::concat_rows(rows);
  }

 private:
  const StudentModel& model_;
  nk::Tape& tape_;
  const Instance& inst_;
  nk::Var h_enc_;
};

}  // namespace

std::unique_ptr<PolicyRollout> StudentModel::begin(nk::Tape& tape, const Instance& inst) const {
  return std::make_unique<StudentRollout>(*this, tape, inst);
}

}  // namespace mtlkd::policy
