#include "bcd4rec/nn/encoder.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bcd4rec::nn {

namespace {

GruLayer init_layer(int in, int hidden, double bound, Rng& rng) {
  GruLayer layer;
  layer.w_ih.resize(3 * hidden, in);
  layer.w_hh.resize(3 * hidden, hidden);
  fill_uniform(layer.w_ih, bound, rng);
  fill_uniform(layer.w_hh, bound, rng);
  layer.b_ih = Matrix::Zero(3 * hidden, 1);
  layer.b_hh = Matrix::Zero(3 * hidden, 1);
  return layer;
}

// Runs one direction of one layer over packed inputs. The recurrent state of
// reordered column j only advances at positions where j < active[p].
Matrix run_direction(const GruLayer& layer, const Matrix& input, const EncoderTape& t, bool reverse,
                     EncoderTape::Direction& out) {
  const Eigen::Index h = layer.w_hh.cols();
  const Eigen::Index cols = input.cols();
  Matrix gi = layer.w_ih * input;
  gi.colwise() += layer.b_ih.col(0);

  out.input = input;
  out.h_prev.resize(h, cols);
  out.reset.resize(h, cols);
  out.update.resize(h, cols);
  out.cand.resize(h, cols);
  out.gh_cand.resize(h, cols);
  out.output.resize(h, cols);

  Matrix state = Matrix::Zero(h, t.batch);
  Matrix gh(3 * h, t.batch);
  for (int s = 0; s < t.steps; ++s) {
    const int p = reverse ? t.steps - 1 - s : s;
    const Eigen::Index a = t.active[static_cast<std::size_t>(p)];
    const Eigen::Index o = t.offset[static_cast<std::size_t>(p)];
    if (a == 0) continue;
    auto g = gh.leftCols(a);
    g.noalias() = layer.w_hh * state.leftCols(a);
    g.colwise() += layer.b_hh.col(0);

    auto r = out.reset.middleCols(o, a).array();
    auto z = out.update.middleCols(o, a).array();
    auto n = out.cand.middleCols(o, a).array();
    auto ghn = out.gh_cand.middleCols(o, a);
    r = gi.block(0, o, h, a).array() + g.topRows(h).array();
    r = 1.0 / (1.0 + (-r).exp());
    z = gi.block(h, o, h, a).array() + g.middleRows(h, h).array();
    z = 1.0 / (1.0 + (-z).exp());
    ghn = g.bottomRows(h);
    n = (gi.block(2 * h, o, h, a).array() + r * ghn.array()).tanh();

    out.h_prev.middleCols(o, a) = state.leftCols(a);
    state.leftCols(a).array() = (1.0 - z) * n + z * state.leftCols(a).array();
    out.output.middleCols(o, a) = state.leftCols(a);
  }
  return state;
}

// d_output: dLoss/d(output) per packed column; d_final: dLoss/d(final state),
// reordered-batch layout. Returns dLoss/d(input), packed.
Matrix backprop_direction(const GruLayer& layer, const EncoderTape::Direction& tape, const EncoderTape& t,
                          bool reverse, const Matrix& d_output, const Matrix& d_final, GruLayer& grad) {
  const Eigen::Index h = layer.w_hh.cols();
  Matrix d_gi(3 * h, tape.input.cols());
  Matrix d_gh(3 * h, t.batch);
  Matrix d_state = d_final;
  Eigen::ArrayXXd dn_pre(h, t.batch), dz_pre(h, t.batch), dr_pre(h, t.batch);

  for (int s = t.steps - 1; s >= 0; --s) {
    const int p = reverse ? t.steps - 1 - s : s;
    const Eigen::Index a = t.active[static_cast<std::size_t>(p)];
    const Eigen::Index o = t.offset[static_cast<std::size_t>(p)];
    if (a == 0) continue;
    auto dh = d_state.leftCols(a);
    dh += d_output.middleCols(o, a);

    const auto r = tape.reset.middleCols(o, a).array();
    const auto z = tape.update.middleCols(o, a).array();
    const auto n = tape.cand.middleCols(o, a).array();
    const auto ghn = tape.gh_cand.middleCols(o, a).array();
    const auto prev = tape.h_prev.middleCols(o, a).array();

    auto dn = dn_pre.leftCols(a);
    auto dz = dz_pre.leftCols(a);
    auto dr = dr_pre.leftCols(a);
    dn = dh.array() * (1.0 - z) * (1.0 - n * n);
    dz = dh.array() * (prev - n) * z * (1.0 - z);
    dr = dn * ghn * r * (1.0 - r);

    d_gi.block(0, o, h, a) = dr.matrix();
    d_gi.block(h, o, h, a) = dz.matrix();
    d_gi.block(2 * h, o, h, a) = dn.matrix();
    auto dg = d_gh.leftCols(a);
    dg.topRows(h) = dr.matrix();
    dg.middleRows(h, h) = dz.matrix();
    dg.bottomRows(h) = (dn * r).matrix();

    grad.w_hh.noalias() += dg * tape.h_prev.middleCols(o, a).transpose();
    grad.b_hh.col(0) += dg.rowwise().sum();
    dh.array() *= z;
    dh.noalias() += layer.w_hh.transpose() * dg;
  }
  grad.w_ih.noalias() += d_gi * tape.input.transpose();
  grad.b_ih.col(0) += d_gi.rowwise().sum();
  return layer.w_ih.transpose() * d_gi;
}

}  // namespace

EmbeddingTable init_embeddings(int num_items, int dim, Rng& rng) {
  EmbeddingTable t;
  t.table.resize(num_items + 1, dim);
  fill_uniform(t.table, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
  mask_pad_row(t);
  return t;
}

EncoderParams init_encoder(int dim, int layers, Rng& rng) {
  if (dim <= 0 || dim % 2 != 0) throw std::invalid_argument("encoder dim must be positive and even");
  if (layers < 1) throw std::invalid_argument("encoder needs at least one layer");
  const int h = dim / 2;
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  EncoderParams p;
  for (int l = 0; l < layers; ++l) {
    // Layer 0 reads embeddings (dim wide); deeper layers read both directions (2h = dim).
    p.forward.push_back(init_layer(dim, h, bound, rng));
    p.backward.push_back(init_layer(dim, h, bound, rng));
  }
  p.proj_w.resize(dim, dim);
  fill_uniform(p.proj_w, bound, rng);
  p.proj_b = Matrix::Zero(dim, 1);
  return p;
}

Matrix encode_states(const EncoderParams& params, const EmbeddingTable& items,
                     std::span<const std::vector<ItemId>> states, EncoderTape* tape) {
  const int batch = static_cast<int>(states.size());
  const int d = params.dim();
  const int h = params.hidden();
  if (items.dim() != d) throw std::invalid_argument("embedding dim does not match encoder dim");

  EncoderTape local;
  EncoderTape& t = tape ? *tape : local;
  t = EncoderTape{};
  t.batch = batch;
  t.order.resize(static_cast<std::size_t>(batch));
  std::iota(t.order.begin(), t.order.end(), 0);
  std::stable_sort(t.order.begin(), t.order.end(),
                   [&](int a, int b) { return states[a].size() > states[b].size(); });
  t.steps = batch > 0 ? static_cast<int>(states[t.order[0]].size()) : 0;

  t.active.assign(static_cast<std::size_t>(t.steps), 0);
  t.offset.assign(static_cast<std::size_t>(t.steps), 0);
  Eigen::Index total = 0;
  for (int p = 0; p < t.steps; ++p) {
    int a = 0;
    while (a < batch && static_cast<int>(states[t.order[a]].size()) >= t.steps - p) ++a;
    t.active[p] = a;
    t.offset[p] = total;
    total += a;
  }
  t.rows.resize(static_cast<std::size_t>(total));
  for (int p = 0; p < t.steps; ++p) {
    for (int j = 0; j < t.active[p]; ++j) {
      const auto& s = states[t.order[j]];
      const ItemId id = s[static_cast<std::size_t>(p - (t.steps - static_cast<int>(s.size())))];
      if (id < 0 || id >= items.num_items())
        throw std::domain_error("encode_state: invalid item id " + std::to_string(id));
      t.rows[static_cast<std::size_t>(t.offset[p] + j)] = id + 1;
    }
  }

  t.final_hidden = Matrix::Zero(d, batch);
  if (total > 0) {
    Matrix input(d, total);
    for (Eigen::Index c = 0; c < total; ++c) input.col(c) = items.table.row(t.rows[c]).transpose();

    const int layers = params.layers();
    t.fwd.resize(static_cast<std::size_t>(layers));
    t.bwd.resize(static_cast<std::size_t>(layers));
    Matrix final_f, final_b;
    for (int l = 0; l < layers; ++l) {
      final_f = run_direction(params.forward[l], input, t, false, t.fwd[l]);
      final_b = run_direction(params.backward[l], input, t, true, t.bwd[l]);
      if (l + 1 < layers) {
        input.resize(2 * h, total);
        input << t.fwd[l].output, t.bwd[l].output;
      }
    }
    for (int j = 0; j < batch; ++j) {
      t.final_hidden.col(t.order[j]).head(h) = final_f.col(j);
      t.final_hidden.col(t.order[j]).tail(h) = final_b.col(j);
    }
  }

  Matrix out = params.proj_w * t.final_hidden;
  out.colwise() += params.proj_b.col(0);
  return out;
}

Vector encode_state(const EncoderParams& params, const EmbeddingTable& items,
                    const std::vector<ItemId>& state) {
  return encode_states(params, items, std::span<const std::vector<ItemId>>(&state, 1)).col(0);
}

void encode_states_backward(const EncoderParams& params, const EmbeddingTable& items,
                            const EncoderTape& tape, const Matrix& d_out, EncoderParams& grad,
                            EmbeddingTable& grad_items) {
  (void)items;
  const int h = params.hidden();
  grad.proj_w.noalias() += d_out * tape.final_hidden.transpose();
  grad.proj_b.col(0) += d_out.rowwise().sum();
  if (tape.rows.empty()) return;

  const Matrix d_hidden = params.proj_w.transpose() * d_out;
  Matrix d_final_f = Matrix::Zero(h, tape.batch);
  Matrix d_final_b = Matrix::Zero(h, tape.batch);
  for (int j = 0; j < tape.batch; ++j) {
    d_final_f.col(j) = d_hidden.col(tape.order[j]).head(h);
    d_final_b.col(j) = d_hidden.col(tape.order[j]).tail(h);
  }
  const Eigen::Index total = static_cast<Eigen::Index>(tape.rows.size());
  Matrix d_fwd = Matrix::Zero(h, total);
  Matrix d_bwd = Matrix::Zero(h, total);

  for (int l = params.layers() - 1; l >= 0; --l) {
    Matrix d_in = backprop_direction(params.forward[l], tape.fwd[l], tape, false, d_fwd, d_final_f, grad.forward[l]);
    d_in += backprop_direction(params.backward[l], tape.bwd[l], tape, true, d_bwd, d_final_b, grad.backward[l]);
    if (l > 0) {
      d_fwd = d_in.topRows(h);
      d_bwd = d_in.bottomRows(h);
      d_final_f.setZero();
      d_final_b.setZero();
    } else {
      for (Eigen::Index c = 0; c < total; ++c) grad_items.table.row(tape.rows[c]) += d_in.col(c).transpose();
    }
  }
}

}  // namespace bcd4rec::nn
