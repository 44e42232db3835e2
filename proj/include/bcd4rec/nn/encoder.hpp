#pragma once

// Item embedding table and bidirectional GRU state encoder.
//
// States are lists of item ids (most recent last). The encoder left-pads a
// batch to its longest state; padded positions leave the recurrent state
// untouched, so padding never changes the encoding. Row 0 of the embedding
// table is the reserved pad item; item id k lives in row k + 1.

#include <span>
#include <string>
#include <vector>

#include "bcd4rec/nn/params.hpp"
#include "bcd4rec/types.hpp"

namespace bcd4rec::nn {

struct EmbeddingTable {
  Matrix table;  // (num_items + 1) x dim, row 0 = pad

  int num_items() const { return static_cast<int>(table.rows()) - 1; }
  int dim() const { return static_cast<int>(table.cols()); }
  /// Rows for real items only (excludes the pad row).
  auto items() const { return table.bottomRows(table.rows() - 1); }
  auto items() { return table.bottomRows(table.rows() - 1); }

  template <class F>
  void visit(F&& f) {
    f("table", table);
  }
};

EmbeddingTable init_embeddings(int num_items, int dim, Rng& rng);

/// Forces the pad row of an embedding gradient (or table) to zero.
inline void mask_pad_row(EmbeddingTable& t) { t.table.row(0).setZero(); }

struct GruLayer {
  Matrix w_ih;  // 3h x in, gate order (reset, update, candidate)
  Matrix w_hh;  // 3h x h
  Matrix b_ih;  // 3h x 1
  Matrix b_hh;  // 3h x 1

  template <class F>
  void visit(F&& f) {
    f("w_ih", w_ih);
    f("w_hh", w_hh);
    f("b_ih", b_ih);
    f("b_hh", b_hh);
  }
};

struct EncoderParams {
  std::vector<GruLayer> forward;
  std::vector<GruLayer> backward;
  Matrix proj_w;  // d x d
  Matrix proj_b;  // d x 1

  int dim() const { return static_cast<int>(proj_w.rows()); }
  int hidden() const { return dim() / 2; }
  int layers() const { return static_cast<int>(forward.size()); }

  template <class F>
  void visit(F&& f) {
    for (std::size_t l = 0; l < forward.size(); ++l) {
      const std::string pf = "gru.l" + std::to_string(l) + ".fwd.";
      const std::string pb = "gru.l" + std::to_string(l) + ".bwd.";
      forward[l].visit([&](const std::string& n, Matrix& m) { f(pf + n, m); });
      backward[l].visit([&](const std::string& n, Matrix& m) { f(pb + n, m); });
    }
    f("proj.w", proj_w);
    f("proj.b", proj_b);
  }
};

/// dim must be even (each direction carries dim/2 hidden units).
EncoderParams init_encoder(int dim, int layers, Rng& rng);

/// Intermediate values kept by the forward pass for backpropagation.
///
/// The batch is reordered by decreasing state length. Because states are
/// left-aligned to the longest one, the sequences holding a real item at
/// position p are then exactly the first `active[p]` reordered columns, and
/// per-position data is packed contiguously starting at column `offset[p]`.
struct EncoderTape {
  struct Direction {
    Matrix input;   // in x N
    Matrix h_prev;  // h x N, hidden state entering the position
    Matrix reset, update, cand, gh_cand;
    Matrix output;  // h x N, hidden state after the position
  };
  int batch = 0;
  int steps = 0;
  std::vector<int> order;   // reordered column -> original batch index
  std::vector<int> active;  // per position
  std::vector<Eigen::Index> offset;
  std::vector<ItemId> rows;  // packed embedding rows (item id + 1)
  std::vector<Direction> fwd, bwd;
  Matrix final_hidden;  // d x B, original order
};

/// Encodes a batch of states into a dim x B matrix. Throws std::domain_error
/// for item ids outside [0, num_items).
Matrix encode_states(const EncoderParams& params, const EmbeddingTable& items,
                     std::span<const std::vector<ItemId>> states, EncoderTape* tape = nullptr);

Vector encode_state(const EncoderParams& params, const EmbeddingTable& items,
                    const std::vector<ItemId>& state);

/// Accumulates gradients given dLoss/dOutput (dim x B).
void encode_states_backward(const EncoderParams& params, const EmbeddingTable& items,
                            const EncoderTape& tape, const Matrix& d_out, EncoderParams& grad,
                            EmbeddingTable& grad_items);

}  // namespace bcd4rec::nn
