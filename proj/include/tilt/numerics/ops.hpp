#pragma once

#include <span>
#include <vector>

#include "tilt/numerics/tape.hpp"
#include "tilt/rng.hpp"

namespace tilt {

// Inclusive cell rectangle on a feature grid.
struct CellRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

// Elementwise / dense ops. All take node ids on `t` and return a new node id.
int add(Tape& t, int a, int b);
int sub(Tape& t, int a, int b);
int mul(Tape& t, int a, int b);
int scale(Tape& t, int a, real c);
int relu(Tape& t, int a);

// a: [n, m], v: [m]; broadcast add over rows.
int add_rowvec(Tape& t, int a, int v);

// [n, k] x [k, m] -> [n, m]
int matmul(Tape& t, int a, int b);
// [n, k] x [m, k]^T -> [n, m]
int matmul_nt(Tape& t, int a, int b);

// Row softmax with max-subtraction. causal masks columns j > i (square input).
int softmax_rows(Tape& t, int a, bool causal = false);

// x: [n, d], gain: [d]; rows scaled by 1/sqrt(mean(x^2) + eps), eps = 1e-6.
int rms_norm(Tape& t, int x, int gain);

// table: [V, d]; out row i = table[ids[i]].
int embed_rows(Tape& t, int table, const std::vector<int>& ids);

// logits: [n, V]; mean token cross-entropy against target ids, scalar out.
int cross_entropy_rows(Tape& t, int logits, const std::vector<int>& targets);

// Column range [c0, c1) of a 2D tensor.
int slice_cols(Tape& t, int a, int c0, int c1);
int concat_cols(Tape& t, const std::vector<int>& parts);
// plane h of a [H, n, m] tensor -> [n, m]
int slice_plane(Tape& t, int a, int plane);

// B[h][i][j] = seq[idx_seq[i*n+j]][h] + horiz[idx_h[i*n+j]][h] + vert[idx_v[i*n+j]][h].
// Tables are [buckets, heads]; output [heads, n, n].
int bias_from_tables(Tape& t, int seq, int horiz, int vert, const std::vector<int>& idx_seq,
                     const std::vector<int>& idx_h, const std::vector<int>& idx_v, int n);
// Single-table variant (sequential-only bias).
int bias_from_table(Tape& t, int table, const std::vector<int>& idx, int n);

// Image ops. Feature maps are [C, H, W].
// w: [Cout, Cin, kh, kw], b: [Cout]; zero padding `pad`, stride 1.
int conv2d(Tape& t, int x, int w, int b, int pad);
int maxpool2(Tape& t, int x);  // 2x2, stride 2; dims must be even
// Transposed 2x2 stride-2 conv; w: [Cin, Cout, 2, 2], b: [Cout].
int upconv2(Tape& t, int x, int w, int b);
int concat_channels(Tape& t, int a, int b);
// Channelwise max over each roi's cells -> [rois, C].
int roi_maxpool(Tape& t, int fm, const std::vector<CellRect>& rois);

// Inverted dropout; identity when p == 0.
int dropout(Tape& t, int a, real p, Rng& rng);

}  // namespace tilt
