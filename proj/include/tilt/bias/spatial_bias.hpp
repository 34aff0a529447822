#pragma once

#include <span>
#include <vector>

#include "tilt/bias/bucket.hpp"
#include "tilt/layout/document.hpp"
#include "tilt/numerics/ops.hpp"
#include "tilt/rng.hpp"

namespace tilt {

// Learned per-(bucket, head) scalars for the sequential, horizontal, and
// vertical bias tables. Shared across layers; encoder self-attention adds all
// three, decoder self-attention adds the sequential term only.
struct BiasParams {
  Parameter seq, horiz, vert;  // each [num_buckets, num_heads]

  static BiasParams make(int num_heads, int num_buckets = 32);
  std::vector<Parameter*> all() { return {&seq, &horiz, &vert}; }
};

// Bucket index grids for a token sequence (n x n each, row-major).
struct BucketGrids {
  int n = 0;
  std::vector<int> seq, horiz, vert;
};

BucketGrids bucket_grids(std::span<const GridCell> centers);
// Sequential-only variant (decoder self-attention).
std::vector<int> bucket_grid_1d(int n);

// B[h][i][j] = seq[b1d(j-i)][h] + horiz[ba(cx_j-cx_i)][h] + vert[ba(cy_j-cy_i)][h];
// differentiable w.r.t. the tables. Returns a [heads, n, n] node.
int build_bias(Tape& t, std::span<const GridCell> centers, BiasParams& params);

// Stretch/squeeze augmentation: bbox x scaled by fx ~ U[0.8, 1.25] and y by an
// independent fy, about the page origin, clamped to the page. Image untouched.
Document spatial_scale_augment(const Document& doc, Rng& rng);
Document scale_bboxes(const Document& doc, double fx, double fy);

}  // namespace tilt
