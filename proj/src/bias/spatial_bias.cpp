#include "tilt/bias/spatial_bias.hpp"

namespace tilt {

BiasParams BiasParams::make(int num_heads, int num_buckets) {
  BiasParams p;
  p.seq = Parameter("bias.seq", Tensor::zeros({num_buckets, num_heads}));
  p.horiz = Parameter("bias.horiz", Tensor::zeros({num_buckets, num_heads}));
  p.vert = Parameter("bias.vert", Tensor::zeros({num_buckets, num_heads}));
  return p;
}

BucketGrids bucket_grids(std::span<const GridCell> centers) {
  BucketGrids g;
  g.n = static_cast<int>(centers.size());
  const size_t nn = static_cast<size_t>(g.n) * g.n;
  g.seq.resize(nn);
  g.horiz.resize(nn);
  g.vert.resize(nn);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const size_t ij = static_cast<size_t>(i) * g.n + j;
      g.seq[ij] = bucket_1d(j - i);
      g.horiz[ij] = bucket_axis(centers[j].x - centers[i].x);
      g.vert[ij] = bucket_axis(centers[j].y - centers[i].y);
    }
  }
  return g;
}

std::vector<int> bucket_grid_1d(int n) {
  std::vector<int> g(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[static_cast<size_t>(i) * n + j] = bucket_1d(j - i);
  return g;
}

int build_bias(Tape& t, std::span<const GridCell> centers, BiasParams& params) {
  TILT_CHECK(!centers.empty(), "build_bias: need at least one token");
  const BucketGrids g = bucket_grids(centers);
  const int seq = t.param(params.seq);
  const int horiz = t.param(params.horiz);
  const int vert = t.param(params.vert);
  return bias_from_tables(t, seq, horiz, vert, g.seq, g.horiz, g.vert, g.n);
}

Document scale_bboxes(const Document& doc, double fx, double fy) {
  Document out = doc;
  for (Token& tok : out.tokens) {
    tok.bbox = BBox{tok.bbox.x0 * fx, tok.bbox.y0 * fy, tok.bbox.x1 * fx, tok.bbox.y1 * fy}
                   .clamped(out.page.width, out.page.height);
  }
  return out;
}

Document spatial_scale_augment(const Document& doc, Rng& rng) {
  const double fx = rng.uniform(0.8, 1.25);
  const double fy = rng.uniform(0.8, 1.25);
  return scale_bboxes(doc, fx, fy);
}

}  // namespace tilt
