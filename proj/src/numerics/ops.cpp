#include "tilt/numerics/ops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace tilt {

namespace {

using EMat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using CMap = Eigen::Map<const EMat>;

CMap mat(const Tensor& t, int rows, int cols) { return CMap(t.data(), rows, cols); }
Map mat(Tensor& t, int rows, int cols) { return Map(t.data(), rows, cols); }

void check_2d(const Tensor& t, const char* who) {
  TILT_SHAPE_CHECK(t.ndim() == 2, who << " expects a 2D tensor, got " << t.ndim() << "D");
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* who) {
  TILT_SHAPE_CHECK(a.same_shape(b), who << ": operand shapes differ");
}

// im2col for [C,H,W] -> [C*kh*kw, H*W] with zero padding, stride 1.
void im2col(const Tensor& x, int kh, int kw, int pad, EMat& col) {
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  col.setZero(c * kh * kw, h * w);
  const real* xd = x.data();
  for (int ci = 0; ci < c; ++ci) {
    for (int dy = 0; dy < kh; ++dy) {
      for (int dx = 0; dx < kw; ++dx) {
        const int row = (ci * kh + dy) * kw + dx;
        for (int y = 0; y < h; ++y) {
          const int sy = y + dy - pad;
          if (sy < 0 || sy >= h) continue;
          const real* src = xd + (static_cast<int64_t>(ci) * h + sy) * w;
          real* dst = col.data() + static_cast<int64_t>(row) * h * w + static_cast<int64_t>(y) * w;
          for (int xx = 0; xx < w; ++xx) {
            const int sx = xx + dx - pad;
            if (sx >= 0 && sx < w) dst[xx] = src[sx];
          }
        }
      }
    }
  }
}

// Scatter-add inverse of im2col.
void col2im_add(const EMat& col, int c, int h, int w, int kh, int kw, int pad, Tensor& out) {
  real* od = out.data();
  for (int ci = 0; ci < c; ++ci) {
    for (int dy = 0; dy < kh; ++dy) {
      for (int dx = 0; dx < kw; ++dx) {
        const int row = (ci * kh + dy) * kw + dx;
        for (int y = 0; y < h; ++y) {
          const int sy = y + dy - pad;
          if (sy < 0 || sy >= h) continue;
          real* dst = od + (static_cast<int64_t>(ci) * h + sy) * w;
          const real* src =
              col.data() + static_cast<int64_t>(row) * h * w + static_cast<int64_t>(y) * w;
          for (int xx = 0; xx < w; ++xx) {
            const int sx = xx + dx - pad;
            if (sx >= 0 && sx < w) dst[sx] += src[xx];
          }
        }
      }
    }
  }
}

}  // namespace

int add(Tape& t, int a, int b) {
  const Tensor& va = t.val(a);
  const Tensor& vb = t.val(b);
  check_same_shape(va, vb, "add");
  Tensor out = Tensor::zeros(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] + vb[i];
  return t.push(std::move(out), {a, b}, [a, b](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& ga = tp.grad(a);
    Tensor& gb = tp.grad(b);
    for (int64_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] += g[i];
    }
  });
}

int sub(Tape& t, int a, int b) {
  const Tensor& va = t.val(a);
  const Tensor& vb = t.val(b);
  check_same_shape(va, vb, "sub");
  Tensor out = Tensor::zeros(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] - vb[i];
  return t.push(std::move(out), {a, b}, [a, b](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& ga = tp.grad(a);
    Tensor& gb = tp.grad(b);
    for (int64_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] -= g[i];
    }
  });
}

int mul(Tape& t, int a, int b) {
  const Tensor& va = t.val(a);
  const Tensor& vb = t.val(b);
  check_same_shape(va, vb, "mul");
  Tensor out = Tensor::zeros(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] * vb[i];
  return t.push(std::move(out), {a, b}, [a, b](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    const Tensor& va = tp.val(a);
    const Tensor& vb = tp.val(b);
    Tensor& ga = tp.grad(a);
    Tensor& gb = tp.grad(b);
    for (int64_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * vb[i];
      gb[i] += g[i] * va[i];
    }
  });
}

int scale(Tape& t, int a, real c) {
  const Tensor& va = t.val(a);
  Tensor out = Tensor::zeros(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] * c;
  return t.push(std::move(out), {a}, [a, c](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& ga = tp.grad(a);
    for (int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c;
  });
}

int relu(Tape& t, int a) {
  const Tensor& va = t.val(a);
  Tensor out = Tensor::zeros(va.shape());
  for (int64_t i = 0; i < out.size(); ++i) out[i] = va[i] > 0 ? va[i] : real(0);
  return t.push(std::move(out), {a}, [a](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    const Tensor& va = tp.val(a);
    Tensor& ga = tp.grad(a);
    for (int64_t i = 0; i < g.size(); ++i) {
      if (va[i] > 0) ga[i] += g[i];
    }
  });
}

int add_rowvec(Tape& t, int a, int v) {
  const Tensor& va = t.val(a);
  const Tensor& vv = t.val(v);
  check_2d(va, "add_rowvec");
  TILT_SHAPE_CHECK(vv.ndim() == 1 && vv.dim(0) == va.dim(1),
                   "add_rowvec: vector length " << vv.size() << " != columns " << va.dim(1));
  const int n = va.dim(0), m = va.dim(1);
  Tensor out = Tensor::zeros(va.shape());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = va.at(i, j) + vv[j];
  return t.push(std::move(out), {a, v}, [a, v, n, m](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& ga = tp.grad(a);
    Tensor& gv = tp.grad(v);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        ga.at(i, j) += g.at(i, j);
        gv[j] += g.at(i, j);
      }
  });
}

int matmul(Tape& t, int a, int b) {
  const Tensor& va = t.val(a);
  const Tensor& vb = t.val(b);
  check_2d(va, "matmul");
  check_2d(vb, "matmul");
  TILT_SHAPE_CHECK(va.dim(1) == vb.dim(0),
                   "matmul: inner dims " << va.dim(1) << " vs " << vb.dim(0));
  const int n = va.dim(0), k = va.dim(1), m = vb.dim(1);
  Tensor out = Tensor::zeros({n, m});
  mat(out, n, m).noalias() = mat(va, n, k) * mat(vb, k, m);
  return t.push(std::move(out), {a, b}, [a, b, n, k, m](Tape& tp, int id) {
    CMap g(tp.grad(id).data(), n, m);
    CMap va(tp.val(a).data(), n, k);
    CMap vb(tp.val(b).data(), k, m);
    Map ga(tp.grad(a).data(), n, k);
    Map gb(tp.grad(b).data(), k, m);
    ga.noalias() += g * vb.transpose();
    gb.noalias() += va.transpose() * g;
  });
}

int matmul_nt(Tape& t, int a, int b) {
  const Tensor& va = t.val(a);
  const Tensor& vb = t.val(b);
  check_2d(va, "matmul_nt");
  check_2d(vb, "matmul_nt");
  TILT_SHAPE_CHECK(va.dim(1) == vb.dim(1),
                   "matmul_nt: inner dims " << va.dim(1) << " vs " << vb.dim(1));
  const int n = va.dim(0), k = va.dim(1), m = vb.dim(0);
  Tensor out = Tensor::zeros({n, m});
  mat(out, n, m).noalias() = mat(va, n, k) * mat(vb, m, k).transpose();
  return t.push(std::move(out), {a, b}, [a, b, n, k, m](Tape& tp, int id) {
    CMap g(tp.grad(id).data(), n, m);
    CMap va(tp.val(a).data(), n, k);
    CMap vb(tp.val(b).data(), m, k);
    Map ga(tp.grad(a).data(), n, k);
    Map gb(tp.grad(b).data(), m, k);
    ga.noalias() += g * vb;
    gb.noalias() += g.transpose() * va;
  });
}

int softmax_rows(Tape& t, int a, bool causal) {
  const Tensor& va = t.val(a);
  check_2d(va, "softmax_rows");
  const int n = va.dim(0), m = va.dim(1);
  if (causal) TILT_SHAPE_CHECK(n == m, "causal softmax expects a square matrix");
  Tensor out = Tensor::zeros(va.shape());
  for (int i = 0; i < n; ++i) {
    const int limit = causal ? i + 1 : m;
    real mx = -std::numeric_limits<real>::infinity();
    for (int j = 0; j < limit; ++j) mx = std::max(mx, va.at(i, j));
    real sum = 0;
    for (int j = 0; j < limit; ++j) {
      const real e = std::exp(va.at(i, j) - mx);
      out.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < limit; ++j) out.at(i, j) /= sum;
  }
  return t.push(std::move(out), {a}, [a, n, m, causal](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    const Tensor& p = tp.val(id);
    Tensor& ga = tp.grad(a);
    for (int i = 0; i < n; ++i) {
      const int limit = causal ? i + 1 : m;
      real dot = 0;
      for (int j = 0; j < limit; ++j) dot += g.at(i, j) * p.at(i, j);
      for (int j = 0; j < limit; ++j) ga.at(i, j) += p.at(i, j) * (g.at(i, j) - dot);
    }
  });
}

int rms_norm(Tape& t, int x, int gain) {
  const Tensor& vx = t.val(x);
  const Tensor& vg = t.val(gain);
  check_2d(vx, "rms_norm");
  const int n = vx.dim(0), d = vx.dim(1);
  TILT_SHAPE_CHECK(d > 0, "rms_norm: zero-length rows");
  TILT_SHAPE_CHECK(vg.ndim() == 1 && vg.dim(0) == d,
                   "rms_norm: gain length " << vg.size() << " != " << d);
  constexpr real eps = real(1e-6);
  Tensor out = Tensor::zeros(vx.shape());
  Tensor inv_rms = Tensor::zeros({n});
  for (int i = 0; i < n; ++i) {
    real ms = 0;
    for (int j = 0; j < d; ++j) ms += vx.at(i, j) * vx.at(i, j);
    ms /= d;
    const real r = real(1) / std::sqrt(ms + eps);
    inv_rms[i] = r;
    for (int j = 0; j < d; ++j) out.at(i, j) = vx.at(i, j) * r * vg[j];
  }
  return t.push(std::move(out), {x, gain},
                [x, gain, n, d, inv_rms](Tape& tp, int id) {
                  const Tensor& g = tp.grad(id);
                  const Tensor& vx = tp.val(x);
                  const Tensor& vg = tp.val(gain);
                  Tensor& gx = tp.grad(x);
                  Tensor& gg = tp.grad(gain);
                  for (int i = 0; i < n; ++i) {
                    const real r = inv_rms[i];
                    real dot = 0;  // sum_k g_ik * gain_k * x_ik
                    for (int j = 0; j < d; ++j) dot += g.at(i, j) * vg[j] * vx.at(i, j);
                    for (int j = 0; j < d; ++j) {
                      gx.at(i, j) += g.at(i, j) * vg[j] * r - vx.at(i, j) * r * r * r * dot / d;
                      gg[j] += g.at(i, j) * vx.at(i, j) * r;
                    }
                  }
                });
}

int embed_rows(Tape& t, int table, const std::vector<int>& ids) {
  const Tensor& vt = t.val(table);
  check_2d(vt, "embed_rows");
  const int v = vt.dim(0), d = vt.dim(1);
  const int n = static_cast<int>(ids.size());
  Tensor out = Tensor::zeros({n, d});
  for (int i = 0; i < n; ++i) {
    TILT_SHAPE_CHECK(ids[i] >= 0 && ids[i] < v, "embed_rows: id " << ids[i] << " out of range");
    for (int j = 0; j < d; ++j) out.at(i, j) = vt.at(ids[i], j);
  }
  return t.push(std::move(out), {table}, [table, ids, n, d](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& gt = tp.grad(table);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) gt.at(ids[i], j) += g.at(i, j);
  });
}

int cross_entropy_rows(Tape& t, int logits, const std::vector<int>& targets) {
  const Tensor& vl = t.val(logits);
  check_2d(vl, "cross_entropy_rows");
  const int n = vl.dim(0), v = vl.dim(1);
  TILT_SHAPE_CHECK(static_cast<int>(targets.size()) == n,
                   "cross_entropy_rows: " << targets.size() << " targets for " << n << " rows");
  TILT_CHECK(n > 0, "cross_entropy_rows: empty target");
  // probs kept for backward
  Tensor probs = Tensor::zeros(vl.shape());
  real loss = 0;
  for (int i = 0; i < n; ++i) {
    TILT_SHAPE_CHECK(targets[i] >= 0 && targets[i] < v, "target id out of range");
    real mx = vl.at(i, 0);
    for (int j = 1; j < v; ++j) mx = std::max(mx, vl.at(i, j));
    real sum = 0;
    for (int j = 0; j < v; ++j) {
      const real e = std::exp(vl.at(i, j) - mx);
      probs.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < v; ++j) probs.at(i, j) /= sum;
    loss -= std::log(std::max(probs.at(i, targets[i]), std::numeric_limits<real>::min()));
  }
  loss /= n;
  return t.push(Tensor::from({1}, {loss}), {logits},
                [logits, targets, n, v, probs](Tape& tp, int id) {
                  const real seed = tp.grad(id)[0];
                  Tensor& gl = tp.grad(logits);
                  for (int i = 0; i < n; ++i)
                    for (int j = 0; j < v; ++j) {
                      const real one_hot = j == targets[i] ? real(1) : real(0);
                      gl.at(i, j) += seed * (probs.at(i, j) - one_hot) / n;
                    }
                });
}

int slice_cols(Tape& t, int a, int c0, int c1) {
  const Tensor& va = t.val(a);
  check_2d(va, "slice_cols");
  TILT_SHAPE_CHECK(c0 >= 0 && c1 <= va.dim(1) && c0 < c1, "slice_cols: bad range");
  const int n = va.dim(0), m = c1 - c0;
  Tensor out = Tensor::zeros({n, m});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = va.at(i, c0 + j);
  return t.push(std::move(out), {a}, [a, c0, n, m](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& ga = tp.grad(a);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) ga.at(i, c0 + j) += g.at(i, j);
  });
}

int concat_cols(Tape& t, const std::vector<int>& parts) {
  TILT_SHAPE_CHECK(!parts.empty(), "concat_cols: no parts");
  const int n = t.val(parts[0]).dim(0);
  int m = 0;
  for (int p : parts) {
    check_2d(t.val(p), "concat_cols");
    TILT_SHAPE_CHECK(t.val(p).dim(0) == n, "concat_cols: row mismatch");
    m += t.val(p).dim(1);
  }
  Tensor out = Tensor::zeros({n, m});
  int off = 0;
  for (int p : parts) {
    const Tensor& vp = t.val(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < vp.dim(1); ++j) out.at(i, off + j) = vp.at(i, j);
    off += vp.dim(1);
  }
  return t.push(std::move(out), parts, [parts, n](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    int off = 0;
    for (int p : parts) {
      Tensor& gp = tp.grad(p);
      const int w = gp.dim(1);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < w; ++j) gp.at(i, j) += g.at(i, off + j);
      off += w;
    }
  });
}

int slice_plane(Tape& t, int a, int plane) {
  const Tensor& va = t.val(a);
  TILT_SHAPE_CHECK(va.ndim() == 3, "slice_plane expects a 3D tensor");
  TILT_SHAPE_CHECK(plane >= 0 && plane < va.dim(0), "slice_plane: plane out of range");
  const int n = va.dim(1), m = va.dim(2);
  Tensor out = Tensor::zeros({n, m});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = va.at(plane, i, j);
  return t.push(std::move(out), {a}, [a, plane, n, m](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& ga = tp.grad(a);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) ga.at(plane, i, j) += g.at(i, j);
  });
}

int bias_from_tables(Tape& t, int seq, int horiz, int vert, const std::vector<int>& idx_seq,
                     const std::vector<int>& idx_h, const std::vector<int>& idx_v, int n) {
  const Tensor& ts = t.val(seq);
  const Tensor& th = t.val(horiz);
  const Tensor& tv = t.val(vert);
  check_2d(ts, "bias_from_tables");
  check_same_shape(ts, th, "bias_from_tables");
  check_same_shape(ts, tv, "bias_from_tables");
  const int buckets = ts.dim(0), heads = ts.dim(1);
  const size_t nn = static_cast<size_t>(n) * n;
  TILT_SHAPE_CHECK(idx_seq.size() == nn && idx_h.size() == nn && idx_v.size() == nn,
                   "bias_from_tables: index grid size mismatch");
  for (size_t i = 0; i < nn; ++i) {
    TILT_SHAPE_CHECK(idx_seq[i] >= 0 && idx_seq[i] < buckets && idx_h[i] >= 0 &&
                         idx_h[i] < buckets && idx_v[i] >= 0 && idx_v[i] < buckets,
                     "bias_from_tables: bucket id out of range");
  }
  Tensor out = Tensor::zeros({heads, n, n});
  for (int h = 0; h < heads; ++h)
    for (size_t ij = 0; ij < nn; ++ij)
      out[static_cast<int64_t>(h) * nn + ij] =
          ts.at(idx_seq[ij], h) + th.at(idx_h[ij], h) + tv.at(idx_v[ij], h);
  return t.push(std::move(out), {seq, horiz, vert},
                [seq, horiz, vert, idx_seq, idx_h, idx_v, n](Tape& tp, int id) {
                  const Tensor& g = tp.grad(id);
                  const int heads = g.dim(0);
                  const size_t nn = static_cast<size_t>(n) * n;
                  Tensor& gs = tp.grad(seq);
                  Tensor& gh = tp.grad(horiz);
                  Tensor& gv = tp.grad(vert);
                  for (int h = 0; h < heads; ++h)
                    for (size_t ij = 0; ij < nn; ++ij) {
                      const real gg = g[static_cast<int64_t>(h) * nn + ij];
                      gs.at(idx_seq[ij], h) += gg;
                      gh.at(idx_h[ij], h) += gg;
                      gv.at(idx_v[ij], h) += gg;
                    }
                });
}

int bias_from_table(Tape& t, int table, const std::vector<int>& idx, int n) {
  const Tensor& tb = t.val(table);
  check_2d(tb, "bias_from_table");
  const int buckets = tb.dim(0), heads = tb.dim(1);
  const size_t nn = static_cast<size_t>(n) * n;
  TILT_SHAPE_CHECK(idx.size() == nn, "bias_from_table: index grid size mismatch");
  for (size_t i = 0; i < nn; ++i) {
    TILT_SHAPE_CHECK(idx[i] >= 0 && idx[i] < buckets, "bias_from_table: bucket id out of range");
  }
  Tensor out = Tensor::zeros({heads, n, n});
  for (int h = 0; h < heads; ++h)
    for (size_t ij = 0; ij < nn; ++ij) out[static_cast<int64_t>(h) * nn + ij] = tb.at(idx[ij], h);
  return t.push(std::move(out), {table}, [table, idx, n](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    const int heads = g.dim(0);
    const size_t nn = static_cast<size_t>(n) * n;
    Tensor& gt = tp.grad(table);
    for (int h = 0; h < heads; ++h)
      for (size_t ij = 0; ij < nn; ++ij) gt.at(idx[ij], h) += g[static_cast<int64_t>(h) * nn + ij];
  });
}

int conv2d(Tape& t, int x, int w, int b, int pad) {
  const Tensor& vx = t.val(x);
  const Tensor& vw = t.val(w);
  const Tensor& vb = t.val(b);
  TILT_SHAPE_CHECK(vx.ndim() == 3, "conv2d input must be [C,H,W]");
  TILT_SHAPE_CHECK(vw.ndim() == 4, "conv2d weight must be [Cout,Cin,kh,kw]");
  const int cin = vx.dim(0), h = vx.dim(1), wd = vx.dim(2);
  const int cout = vw.dim(0), kh = vw.dim(2), kw = vw.dim(3);
  TILT_SHAPE_CHECK(vw.dim(1) == cin, "conv2d: channel mismatch " << vw.dim(1) << " vs " << cin);
  TILT_SHAPE_CHECK(vb.ndim() == 1 && vb.dim(0) == cout, "conv2d: bias length");
  TILT_SHAPE_CHECK(kh == 2 * pad + 1 && kw == 2 * pad + 1, "conv2d: only same-size output");

  EMat col;
  im2col(vx, kh, kw, pad, col);
  Tensor out = Tensor::zeros({cout, h, wd});
  Map om(out.data(), cout, h * wd);
  om.noalias() = mat(vw, cout, cin * kh * kw) * col;
  for (int co = 0; co < cout; ++co) om.row(co).array() += vb[co];

  return t.push(std::move(out), {x, w, b},
                [x, w, b, cin, h, wd, cout, kh, kw, pad](Tape& tp, int id) {
                  CMap g(tp.grad(id).data(), cout, h * wd);
                  const Tensor& vx = tp.val(x);
                  const Tensor& vw = tp.val(w);
                  // recompute col; cheaper than keeping it alive on the tape
                  EMat col;
                  im2col(vx, kh, kw, pad, col);
                  Map gw(tp.grad(w).data(), cout, cin * kh * kw);
                  gw.noalias() += g * col.transpose();
                  Tensor& gb = tp.grad(b);
                  for (int co = 0; co < cout; ++co) gb[co] += g.row(co).sum();
                  EMat gcol = mat(vw, cout, cin * kh * kw).transpose() * g;
                  col2im_add(gcol, cin, h, wd, kh, kw, pad, tp.grad(x));
                });
}

int maxpool2(Tape& t, int x) {
  const Tensor& vx = t.val(x);
  TILT_SHAPE_CHECK(vx.ndim() == 3, "maxpool2 input must be [C,H,W]");
  const int c = vx.dim(0), h = vx.dim(1), w = vx.dim(2);
  TILT_SHAPE_CHECK(h % 2 == 0 && w % 2 == 0, "maxpool2: dims must be even, got " << h << "x" << w);
  const int oh = h / 2, ow = w / 2;
  Tensor out = Tensor::zeros({c, oh, ow});
  auto argmax = std::make_shared<std::vector<uint8_t>>(static_cast<size_t>(c) * oh * ow);
  for (int ci = 0; ci < c; ++ci)
    for (int y = 0; y < oh; ++y)
      for (int xx = 0; xx < ow; ++xx) {
        real best = vx.at(ci, 2 * y, 2 * xx);
        uint8_t which = 0;
        for (uint8_t k = 1; k < 4; ++k) {
          const real v = vx.at(ci, 2 * y + (k >> 1), 2 * xx + (k & 1));
          if (v > best) {
            best = v;
            which = k;
          }
        }
        out.at(ci, y, xx) = best;
        (*argmax)[(static_cast<size_t>(ci) * oh + y) * ow + xx] = which;
      }
  return t.push(std::move(out), {x}, [x, c, oh, ow, argmax](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& gx = tp.grad(x);
    for (int ci = 0; ci < c; ++ci)
      for (int y = 0; y < oh; ++y)
        for (int xx = 0; xx < ow; ++xx) {
          const uint8_t k = (*argmax)[(static_cast<size_t>(ci) * oh + y) * ow + xx];
          gx.at(ci, 2 * y + (k >> 1), 2 * xx + (k & 1)) += g.at(ci, y, xx);
        }
  });
}

int upconv2(Tape& t, int x, int w, int b) {
  const Tensor& vx = t.val(x);
  const Tensor& vw = t.val(w);
  const Tensor& vb = t.val(b);
  TILT_SHAPE_CHECK(vx.ndim() == 3, "upconv2 input must be [C,H,W]");
  TILT_SHAPE_CHECK(vw.ndim() == 4 && vw.dim(2) == 2 && vw.dim(3) == 2,
                   "upconv2 weight must be [Cin,Cout,2,2]");
  const int cin = vx.dim(0), h = vx.dim(1), wd = vx.dim(2);
  TILT_SHAPE_CHECK(vw.dim(0) == cin, "upconv2: channel mismatch");
  const int cout = vw.dim(1);
  TILT_SHAPE_CHECK(vb.ndim() == 1 && vb.dim(0) == cout, "upconv2: bias length");
  Tensor out = Tensor::full({cout, 2 * h, 2 * wd}, 0);
  for (int co = 0; co < cout; ++co) {
    for (int y = 0; y < 2 * h; ++y)
      for (int xx = 0; xx < 2 * wd; ++xx) out.at(co, y, xx) = vb[co];
  }
  // each output cell has exactly one (input cell, tap) source
  for (int ci = 0; ci < cin; ++ci)
    for (int co = 0; co < cout; ++co) {
      const int64_t base = (static_cast<int64_t>(ci) * cout + co) * 4;
      const real w00 = vw[base + 0], w01 = vw[base + 1];
      const real w10 = vw[base + 2], w11 = vw[base + 3];
      for (int y = 0; y < h; ++y)
        for (int xx = 0; xx < wd; ++xx) {
          const real v = vx.at(ci, y, xx);
          out.at(co, 2 * y, 2 * xx) += w00 * v;
          out.at(co, 2 * y, 2 * xx + 1) += w01 * v;
          out.at(co, 2 * y + 1, 2 * xx) += w10 * v;
          out.at(co, 2 * y + 1, 2 * xx + 1) += w11 * v;
        }
    }
  return t.push(std::move(out), {x, w, b}, [x, w, b, cin, h, wd](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    const Tensor& vx = tp.val(x);
    const Tensor& vw = tp.val(w);
    const int cout = vw.dim(1);
    Tensor& gx = tp.grad(x);
    Tensor& gw = tp.grad(w);
    Tensor& gb = tp.grad(b);
    for (int co = 0; co < cout; ++co)
      for (int y = 0; y < 2 * h; ++y)
        for (int xx = 0; xx < 2 * wd; ++xx) gb[co] += g.at(co, y, xx);
    for (int ci = 0; ci < cin; ++ci)
      for (int co = 0; co < cout; ++co)
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const int64_t widx = ((static_cast<int64_t>(ci) * cout + co) * 2 + dy) * 2 + dx;
            real acc = 0;
            for (int y = 0; y < h; ++y)
              for (int xx = 0; xx < wd; ++xx) {
                const real go = g.at(co, 2 * y + dy, 2 * xx + dx);
                acc += go * vx.at(ci, y, xx);
                gx.at(ci, y, xx) += go * vw[widx];
              }
            gw[widx] += acc;
          }
  });
}

int concat_channels(Tape& t, int a, int b) {
  const Tensor& va = t.val(a);
  const Tensor& vb = t.val(b);
  TILT_SHAPE_CHECK(va.ndim() == 3 && vb.ndim() == 3, "concat_channels expects [C,H,W]");
  TILT_SHAPE_CHECK(va.dim(1) == vb.dim(1) && va.dim(2) == vb.dim(2),
                   "concat_channels: spatial dims differ");
  const int ca = va.dim(0), cb = vb.dim(0), h = va.dim(1), w = va.dim(2);
  Tensor out = Tensor::zeros({ca + cb, h, w});
  const int64_t plane = static_cast<int64_t>(h) * w;
  for (int64_t i = 0; i < ca * plane; ++i) out[i] = va[i];
  for (int64_t i = 0; i < cb * plane; ++i) out[ca * plane + i] = vb[i];
  return t.push(std::move(out), {a, b}, [a, b, ca, cb, plane](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& ga = tp.grad(a);
    Tensor& gb = tp.grad(b);
    for (int64_t i = 0; i < ca * plane; ++i) ga[i] += g[i];
    for (int64_t i = 0; i < cb * plane; ++i) gb[i] += g[ca * plane + i];
  });
}

int roi_maxpool(Tape& t, int fm, const std::vector<CellRect>& rois) {
  const Tensor& vf = t.val(fm);
  TILT_SHAPE_CHECK(vf.ndim() == 3, "roi_maxpool input must be [C,H,W]");
  const int c = vf.dim(0), h = vf.dim(1), w = vf.dim(2);
  const int n = static_cast<int>(rois.size());
  for (const CellRect& r : rois) {
    TILT_SHAPE_CHECK(r.x0 >= 0 && r.y0 >= 0 && r.x1 >= r.x0 && r.y1 >= r.y0 && r.x1 < w &&
                         r.y1 < h,
                     "roi_maxpool: roi outside grid");
  }
  Tensor out = Tensor::zeros({n, c});
  // argmax cell per (roi, channel), first-max in row-major scan order
  auto argmax = std::make_shared<std::vector<int>>(static_cast<size_t>(n) * c);
  for (int i = 0; i < n; ++i) {
    const CellRect& r = rois[i];
    for (int ci = 0; ci < c; ++ci) {
      real best = vf.at(ci, r.y0, r.x0);
      int cell = r.y0 * w + r.x0;
      for (int y = r.y0; y <= r.y1; ++y)
        for (int x = r.x0; x <= r.x1; ++x) {
          const real v = vf.at(ci, y, x);
          if (v > best) {
            best = v;
            cell = y * w + x;
          }
        }
      out.at(i, ci) = best;
      (*argmax)[static_cast<size_t>(i) * c + ci] = cell;
    }
  }
  return t.push(std::move(out), {fm}, [fm, n, c, w, argmax](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& gf = tp.grad(fm);
    for (int i = 0; i < n; ++i)
      for (int ci = 0; ci < c; ++ci) {
        const int cell = (*argmax)[static_cast<size_t>(i) * c + ci];
        gf.at(ci, cell / w, cell % w) += g.at(i, ci);
      }
  });
}

int dropout(Tape& t, int a, real p, Rng& rng) {
  if (p <= 0) return a;
  TILT_CHECK(p < 1, "dropout probability must be < 1");
  const Tensor& va = t.val(a);
  auto mask = std::make_shared<std::vector<uint8_t>>(static_cast<size_t>(va.size()));
  const real inv_keep = real(1) / (real(1) - p);
  Tensor out = Tensor::zeros(va.shape());
  for (int64_t i = 0; i < va.size(); ++i) {
    const bool keep = rng.uniform() >= p;
    (*mask)[static_cast<size_t>(i)] = keep;
    out[i] = keep ? va[i] * inv_keep : real(0);
  }
  return t.push(std::move(out), {a}, [a, mask, inv_keep](Tape& tp, int id) {
    const Tensor& g = tp.grad(id);
    Tensor& ga = tp.grad(a);
    for (int64_t i = 0; i < g.size(); ++i) {
      if ((*mask)[static_cast<size_t>(i)]) ga[i] += g[i] * inv_keep;
    }
  });
}

}  // namespace tilt
