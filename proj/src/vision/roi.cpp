#include "tilt/vision/roi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tilt {

CellRect roi_cells(const BBox& bbox, double page_w, double page_h, int fm_w, int fm_h) {
  const double sx = fm_w / page_w;
  const double sy = fm_h / page_h;
  CellRect r;
  r.x0 = std::clamp(static_cast<int>(std::floor(bbox.x0 * sx)), 0, fm_w - 1);
  r.y0 = std::clamp(static_cast<int>(std::floor(bbox.y0 * sy)), 0, fm_h - 1);
  r.x1 = std::clamp(static_cast<int>(std::ceil(bbox.x1 * sx)) - 1, r.x0, fm_w - 1);
  r.y1 = std::clamp(static_cast<int>(std::ceil(bbox.y1 * sy)) - 1, r.y0, fm_h - 1);
  return r;
}

int roi_pool(Tape& t, int fm, std::span<const BBox> boxes, double page_w, double page_h) {
  const Tensor& vf = t.val(fm);
  TILT_SHAPE_CHECK(vf.ndim() == 3, "roi_pool: feature map must be [C,H,W]");
  const int fm_h = vf.dim(1), fm_w = vf.dim(2);
  std::vector<CellRect> rois;
  rois.reserve(boxes.size());
  for (const BBox& b : boxes) rois.push_back(roi_cells(b, page_w, page_h, fm_w, fm_h));
  return roi_maxpool(t, fm, rois);
}

int project_embed(Tape& t, int pooled, Parameter& proj_w, Parameter& proj_b) {
  return add_rowvec(t, matmul(t, pooled, t.param(proj_w)), t.param(proj_b));
}

}  // namespace tilt
