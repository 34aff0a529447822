#pragma once

#include <span>

#include "tilt/layout/geometry.hpp"
#include "tilt/numerics/ops.hpp"

namespace tilt {

// Feature-grid cells covered by a page-space bbox: inclusive cover, snapped
// to at least one cell, clamped to the grid.
CellRect roi_cells(const BBox& bbox, double page_w, double page_h, int fm_w, int fm_h);

// Channelwise max over each bbox's covered cells -> [n, C] node.
int roi_pool(Tape& t, int fm, std::span<const BBox> boxes, double page_w, double page_h);

// pooled [n, C] -> [n, d_model] through a learned affine map.
int project_embed(Tape& t, int pooled, Parameter& proj_w, Parameter& proj_b);

}  // namespace tilt
