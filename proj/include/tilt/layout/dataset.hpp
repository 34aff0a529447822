#pragma once

#include <string>
#include <vector>

#include "tilt/layout/document.hpp"

namespace tilt {

// JSONL datasets, one document per line:
//   {"id": str,
//    "page": {"width": int, "height": int, "image_path": str|null},
//    "tokens": [{"text": str, "bbox": [x0,y0,x1,y1]}, ...],
//    "annotations": [{"task": "qa"|"kie"|"classify", "prompt": str, "answers": [str]}]}
// image_path is resolved relative to the JSONL file's directory.
std::vector<Document> load_dataset(const std::string& path);

// Inverse of load_dataset. Pages with rasters are written as <id>.pgm next to
// the JSONL file (under images_subdir) and referenced by relative path.
void save_dataset(const std::vector<Document>& docs, const std::string& path,
                  const std::string& images_subdir = "images");

}  // namespace tilt
