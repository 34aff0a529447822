#include "tilt/bias/bucket.hpp"

#include <cmath>
#include <cstdlib>

#include "tilt/check.hpp"

namespace tilt {

int bucket_1d(int d, const BucketConfig& cfg) {
  TILT_CHECK(cfg.valid(), "bad bucket config");
  const int half = cfg.num_buckets / 2;
  const int max_exact = half / 2;
  int bucket = 0;
  if (d > 0) bucket += half;
  const int mag = std::abs(d);
  if (mag < max_exact) return bucket + mag;
  const double log_ratio =
      std::log(static_cast<double>(mag) / max_exact) /
      std::log(static_cast<double>(cfg.max_distance) / max_exact);
  const int coarse = max_exact + static_cast<int>(std::floor(log_ratio * max_exact));
  return bucket + std::min(coarse, half - 1);
}

int bucket_axis(int d, const BucketConfig& cfg) { return bucket_1d(d, cfg); }

}  // namespace tilt
