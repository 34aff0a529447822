#pragma once

namespace tilt {

// Relative-distance bucketing: bidirectional, 32 buckets. The sign picks the
// half (positive offsets start at bucket 16); |d| < 8 maps exactly; larger
// distances grow logarithmically up to max_distance, then clamp.
struct BucketConfig {
  int num_buckets = 32;
  int max_distance = 128;  // 128 for 1D token offsets, 64 for grid axes

  bool valid() const { return num_buckets % 2 == 0 && max_distance > num_buckets / 4; }
};

constexpr BucketConfig kBucket1D{32, 128};
constexpr BucketConfig kBucketAxis{32, 64};

// d = key position minus query position (token index or grid cells).
int bucket_1d(int d, const BucketConfig& cfg = kBucket1D);
int bucket_axis(int d, const BucketConfig& cfg = kBucketAxis);

}  // namespace tilt
