#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tilt::vocab {

// Byte-level vocabulary: 256 raw bytes, pad/bos/eos, 16 span sentinels.
// Sequences are never padded, so the pad id doubles as the slot carrying
// image-anchor tokens (which have no text of their own).
inline constexpr int kBytes = 256;
inline constexpr int kPad = 256;
inline constexpr int kBos = 257;
inline constexpr int kEos = 258;
inline constexpr int kSentinel0 = 259;
inline constexpr int kNumSentinels = 16;
inline constexpr int kSize = kSentinel0 + kNumSentinels;  // 275

inline int sentinel(int k) { return kSentinel0 + k; }
inline bool is_sentinel(int id) { return id >= kSentinel0 && id < kSentinel0 + kNumSentinels; }
inline bool is_byte(int id) { return id >= 0 && id < kBytes; }

inline std::vector<int> encode_text(std::string_view text) {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (unsigned char c : text) ids.push_back(static_cast<int>(c));
  return ids;
}

// Human-readable form: raw bytes pass through, specials become <pad>, <s3>, ...
inline std::string decode_text(std::span<const int> ids) {
  std::string out;
  for (int id : ids) {
    if (is_byte(id)) {
      out.push_back(static_cast<char>(id));
    } else if (id == kPad) {
      out += "<pad>";
    } else if (id == kBos) {
      out += "<bos>";
    } else if (id == kEos) {
      out += "<eos>";
    } else if (is_sentinel(id)) {
      out += "<s" + std::to_string(id - kSentinel0) + ">";
    } else {
      out += "<?" + std::to_string(id) + ">";
    }
  }
  return out;
}

// Bytes only, stops at eos; specials are dropped. Used for answers.
inline std::string decode_answer(std::span<const int> ids) {
  std::string out;
  for (int id : ids) {
    if (id == kEos) break;
    if (is_byte(id)) out.push_back(static_cast<char>(id));
  }
  return out;
}

}  // namespace tilt::vocab
