#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcade/phash/phash.hpp"

namespace arcade::checkpoint {

inline constexpr int kDefaultThreshold = 12;
inline constexpr int kPackVersion = 1;

/// Reserved for crop-based matching; stored and round-tripped but not used when matching.
struct CropRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  bool operator==(const CropRect&) const = default;
};

struct Checkpoint {
  std::size_t index = 0;
  phash::PerceptualHash hash;
  std::int64_t timestamp_ms = 0;
  std::optional<int> threshold;  // falls back to the pack default
  std::string label;
  std::optional<CropRect> crop;

  bool operator==(const Checkpoint&) const = default;
};

struct CheckpointPack {
  std::string game_id;
  phash::HashAlgorithm algorithm = phash::HashAlgorithm::Difference;
  std::int64_t walkthrough_length_ms = 0;
  int default_threshold = kDefaultThreshold;
  std::vector<Checkpoint> checkpoints;

  /// A match requires hamming distance strictly below this value.
  int threshold_for(const Checkpoint& cp) const { return cp.threshold.value_or(default_threshold); }

  bool operator==(const CheckpointPack&) const = default;
};

enum class PackErrc { ParseError, UnsortedTimestamps, TimestampExceedsLength, BadThreshold, UnreadableImage };

class PackError : public std::runtime_error {
 public:
  PackError(PackErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  PackErrc code() const noexcept { return code_; }

 private:
  PackErrc code_;
};

/// Throws PackError unless the pack satisfies every structural invariant.
void validate(const CheckpointPack& pack);

CheckpointPack load_pack(std::istream& in);
CheckpointPack load_pack_file(const std::filesystem::path& path);
void save_pack(const CheckpointPack& pack, std::ostream& out);
void save_pack_file(const CheckpointPack& pack, const std::filesystem::path& path);

struct ManifestEntry {
  std::filesystem::path image;
  std::int64_t timestamp_ms = 0;
  std::optional<int> threshold;
  std::string label;
};

struct Manifest {
  std::string game_id;
  std::int64_t walkthrough_length_ms = 0;
  phash::HashAlgorithm algorithm = phash::HashAlgorithm::Difference;
  int default_threshold = kDefaultThreshold;
  std::vector<ManifestEntry> entries;
};

/// Reads a manifest document; relative image paths resolve against the manifest's directory.
Manifest load_manifest_file(const std::filesystem::path& path);

/// Hashes every manifest image with the pack's algorithm and returns a validated pack.
CheckpointPack build_pack(const Manifest& manifest);

}  // namespace arcade::checkpoint
