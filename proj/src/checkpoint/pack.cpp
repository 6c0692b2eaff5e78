#include "arcade/checkpoint/pack.hpp"

#include <fstream>
#include <json.hpp>

#include "arcade/image/image_io.hpp"

namespace arcade::checkpoint {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { throw PackError(PackErrc::ParseError, what); }

template <typename T>
T required(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    parse_fail(std::string("field '") + key + "': " + e.what());
  }
}

void check_threshold(int t, const std::string& where) {
  if (t < 0 || t > 64) {
    throw PackError(PackErrc::BadThreshold, where + " threshold " + std::to_string(t) + " outside 0..64");
  }
}

void check_timestamps(const std::vector<std::int64_t>& stamps, std::int64_t length) {
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    if (stamps[i] < 0) throw PackError(PackErrc::ParseError, "negative timestamp");
    if (i > 0 && stamps[i] <= stamps[i - 1]) {
      throw PackError(PackErrc::UnsortedTimestamps, "checkpoint " + std::to_string(i) + " at " +
                                                         std::to_string(stamps[i]) + " ms does not follow " +
                                                         std::to_string(stamps[i - 1]) + " ms");
    }
    if (stamps[i] > length) {
      throw PackError(PackErrc::TimestampExceedsLength, "checkpoint " + std::to_string(i) + " at " +
                                                             std::to_string(stamps[i]) +
                                                             " ms exceeds walkthrough length " +
                                                             std::to_string(length) + " ms");
    }
  }
}

phash::HashAlgorithm parse_algorithm(const std::string& tag) {
  try {
    return phash::algorithm_from_tag(tag);
  } catch (const phash::HashError& e) {
    parse_fail(e.what());
  }
}

}  // namespace

void validate(const CheckpointPack& pack) {
  if (pack.game_id.empty()) parse_fail("empty game_id");
  if (pack.walkthrough_length_ms <= 0) parse_fail("walkthrough_length_ms must be positive");
  check_threshold(pack.default_threshold, "default");
  std::vector<std::int64_t> stamps;
  for (std::size_t i = 0; i < pack.checkpoints.size(); ++i) {
    const auto& cp = pack.checkpoints[i];
    if (cp.index != i) parse_fail("checkpoint indices must be contiguous from 0");
    if (cp.hash.algorithm != pack.algorithm) parse_fail("checkpoint " + std::to_string(i) + " uses another hash algorithm");
    if (cp.threshold) check_threshold(*cp.threshold, "checkpoint " + std::to_string(i));
    stamps.push_back(cp.timestamp_ms);
  }
  check_timestamps(stamps, pack.walkthrough_length_ms);
}

CheckpointPack load_pack(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
  if (!doc.is_object()) parse_fail("pack must be an object");
  if (required<int>(doc, "version") != kPackVersion) parse_fail("unsupported pack version");

  CheckpointPack pack;
  pack.game_id = required<std::string>(doc, "game_id");
  pack.algorithm = parse_algorithm(required<std::string>(doc, "algorithm"));
  pack.walkthrough_length_ms = required<std::int64_t>(doc, "walkthrough_length_ms");
  pack.default_threshold = doc.contains("default_threshold") ? required<int>(doc, "default_threshold")
                                                             : kDefaultThreshold;
  const auto& list = doc.find("checkpoints");
  if (list == doc.end() || !list->is_array()) parse_fail("missing checkpoints array");
  for (const auto& item : *list) {
    if (!item.is_object()) parse_fail("checkpoint must be an object");
    Checkpoint cp;
    cp.index = required<std::size_t>(item, "index");
    try {
      cp.hash = phash::parse_hash(required<std::string>(item, "hash"));
    } catch (const phash::HashError& e) {
      parse_fail(e.what());
    }
    cp.timestamp_ms = required<std::int64_t>(item, "timestamp_ms");
    if (item.contains("threshold") && !item["threshold"].is_null()) cp.threshold = required<int>(item, "threshold");
    cp.label = required<std::string>(item, "label");
    if (item.contains("crop") && !item["crop"].is_null()) {
      const auto& c = item["crop"];
      cp.crop = CropRect{required<int>(c, "x"), required<int>(c, "y"), required<int>(c, "width"),
                         required<int>(c, "height")};
    }
    pack.checkpoints.push_back(std::move(cp));
  }
  validate(pack);
  return pack;
}

CheckpointPack load_pack_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open pack " + path.string());
  return load_pack(in);
}

void save_pack(const CheckpointPack& pack, std::ostream& out) {
  json doc = {{"version", kPackVersion},
              {"game_id", pack.game_id},
              {"algorithm", std::string(phash::algorithm_tag(pack.algorithm))},
              {"walkthrough_length_ms", pack.walkthrough_length_ms},
              {"default_threshold", pack.default_threshold},
              {"checkpoints", json::array()}};
  for (const auto& cp : pack.checkpoints) {
    json item = {{"index", cp.index},
                 {"hash", phash::to_string(cp.hash)},
                 {"timestamp_ms", cp.timestamp_ms},
                 {"label", cp.label}};
    if (cp.threshold) item["threshold"] = *cp.threshold;
    if (cp.crop) item["crop"] = {{"x", cp.crop->x}, {"y", cp.crop->y}, {"width", cp.crop->width}, {"height", cp.crop->height}};
    doc["checkpoints"].push_back(std::move(item));
  }
  out << doc.dump(2) << '\n';
}

void save_pack_file(const CheckpointPack& pack, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pack " + path.string());
  save_pack(pack, out);
}

Manifest load_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
  Manifest m;
  m.game_id = required<std::string>(doc, "game_id");
  m.walkthrough_length_ms = required<std::int64_t>(doc, "walkthrough_length_ms");
  if (doc.contains("algorithm")) m.algorithm = parse_algorithm(required<std::string>(doc, "algorithm"));
  if (doc.contains("default_threshold")) m.default_threshold = required<int>(doc, "default_threshold");
  const auto base = path.parent_path();
  const auto& list = doc.find("checkpoints");
  if (list == doc.end() || !list->is_array()) parse_fail("missing checkpoints array");
  for (const auto& item : *list) {
    ManifestEntry e;
    std::filesystem::path image = required<std::string>(item, "image");
    e.image = image.is_absolute() ? image : base / image;
    e.timestamp_ms = required<std::int64_t>(item, "timestamp_ms");
    if (item.contains("threshold")) e.threshold = required<int>(item, "threshold");
    e.label = item.value("label", std::string{});
    m.entries.push_back(std::move(e));
  }
  return m;
}

CheckpointPack build_pack(const Manifest& manifest) {
  std::vector<std::int64_t> stamps;
  for (const auto& e : manifest.entries) stamps.push_back(e.timestamp_ms);
  check_timestamps(stamps, manifest.walkthrough_length_ms);

  CheckpointPack pack;
  pack.game_id = manifest.game_id;
  pack.algorithm = manifest.algorithm;
  pack.walkthrough_length_ms = manifest.walkthrough_length_ms;
  pack.default_threshold = manifest.default_threshold;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    Frame frame = [&] {
      try {
        return image::load_image(e.image);
      } catch (const image::ImageError& err) {
        throw PackError(PackErrc::UnreadableImage, err.what());
      }
    }();
    Checkpoint cp;
    cp.index = i;
    try {
      cp.hash = phash::compute_hash(frame, manifest.algorithm);
    } catch (const phash::HashError& err) {
      throw PackError(PackErrc::UnreadableImage, e.image.string() + ": " + err.what());
    }
    cp.timestamp_ms = e.timestamp_ms;
    cp.threshold = e.threshold;
    cp.label = e.label.empty() ? "checkpoint " + std::to_string(i) : e.label;
    pack.checkpoints.push_back(std::move(cp));
  }
  validate(pack);
  return pack;
}

}  // namespace arcade::checkpoint
