#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace bevclust {

enum class ThresholdMode {
  kConstant,           // edge threshold is the class threshold t_c
  kRangeProportional,  // coefficient * t_c * max(range_u, range_v)
};

/// One semantic class. Thing classes carry a reference footprint
/// (length x width, meters, length >= width); the clustering threshold is the
/// smallest side of that footprint.
struct ClassInfo {
  std::uint32_t id = 0;
  std::string name;
  bool thing = false;
  double length = 0.0;
  double width = 0.0;

  double threshold() const { return width; }
};

/// Class table plus the global clustering and evaluation parameters, normally
/// loaded from a config file (see configs/ for the schema).
struct ClassConfig {
  std::vector<ClassInfo> classes;  // sorted by id, ids unique
  std::size_t k = 32;
  double margin = 0.30;
  double epsilon = 1e-3;
  ThresholdMode threshold_mode = ThresholdMode::kConstant;
  double range_coefficient = 0.0;
  std::vector<std::uint32_t> void_labels = {0};
  std::uint64_t min_segment_points = 0;
  std::unordered_map<std::uint32_t, std::uint32_t> remap;  // raw -> evaluated label

  const ClassInfo* find(std::uint32_t id) const;
  const ClassInfo& at(std::uint32_t id) const;  // throws ContractViolation if absent
  bool is_void(std::uint32_t label) const;
  std::vector<const ClassInfo*> thing_classes() const;  // ascending id
  std::vector<const ClassInfo*> stuff_classes() const;  // ascending id
};

/// Rewrites semantic labels through config.remap; labels without an entry are
/// kept as-is. No-op when the table is empty.
void apply_remap(std::vector<std::uint32_t>& semantic, const ClassConfig& config);

/// Parses the key/value config format. Errors cite source_name and the
/// offending line number. Validation errors (missing sizes, duplicate ids,
/// bad parameter ranges) throw FormatError as well.
ClassConfig parse_class_config(std::istream& in, const std::string& source_name);

ClassConfig load_class_config(const std::filesystem::path& path);

}  // namespace bevclust
