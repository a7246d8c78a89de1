#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bevclust/cluster.hpp"

namespace bevclust {

/// One scan as stored on disk: per point four little-endian 32-bit floats
/// (x, y, z, intensity). The intensity is parsed but unused by the pipeline.
struct ScanData {
  std::vector<std::array<float, 3>> xyz;
  std::vector<float> intensity;

  std::size_t size() const { return xyz.size(); }
};

/// Per point one little-endian 32-bit word: low 16 bits semantic class, high
/// 16 bits instance id.
struct LabelData {
  std::vector<std::uint32_t> semantic;
  std::vector<std::uint32_t> instance;

  std::size_t size() const { return semantic.size(); }
};

/// Reads a binary scan. Bit patterns are preserved exactly. Throws IoError on
/// filesystem failure and FormatError when the size is not a multiple of 16.
ScanData read_scan(const std::filesystem::path& path);

/// Bit-exact inverse of read_scan.
void write_scan(const std::filesystem::path& path, const ScanData& scan);

/// Reads a label file. Throws IoError / FormatError (size not a multiple
/// of 4).
LabelData read_labels(const std::filesystem::path& path);

/// Bit-exact inverse of read_labels. Values must fit in 16 bits; an overflow
/// throws ContractViolation naming the offending index.
void write_labels(const std::filesystem::path& path, std::span<const std::uint32_t> semantic,
                  std::span<const std::uint32_t> instance);

/// Line-oriented text scene: one point per line "x y z semantic [instance]",
/// '#' starts a comment. All point lines must have the same column count.
struct TextScene {
  PointCloud cloud;
  std::vector<std::uint32_t> instance;  // empty unless the file has 5 columns
  bool has_instance = false;
};

/// Parses a text scene; errors cite the line number.
TextScene read_text_scene(const std::filesystem::path& path);

/// Writes a text scene; floats are printed with enough digits to round-trip.
/// Pass an empty instance span to omit the fifth column.
void write_text_scene(const std::filesystem::path& path, const PointCloud& cloud,
                      std::span<const std::uint32_t> instance = {});

}  // namespace bevclust
