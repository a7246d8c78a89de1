#include "bevclust/io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bevclust/errors.hpp"

namespace bevclust {

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> buf(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(buf.data()), size)) {
    throw IoError("failed to read file: " + path.string());
  }
  return buf;
}

void write_file(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  if (!bytes.empty() && !out.write(reinterpret_cast<const char*>(bytes.data()),
                                   static_cast<std::streamsize>(bytes.size()))) {
    throw IoError("failed to write file: " + path.string());
  }
}

std::uint32_t load_le32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void store_le32(std::uint32_t v, unsigned char* b) {
  b[0] = static_cast<unsigned char>(v);
  b[1] = static_cast<unsigned char>(v >> 8);
  b[2] = static_cast<unsigned char>(v >> 16);
  b[3] = static_cast<unsigned char>(v >> 24);
}

float load_le_float(const unsigned char* b) { return std::bit_cast<float>(load_le32(b)); }

}  // namespace

ScanData read_scan(const std::filesystem::path& path) {
  const std::vector<unsigned char> buf = read_file(path);
  if (buf.size() % 16 != 0) {
    throw FormatError(path.string() + ": scan size " + std::to_string(buf.size()) +
                      " is not a multiple of 16 bytes");
  }
  const std::size_t n = buf.size() / 16;
  ScanData scan;
  scan.xyz.resize(n);
  scan.intensity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec = buf.data() + i * 16;
    scan.xyz[i] = {load_le_float(rec), load_le_float(rec + 4), load_le_float(rec + 8)};
    scan.intensity[i] = load_le_float(rec + 12);
  }
  return scan;
}

void write_scan(const std::filesystem::path& path, const ScanData& scan) {
  if (scan.intensity.size() != scan.xyz.size()) {
    throw ContractViolation("write_scan: xyz/intensity size mismatch");
  }
  std::vector<unsigned char> buf(scan.xyz.size() * 16);
  for (std::size_t i = 0; i < scan.xyz.size(); ++i) {
    unsigned char* rec = buf.data() + i * 16;
    store_le32(std::bit_cast<std::uint32_t>(scan.xyz[i][0]), rec);
    store_le32(std::bit_cast<std::uint32_t>(scan.xyz[i][1]), rec + 4);
    store_le32(std::bit_cast<std::uint32_t>(scan.xyz[i][2]), rec + 8);
    store_le32(std::bit_cast<std::uint32_t>(scan.intensity[i]), rec + 12);
  }
  write_file(path, buf);
}

LabelData read_labels(const std::filesystem::path& path) {
  const std::vector<unsigned char> buf = read_file(path);
  if (buf.size() % 4 != 0) {
    throw FormatError(path.string() + ": label size " + std::to_string(buf.size()) +
                      " is not a multiple of 4 bytes");
  }
  const std::size_t n = buf.size() / 4;
  LabelData labels;
  labels.semantic.resize(n);
  labels.instance.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t v = load_le32(buf.data() + i * 4);
    labels.semantic[i] = v & 0xffffu;
    labels.instance[i] = v >> 16;
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, std::span<const std::uint32_t> semantic,
                  std::span<const std::uint32_t> instance) {
  if (semantic.size() != instance.size()) {
    throw ContractViolation("write_labels: semantic/instance size mismatch");
  }
  std::vector<unsigned char> buf(semantic.size() * 4);
  for (std::size_t i = 0; i < semantic.size(); ++i) {
    if (semantic[i] > 0xffffu) {
      throw ContractViolation("write_labels: semantic id " + std::to_string(semantic[i]) +
                              " at index " + std::to_string(i) + " does not fit in 16 bits");
    }
    if (instance[i] > 0xffffu) {
      throw ContractViolation("write_labels: instance id " + std::to_string(instance[i]) +
                              " at index " + std::to_string(i) + " does not fit in 16 bits");
    }
    store_le32(semantic[i] | instance[i] << 16, buf.data() + i * 4);
  }
  write_file(path, buf);
}

TextScene read_text_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path.string());

  TextScene scene;
  int columns = 0;  // 4 or 5, fixed by the first point line
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);

    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string field;
    while (ss >> field) fields.push_back(field);
    if (fields.empty()) continue;

    const auto fail = [&](const std::string& msg) -> void {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (fields.size() != 4 && fields.size() != 5) {
      fail("expected 'x y z semantic [instance]', got " + std::to_string(fields.size()) +
           " fields");
    }
    if (columns == 0) {
      columns = static_cast<int>(fields.size());
    } else if (columns != static_cast<int>(fields.size())) {
      fail("inconsistent column count (file started with " + std::to_string(columns) + ")");
    }

    float xyz[3];
    for (int c = 0; c < 3; ++c) {
      const std::string& f = fields[c];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), xyz[c]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        fail("bad coordinate '" + f + "'");
      }
    }
    const auto parse_u32 = [&](const std::string& f, const char* what) {
      std::uint32_t v = 0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        fail("bad " + std::string(what) + " '" + f + "'");
      }
      return v;
    };
    scene.cloud.xyz.push_back({xyz[0], xyz[1], xyz[2]});
    scene.cloud.semantic.push_back(parse_u32(fields[3], "semantic id"));
    if (fields.size() == 5) scene.instance.push_back(parse_u32(fields[4], "instance id"));
  }
  scene.has_instance = columns == 5;
  return scene;
}

void write_text_scene(const std::filesystem::path& path, const PointCloud& cloud,
                      std::span<const std::uint32_t> instance) {
  if (!instance.empty() && instance.size() != cloud.size()) {
    throw ContractViolation("write_text_scene: instance/cloud size mismatch");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out << "# x y z semantic" << (instance.empty() ? "" : " instance") << "\n";
  char line[192];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.xyz[i];
    if (instance.empty()) {
      std::snprintf(line, sizeof line, "%.9g %.9g %.9g %u\n", p[0], p[1], p[2],
                    cloud.semantic[i]);
    } else {
      std::snprintf(line, sizeof line, "%.9g %.9g %.9g %u %u\n", p[0], p[1], p[2],
                    cloud.semantic[i], instance[i]);
    }
    out << line;
  }
  if (!out) throw IoError("failed to write file: " + path.string());
}

}  // namespace bevclust
