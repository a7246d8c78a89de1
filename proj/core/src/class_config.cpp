#include "bevclust/class_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include "bevclust/errors.hpp"

namespace bevclust {

const ClassInfo* ClassConfig::find(std::uint32_t id) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), id,
                                   [](const ClassInfo& c, std::uint32_t v) { return c.id < v; });
  if (it == classes.end() || it->id != id) return nullptr;
  return &*it;
}

const ClassInfo& ClassConfig::at(std::uint32_t id) const {
  const ClassInfo* c = find(id);
  if (!c) throw ContractViolation("unknown class id " + std::to_string(id));
  return *c;
}

bool ClassConfig::is_void(std::uint32_t label) const {
  return std::find(void_labels.begin(), void_labels.end(), label) != void_labels.end();
}

std::vector<const ClassInfo*> ClassConfig::thing_classes() const {
  std::vector<const ClassInfo*> out;
  for (const ClassInfo& c : classes) {
    if (c.thing) out.push_back(&c);
  }
  return out;
}

std::vector<const ClassInfo*> ClassConfig::stuff_classes() const {
  std::vector<const ClassInfo*> out;
  for (const ClassInfo& c : classes) {
    if (!c.thing) out.push_back(&c);
  }
  return out;
}

void apply_remap(std::vector<std::uint32_t>& semantic, const ClassConfig& config) {
  if (config.remap.empty()) return;
  for (std::uint32_t& s : semantic) {
    const auto it = config.remap.find(s);
    if (it != config.remap.end()) s = it->second;
  }
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct Parser {
  const std::string& source;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError(source + ":" + std::to_string(line_no) + ": " + msg);
  }

  double parse_double(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) fail("trailing characters in number '" + v + "'");
      return d;
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected a number, got '" + v + "'");
    }
  }

  std::uint64_t parse_uint(const std::string& v) const {
    try {
      std::size_t pos = 0;
      const unsigned long long u = std::stoull(v, &pos);
      if (pos != v.size()) fail("trailing characters in integer '" + v + "'");
      return u;
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected a non-negative integer, got '" + v + "'");
    }
  }
};

struct PendingClass {
  std::optional<std::uint32_t> id;
  std::string name;
  std::optional<bool> thing;
  std::optional<double> length;
  std::optional<double> width;
  int first_line = 0;
};

}  // namespace

ClassConfig parse_class_config(std::istream& in, const std::string& source_name) {
  ClassConfig cfg;
  cfg.void_labels = {0};

  enum class Section { kNone, kGlobal, kClass, kRemap };
  Section section = Section::kNone;
  Parser p{source_name};
  std::optional<PendingClass> pending;

  auto flush_class = [&](int line_for_errors) {
    if (!pending) return;
    Parser at{source_name, line_for_errors};
    const PendingClass& c = *pending;
    if (!c.id) at.fail("class block is missing 'id'");
    if (c.name.empty()) at.fail("class block is missing 'name'");
    if (!c.thing) at.fail("class block is missing 'kind' (thing|stuff)");
    ClassInfo info;
    info.id = *c.id;
    info.name = c.name;
    info.thing = *c.thing;
    if (info.thing) {
      if (!c.length || !c.width) at.fail("thing class '" + c.name + "' needs length and width");
      if (*c.length <= 0 || *c.width <= 0) {
        at.fail("thing class '" + c.name + "' needs positive length and width");
      }
      // Normalized so length is the long side; the threshold is the short one.
      info.length = std::max(*c.length, *c.width);
      info.width = std::min(*c.length, *c.width);
    }
    for (const ClassInfo& existing : cfg.classes) {
      if (existing.id == info.id) at.fail("duplicate class id " + std::to_string(info.id));
    }
    cfg.classes.push_back(std::move(info));
    pending.reset();
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++p.line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      flush_class(p.line_no);
      if (name == "global") {
        section = Section::kGlobal;
      } else if (name == "class") {
        section = Section::kClass;
        pending = PendingClass{};
        pending->first_line = p.line_no;
      } else if (name == "remap") {
        section = Section::kRemap;
      } else {
        p.fail("unknown section [" + name + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    if (value.empty()) p.fail("empty value for '" + key + "'");

    switch (section) {
      case Section::kNone:
        p.fail("'" + key + "' appears before any [global]/[class]/[remap] section");
      case Section::kGlobal: {
        if (key == "k") {
          cfg.k = p.parse_uint(value);
          if (cfg.k < 1) p.fail("k must be >= 1");
        } else if (key == "margin") {
          cfg.margin = p.parse_double(value);
          if (cfg.margin < 0) p.fail("margin must be >= 0");
        } else if (key == "epsilon") {
          cfg.epsilon = p.parse_double(value);
          if (cfg.epsilon <= 0) p.fail("epsilon must be > 0");
        } else if (key == "threshold_mode") {
          if (value == "constant") {
            cfg.threshold_mode = ThresholdMode::kConstant;
          } else if (value == "range_proportional") {
            cfg.threshold_mode = ThresholdMode::kRangeProportional;
          } else {
            p.fail("threshold_mode must be 'constant' or 'range_proportional'");
          }
        } else if (key == "range_coefficient") {
          cfg.range_coefficient = p.parse_double(value);
          if (cfg.range_coefficient < 0) p.fail("range_coefficient must be >= 0");
        } else if (key == "void_labels") {
          cfg.void_labels.clear();
          std::stringstream ss(value);
          std::string item;
          while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.void_labels.push_back(static_cast<std::uint32_t>(p.parse_uint(item)));
          }
        } else if (key == "min_segment_points") {
          cfg.min_segment_points = p.parse_uint(value);
        } else {
          p.fail("unknown global key '" + key + "'");
        }
        break;
      }
      case Section::kClass: {
        PendingClass& c = *pending;
        if (key == "id") {
          c.id = static_cast<std::uint32_t>(p.parse_uint(value));
        } else if (key == "name") {
          c.name = value;
        } else if (key == "kind") {
          if (value == "thing") {
            c.thing = true;
          } else if (value == "stuff") {
            c.thing = false;
          } else {
            p.fail("kind must be 'thing' or 'stuff'");
          }
        } else if (key == "length") {
          c.length = p.parse_double(value);
        } else if (key == "width") {
          c.width = p.parse_double(value);
        } else {
          p.fail("unknown class key '" + key + "'");
        }
        break;
      }
      case Section::kRemap: {
        const auto raw_id = static_cast<std::uint32_t>(p.parse_uint(key));
        const auto mapped = static_cast<std::uint32_t>(p.parse_uint(value));
        if (cfg.remap.count(raw_id)) p.fail("duplicate remap entry for " + key);
        cfg.remap[raw_id] = mapped;
        break;
      }
    }
  }
  flush_class(p.line_no);

  std::sort(cfg.classes.begin(), cfg.classes.end(),
            [](const ClassInfo& a, const ClassInfo& b) { return a.id < b.id; });
  if (cfg.threshold_mode == ThresholdMode::kRangeProportional && cfg.range_coefficient <= 0) {
    throw FormatError(source_name + ": threshold_mode range_proportional needs range_coefficient > 0");
  }
  return cfg;
}

ClassConfig load_class_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  return parse_class_config(in, path.filename().string());
}

}  // namespace bevclust
