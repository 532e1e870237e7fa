#include "ergolab/construction_io.hpp"

#include "ergolab/error.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace ergolab::rank_one {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  for (char c : s) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigError, key + ": expected a non-negative integer, got '" + value + "'");
  }
}

std::vector<SpacerProfile> parse_stages(const std::string& value) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("stages: ") + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::ConfigError, "stages: expected [[r, [s0, ...]], ...]");
  std::vector<SpacerProfile> stages;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_unsigned() || !entry[1].is_array()) {
      fail(ErrorCode::ConfigError, "stages: malformed entry " + entry.dump());
    }
    SpacerProfile p;
    p.cuts = entry[0].get<std::uint32_t>();
    for (const auto& s : entry[1]) {
      if (!s.is_number_unsigned()) fail(ErrorCode::ConfigError, "stages: spacer counts must be non-negative integers");
      p.spacers.push_back(s.get<std::uint64_t>());
    }
    p.validate();
    stages.push_back(std::move(p));
  }
  return stages;
}

}  // namespace

Construction parse_construction(std::string_view text) {
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string key;
  std::string value;
  int depth = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (depth > 0) {
      value += ' ' + trim(line);
      depth += bracket_balance(line);
    } else {
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
      key = trim(std::string_view(t).substr(0, eq));
      value = trim(std::string_view(t).substr(eq + 1));
      depth = bracket_balance(value);
    }
    if (depth < 0) fail(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": unbalanced ']'");
    if (depth == 0) {
      if (!fields.emplace(key, value).second) fail(ErrorCode::ConfigError, "duplicate key '" + key + "'");
    }
  }
  if (depth != 0) fail(ErrorCode::ConfigError, "unterminated array for key '" + key + "'");

  Construction c;
  bool have_h1 = false;
  bool have_w1 = false;
  for (const auto& [k, v] : fields) {
    if (k == "h1") {
      c.initial_height = parse_count(k, v);
      have_h1 = true;
    } else if (k == "w1") {
      c.initial_base_width = parse_rational(unquote(v));
      have_w1 = true;
    } else if (k == "stages") {
      c.stages = parse_stages(v);
    } else if (k == "periodic") {
      if (v != "true" && v != "false") fail(ErrorCode::ConfigError, "periodic: expected true or false");
      c.periodic = v == "true";
    } else {
      fail(ErrorCode::ConfigError, "unknown key '" + k + "'");
    }
  }
  if (!have_h1 || !have_w1) fail(ErrorCode::ConfigError, "construction needs h1 and w1");
  c.validate();
  return c;
}

Construction load_construction(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open construction file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_construction(buf.str());
}

std::string format_construction(const Construction& c) {
  std::ostringstream out;
  out << "h1 = " << c.initial_height << "\n";
  out << "w1 = \"" << to_string(c.initial_base_width) << "\"\n";
  out << "stages = [";
  for (std::size_t i = 0; i < c.stages.size(); ++i) {
    const auto& p = c.stages[i];
    out << (i ? ", " : "") << "[" << p.cuts << ", [";
    for (std::size_t s = 0; s < p.spacers.size(); ++s) out << (s ? ", " : "") << p.spacers[s];
    out << "]]";
  }
  out << "]\n";
  out << "periodic = " << (c.periodic ? "true" : "false") << "\n";
  return out.str();
}

Construction preset(const std::string& name) {
  if (name == "chacon") return chacon();
  if (name == "asym5") return asym5();
  if (name == "asym5-junction") return asym5_junction();
  if (name.rfind("asym5-junction:", 0) == 0) {
    const auto relay = parse_count("asym5-junction", trim(name.substr(15)));
    if (relay < 2 || relay > 1000) fail(ErrorCode::UnknownPreset, "asym5-junction relay must be in [2, 1000]");
    return asym5_junction(static_cast<std::uint32_t>(relay));
  }
  if (name == "staircase") {
    const std::uint32_t cuts[] = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    return staircase(cuts);
  }
  if (name.rfind("staircase:", 0) == 0) {
    std::vector<std::uint32_t> cuts;
    std::istringstream in(name.substr(10));
    std::string item;
    while (std::getline(in, item, ',')) cuts.push_back(static_cast<std::uint32_t>(parse_count("staircase", trim(item))));
    if (cuts.empty()) fail(ErrorCode::UnknownPreset, "staircase preset needs cut counts");
    Construction c = staircase(cuts);
    c.validate();
    for (const auto& p : c.stages) p.validate();
    return c;
  }
  if (name.rfind("custom:", 0) == 0) return load_construction(name.substr(7));
  fail(ErrorCode::UnknownPreset, "unknown preset '" + name + "'");
}

}  // namespace ergolab::rank_one
