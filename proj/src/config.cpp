#include "turbfuse/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "turbfuse/error.hpp"

namespace turbfuse {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string normalize_key(std::string_view key) {
  std::string out(trim(key));
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

double to_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(text) +
                      "'");
  return value;
}

int to_int(std::string_view key, std::string_view text) {
  int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(text) +
                      "'");
  return value;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("'" + std::string(key) + "' expects true/false, got '" + std::string(text) +
                    "'");
}

std::string number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? end : buf);
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(select_fraction > 0.0 && select_fraction <= 1.0))
    throw ConfigError("select fraction must be in (0,1], got " + number(select_fraction));
  flow.validate();
  if (register_passes < 1) throw ConfigError("registration passes must be >= 1");
  fusion.validate();
  deartifact.validate();
  if (filter_bank.empty()) throw ConfigError("filter bank is empty");
  if (pattern.empty()) throw ConfigError("frame pattern is empty");
}

void apply_setting(PipelineConfig& config, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = normalize_key(raw_key);
  std::string_view value = trim(raw_value);
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
    value = value.substr(1, value.size() - 2);

  if (key == "select_fraction") {
    config.select_fraction = to_double(key, value);
  } else if (key == "flow_alpha") {
    config.flow.alpha = to_double(key, value);
  } else if (key == "flow_iters" || key == "flow_iterations") {
    config.flow.iterations = to_int(key, value);
  } else if (key == "flow_levels" || key == "flow_pyramid_levels") {
    if (value == "auto")
      config.flow.pyramid_levels.reset();
    else
      config.flow.pyramid_levels = to_int(key, value);
  } else if (key == "flow_scale") {
    config.flow.scale = to_double(key, value);
  } else if (key == "flow_warps") {
    config.flow.warps_per_level = to_int(key, value);
  } else if (key == "register_passes") {
    config.register_passes = to_int(key, value);
  } else if (key == "fusion_mode") {
    config.fusion.mode = parse_fusion_mode(value);
  } else if (key == "fusion_levels" || key == "levels") {
    config.fusion.levels = to_int(key, value);
  } else if (key == "region_threshold_k") {
    config.fusion.activity_threshold_k = to_double(key, value);
  } else if (key == "deartifact") {
    config.deartifact.mode = parse_deartifact_mode(value);
  } else if (key == "qf") {
    config.deartifact.quality_factor = to_int(key, value);
  } else if (key == "deartifact_cmd") {
    config.deartifact.external_cmd = std::string(value);
  } else if (key == "filter_bank") {
    config.filter_bank = std::string(value);
  } else if (key == "pattern") {
    config.pattern = std::string(value);
  } else if (key == "dump_dir") {
    if (value.empty())
      config.dump_dir.reset();
    else
      config.dump_dir = std::filesystem::path(std::string(value));
  } else if (key == "dump_flows") {
    config.dump_flows = to_bool(key, value);
  } else if (key == "dump_pyramid") {
    config.dump_pyramid = to_bool(key, value);
  } else if (key == "dump_regions") {
    config.dump_regions = to_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(raw_key) + "'");
  }
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '"') quoted = !quoted;
      if (text[i] == '#' && !quoted) {
        text = text.substr(0, i);
        break;
      }
    }
    text = trim(text);
    if (text.empty() || text.front() == '[') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      apply_setting(config, text.substr(0, eq), text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string describe(const PipelineConfig& c) {
  std::ostringstream out;
  out << "select_fraction=" << number(c.select_fraction) << '\n'
      << "flow_alpha=" << number(c.flow.alpha) << '\n'
      << "flow_iters=" << c.flow.iterations << '\n'
      << "flow_levels="
      << (c.flow.pyramid_levels ? std::to_string(*c.flow.pyramid_levels) : std::string("auto"))
      << '\n'
      << "flow_scale=" << number(c.flow.scale) << '\n'
      << "flow_warps=" << c.flow.warps_per_level << '\n'
      << "register_passes=" << c.register_passes << '\n'
      << "fusion_mode=" << to_string(c.fusion.mode) << '\n'
      << "fusion_levels=" << c.fusion.levels << '\n'
      << "region_threshold_k=" << number(c.fusion.activity_threshold_k) << '\n'
      << "deartifact=" << to_string(c.deartifact.mode) << '\n'
      << "qf=" << c.deartifact.quality_factor << '\n'
      << "deartifact_cmd=" << c.deartifact.external_cmd << '\n'
      << "filter_bank=" << c.filter_bank << '\n'
      << "pattern=" << c.pattern << '\n';
  return out.str();
}

}  // namespace turbfuse
