#include "turbfuse/deartifact.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <vector>

#include "turbfuse/dtcwt.hpp"
#include "turbfuse/error.hpp"
#include "turbfuse/image_io.hpp"

namespace turbfuse {

DeartifactMode parse_deartifact_mode(std::string_view text) {
  if (text == "builtin" || text == "builtin_shrinkage") return DeartifactMode::builtin_shrinkage;
  if (text == "external") return DeartifactMode::external;
  if (text == "none") return DeartifactMode::none;
  throw ConfigError("unknown deartifact mode '" + std::string(text) + "' (builtin|external|none)");
}

std::string_view to_string(DeartifactMode mode) noexcept {
  switch (mode) {
    case DeartifactMode::builtin_shrinkage: return "builtin";
    case DeartifactMode::external: return "external";
    case DeartifactMode::none: return "none";
  }
  return "unknown";
}

void DeartifactConfig::validate() const {
  if (quality_factor < 1 || quality_factor > 100)
    throw ConfigError("quality factor must be in [1,100], got " + std::to_string(quality_factor));
  if (mode == DeartifactMode::external) {
    if (external_cmd.empty()) throw ConfigError("external deartifact mode needs a command");
    for (const char* placeholder : {"{in}", "{out}", "{qf}"})
      if (external_cmd.find(placeholder) == std::string::npos)
        throw ConfigError(std::string("deartifact command lacks placeholder ") + placeholder);
  }
}

double shrinkage_strength(int quality_factor) {
  if (quality_factor < 1 || quality_factor > 100)
    throw ConfigError("quality factor must be in [1,100], got " + std::to_string(quality_factor));
  return std::clamp((100.0 - quality_factor) / 80.0, 0.0, 1.25);
}

std::pair<double, double> soft_threshold(double re, double im, double threshold) {
  const double magnitude = std::hypot(re, im);
  if (magnitude <= threshold || magnitude == 0.0) return {0.0, 0.0};
  const double gain = (magnitude - threshold) / magnitude;
  return {re * gain, im * gain};
}

namespace {

constexpr int kShrinkageLevels = 4;
constexpr double kMadToSigma = 0.6745;

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

Frame deartifact_builtin(const Frame& frame, const DeartifactConfig& config,
                         const FilterBank& bank) {
  config.validate();
  const double strength = shrinkage_strength(config.quality_factor);
  const int levels = max_dtcwt_levels(frame.width(), frame.height(), kShrinkageLevels);
  DtcwtPyramid pyr = dtcwt_forward(frame, levels, bank);

  std::vector<double> finest;
  for (const auto& s : pyr.levels.front().subbands)
    for (std::size_t i = 0; i < s.real.size(); ++i)
      finest.push_back(std::hypot(s.real.values()[i], s.imag.values()[i]));
  const double sigma = median(std::move(finest)) / kMadToSigma;

  for (auto& level : pyr.levels) {
    const double count = static_cast<double>(kOrientations) * level.width() * level.height();
    const double threshold = strength * sigma * std::sqrt(2.0 * std::log(count));
    if (!(threshold > 0.0)) continue;
    for (auto& s : level.subbands) {
      for (std::size_t i = 0; i < s.real.size(); ++i) {
        const auto [re, im] = soft_threshold(s.real.values()[i], s.imag.values()[i], threshold);
        s.real.values()[i] = re;
        s.imag.values()[i] = im;
      }
    }
  }
  Plane out = dtcwt_inverse_plane(pyr, bank);
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  return Frame(std::move(out));
}

std::string render_command(std::string_view command, std::string_view in, std::string_view out,
                           int quality_factor) {
  std::string result;
  const std::string qf = std::to_string(quality_factor);
  for (std::size_t i = 0; i < command.size();) {
    if (command.compare(i, 4, "{in}") == 0) {
      result += in;
      i += 4;
    } else if (command.compare(i, 5, "{out}") == 0) {
      result += out;
      i += 5;
    } else if (command.compare(i, 4, "{qf}") == 0) {
      result += qf;
      i += 4;
    } else {
      result += command[i++];
    }
  }
  return result;
}

namespace {

struct TempFiles {
  std::filesystem::path in;
  std::filesystem::path out;
  ~TempFiles() {
    std::error_code ec;
    std::filesystem::remove(in, ec);
    std::filesystem::remove(out, ec);
  }
};

TempFiles make_temp_paths() {
  static std::atomic<unsigned long> counter{0};
  const auto dir = std::filesystem::temp_directory_path();
  const std::string stem = "turbfuse_" + std::to_string(::getpid()) + "_" +
                           std::to_string(counter.fetch_add(1));
  return {dir / (stem + "_in.png"), dir / (stem + "_out.png")};
}

}  // namespace

Frame deartifact_external(const Frame& frame, const DeartifactConfig& config) {
  DeartifactConfig checked = config;
  checked.mode = DeartifactMode::external;
  checked.validate();

  const TempFiles files = make_temp_paths();
  save_frame(frame, files.in);
  const std::string command =
      render_command(config.external_cmd, files.in.string(), files.out.string(),
                     config.quality_factor);

  const int status = std::system(command.c_str());
  if (status == -1) throw Error("could not launch deartifact command: " + command);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    throw Error("deartifact command failed with exit status " + std::to_string(code) + ": " +
                command);
  }
  if (!std::filesystem::exists(files.out))
    throw Error("deartifact command produced no output image: " + command);
  Frame result;
  try {
    result = load_frame(files.out);
  } catch (const Error& e) {
    throw Error(std::string("deartifact command produced an invalid image (") + e.what() +
                "): " + command);
  }
  if (!result.same_shape(frame))
    throw Error("deartifact output is " + std::to_string(result.width()) + "x" +
                std::to_string(result.height()) + ", expected " + std::to_string(frame.width()) +
                "x" + std::to_string(frame.height()) + ": " + command);
  return result;
}

Frame deartifact(const Frame& frame, const DeartifactConfig& config, const FilterBank& bank) {
  config.validate();
  switch (config.mode) {
    case DeartifactMode::builtin_shrinkage: return deartifact_builtin(frame, config, bank);
    case DeartifactMode::external: return deartifact_external(frame, config);
    case DeartifactMode::none: return frame;
  }
  return frame;
}

}  // namespace turbfuse
