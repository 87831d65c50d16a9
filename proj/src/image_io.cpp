#include "turbfuse/image_io.hpp"

#include <fnmatch.h>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "turbfuse/error.hpp"

namespace turbfuse {
namespace fs = std::filesystem;

double luminance_from_rgb(std::uint32_t r, std::uint32_t g, std::uint32_t b,
                          std::uint32_t max_code) noexcept {
  const std::uint64_t weighted = 299ull * r + 587ull * g + 114ull * b;
  return static_cast<double>(weighted) / (1000.0 * static_cast<double>(max_code));
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Raw decoded samples before luminance conversion.
struct DecodedImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (rgb)
  std::uint32_t max_code = 255;
  std::vector<std::uint32_t> samples;  // interleaved
};

Frame to_frame(const DecodedImage& img) {
  Plane p(img.width, img.height);
  auto out = p.values();
  const double max_code = img.max_code;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (img.channels == 1) {
      out[i] = img.samples[i] / max_code;
    } else {
      const auto* px = &img.samples[i * 3];
      out[i] = luminance_from_rgb(px[0], px[1], px[2], img.max_code);
    }
  }
  for (double& v : out) v = std::min(v, 1.0);
  return Frame(std::move(p));
}

// Only trivially destructible locals live in this frame: libpng reports
// errors through longjmp.
bool png_decode(std::FILE* fp, png_structp png, png_infop info) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_STRIP_ALPHA, nullptr);
  return true;
}

DecodedImage read_png(const fs::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng initialisation failed for " + path.string());
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_read_struct(png, info, nullptr); }
  } guard{&png, &info};
  if (!info) throw IoError("libpng initialisation failed for " + path.string());

  if (!png_decode(fp.get(), png, info)) throw IoError("invalid PNG file " + path.string());

  DecodedImage img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  switch (color) {
    case PNG_COLOR_TYPE_GRAY:
      img.channels = 1;
      break;
    case PNG_COLOR_TYPE_RGB:
      img.channels = 3;
      break;
    default:
      throw IoError("unsupported PNG colour type in " + path.string());
  }
  if (depth != 8 && depth != 16) throw IoError("unsupported PNG bit depth in " + path.string());
  img.max_code = depth == 16 ? 65535u : 255u;

  png_bytepp rows = png_get_rows(png, info);
  const std::size_t row_samples = static_cast<std::size_t>(img.width) * img.channels;
  img.samples.resize(row_samples * img.height);
  for (int y = 0; y < img.height; ++y) {
    const png_bytep row = rows[y];
    for (std::size_t i = 0; i < row_samples; ++i) {
      img.samples[y * row_samples + i] =
          depth == 16 ? (static_cast<std::uint32_t>(row[2 * i]) << 8) | row[2 * i + 1]
                      : row[i];
    }
  }
  return img;
}

DecodedImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  auto next_token = [&]() -> std::string {
    std::string token;
    char c;
    while (in.get(c)) {
      if (c == '#') {
        std::string ignored;
        std::getline(in, ignored);
        if (!token.empty()) break;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!token.empty()) break;
        continue;
      }
      token.push_back(c);
    }
    return token;
  };

  if (next_token() != "P5") throw IoError("not a binary PGM (P5) file: " + path.string());
  DecodedImage img;
  img.channels = 1;
  try {
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    img.max_code = static_cast<std::uint32_t>(std::stoul(next_token()));
  } catch (const std::exception&) {
    throw IoError("malformed PGM header in " + path.string());
  }
  if (img.width <= 0 || img.height <= 0 || img.max_code == 0 || img.max_code > 65535)
    throw IoError("malformed PGM header in " + path.string());

  const bool wide = img.max_code > 255;
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  std::vector<unsigned char> raw(count * (wide ? 2 : 1));
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw IoError("truncated PGM data in " + path.string());
  img.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    img.samples[i] = wide ? (static_cast<std::uint32_t>(raw[2 * i]) << 8) | raw[2 * i + 1]
                          : raw[i];
  }
  return img;
}

bool png_encode(std::FILE* fp, png_structp png, png_infop info, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_rows(png, info, rows);
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  return true;
}

void write_png_8bit(const fs::path& path, int width, int height, int color_type,
                    std::vector<unsigned char>& pixels, const std::vector<png_color>* palette) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng initialisation failed for " + path.string());
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* png;
    png_infop* info;
    ~Guard() { png_destroy_write_struct(png, info); }
  } guard{&png, &info};
  if (!info) throw IoError("libpng initialisation failed for " + path.string());

  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (palette)
    png_set_PLTE(png, info, palette->data(), static_cast<int>(palette->size()));

  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = pixels.data() + static_cast<std::size_t>(y) * width;
  if (!png_encode(fp.get(), png, info, rows.data()))
    throw IoError("failed to encode PNG " + path.string());
  if (std::fflush(fp.get()) != 0) throw IoError("failed to write " + path.string());
}

std::string lowercase_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

Frame load_frame(const fs::path& path) {
  const std::string ext = lowercase_extension(path);
  if (ext == ".pgm") return to_frame(read_pgm(path));
  return to_frame(read_png(path));
}

FrameSequence load_sequence(const fs::path& dir, std::string_view pattern) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());

  const std::string glob(pattern);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (fnmatch(glob.c_str(), name.c_str(), 0) == 0) files.push_back(entry.path());
  }
  if (files.empty())
    throw IoError("no frames found in " + dir.string() + " matching '" + glob + "'");
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  std::vector<Frame> frames;
  std::vector<std::string> ids;
  frames.reserve(files.size());
  ids.reserve(files.size());
  for (const auto& file : files) {
    Frame f = load_frame(file);
    if (!frames.empty() && !f.same_shape(frames.front())) {
      throw IoError("inconsistent frame size: " + file.filename().string() + " is " +
                    std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                    ", expected " + std::to_string(frames.front().width()) + "x" +
                    std::to_string(frames.front().height()));
    }
    frames.push_back(std::move(f));
    ids.push_back(file.filename().string());
  }
  return FrameSequence(std::move(frames), std::move(ids));
}

void save_frame(const Frame& frame, const fs::path& path) {
  if (frame.width() == 0 || frame.height() == 0) throw IoError("cannot save empty frame");
  std::vector<unsigned char> pixels(frame.pixels().size());
  const auto values = frame.pixels().values();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = static_cast<unsigned char>(std::lround(std::clamp(values[i], 0.0, 1.0) * 255.0));
  }
  write_png_8bit(path, frame.width(), frame.height(), PNG_COLOR_TYPE_GRAY, pixels, nullptr);
}

void save_label_png(std::span<const int> labels, int width, int height, const fs::path& path) {
  if (labels.size() != static_cast<std::size_t>(width) * height)
    throw Error("label image size mismatch");
  std::vector<png_color> palette(256);
  palette[0] = {0, 0, 0};
  for (int i = 1; i < 256; ++i) {
    // Golden-ratio hue walk keeps neighbouring labels visually distinct.
    const double h = std::fmod(i * 0.618033988749895, 1.0) * 6.0;
    const double f = h - std::floor(h);
    const auto hi = static_cast<int>(h);
    const auto q = static_cast<png_byte>(255 * (1 - f));
    const auto t = static_cast<png_byte>(255 * f);
    switch (hi % 6) {
      case 0: palette[i] = {255, t, 0}; break;
      case 1: palette[i] = {q, 255, 0}; break;
      case 2: palette[i] = {0, 255, t}; break;
      case 3: palette[i] = {0, q, 255}; break;
      case 4: palette[i] = {t, 0, 255}; break;
      default: palette[i] = {255, 0, q}; break;
    }
  }
  std::vector<unsigned char> pixels(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    pixels[i] = labels[i] <= 0 ? 0 : static_cast<unsigned char>(1 + (labels[i] - 1) % 255);
  write_png_8bit(path, width, height, PNG_COLOR_TYPE_PALETTE, pixels, &palette);
}

}  // namespace turbfuse
