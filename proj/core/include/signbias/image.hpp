#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace signbias {

// Row-major grayscale image on the 0-255 intensity scale.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0)
      : width_(width), height_(height), pixels_(width * height, fill) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  double& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  const std::vector<double>& pixels() const noexcept { return pixels_; }
  std::vector<double>& pixels() noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
};

// Binary PGM (P5, maxval 255). A file may hold several images back to back,
// which netpbm permits; frames of one video are stored that way. Writing
// rounds and clamps to [0, 255].
std::string encode_pgm(const GrayImage& image);
std::vector<GrayImage> decode_pgm_stream(std::string_view bytes, std::string_view source);
void write_pgm_frames(const std::filesystem::path& path, const std::vector<GrayImage>& frames);
std::vector<GrayImage> read_pgm_frames(const std::filesystem::path& path);

}  // namespace signbias
