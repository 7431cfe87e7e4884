#include "signbias/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"

namespace signbias {

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + image.size());
  for (double v : image.pixels()) {
    const double r = std::clamp(std::round(v), 0.0, 255.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(r)));
  }
  return out;
}

namespace {

class PgmCursor {
 public:
  PgmCursor(std::string_view bytes, std::string_view source) : bytes_(bytes), source_(source) {}

  bool at_end() {
    skip_space_and_comments();
    return pos_ >= bytes_.size();
  }

  std::size_t read_uint() {
    skip_space_and_comments();
    std::size_t value = 0;
    bool any = false;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      any = true;
      ++pos_;
    }
    if (!any) fail("expected an unsigned integer");
    return value;
  }

  void expect_magic() {
    skip_space_and_comments();
    if (bytes_.substr(pos_, 2) != "P5") fail("expected P5 magic");
    pos_ += 2;
  }

  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("expected whitespace before raster");
    }
    ++pos_;
  }

  std::string_view take(std::size_t n) {
    if (pos_ + n > bytes_.size()) fail("truncated raster");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SchemaError(std::string(source_) + ": PGM " + msg);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<GrayImage> decode_pgm_stream(std::string_view bytes, std::string_view source) {
  PgmCursor cur(bytes, source);
  std::vector<GrayImage> frames;
  while (!cur.at_end()) {
    cur.expect_magic();
    const auto w = cur.read_uint();
    const auto h = cur.read_uint();
    const auto maxval = cur.read_uint();
    if (maxval == 0 || maxval > 255) cur.fail("only 8-bit maxval is supported");
    cur.single_whitespace();
    const auto raster = cur.take(w * h);
    GrayImage img(w, h);
    const double scale = 255.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < raster.size(); ++i) {
      img.pixels()[i] = static_cast<double>(static_cast<unsigned char>(raster[i])) * scale;
    }
    frames.push_back(std::move(img));
  }
  return frames;
}

void write_pgm_frames(const std::filesystem::path& path, const std::vector<GrayImage>& frames) {
  std::string bytes;
  for (const auto& f : frames) bytes += encode_pgm(f);
  write_text_file(path, bytes);
}

std::vector<GrayImage> read_pgm_frames(const std::filesystem::path& path) {
  return decode_pgm_stream(read_text_file(path), path.string());
}

}  // namespace signbias
