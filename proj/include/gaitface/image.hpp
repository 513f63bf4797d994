#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace gaitface {

// Interleaved 8-bit RGB image.
struct ImageU8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // size = width * height * 3, row-major

  bool empty() const { return width <= 0 || height <= 0 || rgb.empty(); }

  std::uint8_t r(int y, int x) const { return rgb[3 * (y * width + x) + 0]; }
  std::uint8_t g(int y, int x) const { return rgb[3 * (y * width + x) + 1]; }
  std::uint8_t b(int y, int x) const { return rgb[3 * (y * width + x) + 2]; }
};

// Binary foreground mask; nonzero = foreground.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // size = width * height, row-major

  bool empty() const { return width <= 0 || height <= 0 || data.empty(); }
  bool foreground(int y, int x) const { return data[y * width + x] != 0; }
};

// One preprocessed grayscale frame: normalized intensities, H x W.
struct GrayscaleFrame {
  Eigen::MatrixXd pixels;  // rows = H, cols = W
  int source_index = 0;
};

// Normalization constants. Defaults are the luma projection of the ImageNet
// channel statistics: mu = 0.299*0.485 + 0.587*0.456 + 0.114*0.406,
// sigma likewise over (0.229, 0.224, 0.225), rounded to the documented
// 0.449 / 0.226 pair.
struct NormalizeStats {
  double mean = 0.449;
  double stddev = 0.226;
};

// Luma grayscale of an RGB image, values in [0, 1]. Uses integer-weighted
// (299 R + 587 G + 114 B) / 1000 so gray inputs (r = g = b) map to the
// channel value exactly.
Eigen::MatrixXd to_grayscale(const ImageU8& image);

// Bilinear resize with pixel-center alignment. Resizing to the source size
// reproduces the input exactly.
Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& src, int target_h, int target_w);

// Grayscale -> resize -> (x - mean) / stddev.
GrayscaleFrame preprocess_frame(const ImageU8& image, int target_h, int target_w,
                                const NormalizeStats& stats = {});

// Mask rendered as a grayscale image (foreground = 1.0), resized and
// normalized with the same statistics as RGB-derived frames.
GrayscaleFrame preprocess_mask(const Mask& mask, int target_h, int target_w,
                               const NormalizeStats& stats = {});

// PNG/JPEG file I/O (backed by OpenCV imgcodecs).
ImageU8 load_image(const std::string& path);
Mask load_mask(const std::string& path);
void save_image(const std::string& path, const ImageU8& image);
void save_mask(const std::string& path, const Mask& mask);

}  // namespace gaitface
