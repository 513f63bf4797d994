#include "gaitface/image.hpp"

#include <opencv2/imgcodecs.hpp>

#include "gaitface/errors.hpp"

namespace gaitface {

Eigen::MatrixXd to_grayscale(const ImageU8& image) {
  if (image.empty()) throw EmptyImage("to_grayscale: empty image");
  Eigen::MatrixXd out(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double luma =
          (299.0 * image.r(y, x) + 587.0 * image.g(y, x) + 114.0 * image.b(y, x)) / 1000.0;
      out(y, x) = luma / 255.0;
    }
  }
  return out;
}

Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& src, int target_h, int target_w) {
  if (src.size() == 0) throw EmptyImage("resize_bilinear: empty input");
  if (target_h <= 0 || target_w <= 0)
    throw InvalidConfig("resize_bilinear: non-positive target size");
  const int sh = static_cast<int>(src.rows());
  const int sw = static_cast<int>(src.cols());
  if (sh == target_h && sw == target_w) return src;

  Eigen::MatrixXd out(target_h, target_w);
  const double sy = static_cast<double>(sh) / target_h;
  const double sx = static_cast<double>(sw) / target_w;
  for (int y = 0; y < target_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::min(std::max(fy, 0.0), static_cast<double>(sh - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, sh - 1);
    const double wy = fy - y0;
    for (int x = 0; x < target_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = std::min(std::max(fx, 0.0), static_cast<double>(sw - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, sw - 1);
      const double wx = fx - x0;
      out(y, x) = (1.0 - wy) * ((1.0 - wx) * src(y0, x0) + wx * src(y0, x1)) +
                  wy * ((1.0 - wx) * src(y1, x0) + wx * src(y1, x1));
    }
  }
  return out;
}

GrayscaleFrame preprocess_frame(const ImageU8& image, int target_h, int target_w,
                                const NormalizeStats& stats) {
  Eigen::MatrixXd gray = to_grayscale(image);
  Eigen::MatrixXd resized = resize_bilinear(gray, target_h, target_w);
  GrayscaleFrame frame;
  frame.pixels = (resized.array() - stats.mean) / stats.stddev;
  return frame;
}

GrayscaleFrame preprocess_mask(const Mask& mask, int target_h, int target_w,
                               const NormalizeStats& stats) {
  if (mask.empty()) throw EmptyImage("preprocess_mask: empty mask");
  Eigen::MatrixXd gray(mask.height, mask.width);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) gray(y, x) = mask.foreground(y, x) ? 1.0 : 0.0;
  Eigen::MatrixXd resized = resize_bilinear(gray, target_h, target_w);
  GrayscaleFrame frame;
  frame.pixels = (resized.array() - stats.mean) / stats.stddev;
  return frame;
}

ImageU8 load_image(const std::string& path) {
  cv::Mat mat = cv::imread(path, cv::IMREAD_COLOR);  // BGR
  if (mat.empty()) throw MissingFile("cannot read image " + path);
  ImageU8 image;
  image.width = mat.cols;
  image.height = mat.rows;
  image.rgb.resize(static_cast<size_t>(mat.cols) * mat.rows * 3);
  for (int y = 0; y < mat.rows; ++y) {
    const cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < mat.cols; ++x) {
      const size_t i = 3 * (static_cast<size_t>(y) * mat.cols + x);
      image.rgb[i + 0] = row[x][2];
      image.rgb[i + 1] = row[x][1];
      image.rgb[i + 2] = row[x][0];
    }
  }
  return image;
}

Mask load_mask(const std::string& path) {
  cv::Mat mat = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (mat.empty()) throw MissingFile("cannot read mask " + path);
  Mask mask;
  mask.width = mat.cols;
  mask.height = mat.rows;
  mask.data.resize(static_cast<size_t>(mat.cols) * mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    const std::uint8_t* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x)
      mask.data[static_cast<size_t>(y) * mat.cols + x] = row[x] != 0 ? 255 : 0;
  }
  return mask;
}

void save_image(const std::string& path, const ImageU8& image) {
  if (image.empty()) throw EmptyImage("save_image: empty image");
  cv::Mat mat(image.height, image.width, CV_8UC3);
  for (int y = 0; y < image.height; ++y) {
    cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width; ++x)
      row[x] = cv::Vec3b(image.b(y, x), image.g(y, x), image.r(y, x));
  }
  if (!cv::imwrite(path, mat)) throw UnwritableOutput("cannot write image " + path);
}

void save_mask(const std::string& path, const Mask& mask) {
  if (mask.empty()) throw EmptyImage("save_mask: empty mask");
  cv::Mat mat(mask.height, mask.width, CV_8UC1);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      mat.at<std::uint8_t>(y, x) = mask.data[static_cast<size_t>(y) * mask.width + x];
  if (!cv::imwrite(path, mat)) throw UnwritableOutput("cannot write mask " + path);
}

}  // namespace gaitface
