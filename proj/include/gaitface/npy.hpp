#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gaitface {

// Minimal NPY (NumPy array file) support for little-endian float64 arrays.
// Shapes up to rank 4; data stored in C order.
struct NpyArray {
  std::vector<std::int64_t> shape;
  std::vector<double> data;  // C-order

  std::int64_t size() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
};

void save_npy(const std::string& path, const NpyArray& array);
NpyArray load_npy(const std::string& path);

}  // namespace gaitface
