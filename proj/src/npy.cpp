#include "gaitface/npy.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "gaitface/errors.hpp"

namespace gaitface {

namespace {

std::string shape_tuple(const std::vector<std::int64_t>& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    os << shape[i];
    if (shape.size() == 1 || i + 1 < shape.size()) os << (shape.size() == 1 ? "," : "");
    if (i + 1 < shape.size()) os << ", ";
  }
  os << ")";
  return os.str();
}

}  // namespace

void save_npy(const std::string& path, const NpyArray& array) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UnwritableOutput("cannot open " + path);

  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': " +
                       shape_tuple(array.shape) + ", }";
  // pad so that magic(6) + version(2) + headerlen(2) + header is a multiple of 64
  size_t unpadded = 10 + header.size() + 1;
  size_t padded = (unpadded + 63) / 64 * 64;
  header.append(padded - unpadded, ' ');
  header.push_back('\n');

  const char magic[] = "\x93NUMPY";
  out.write(magic, 6);
  const char version[2] = {1, 0};
  out.write(version, 2);
  const std::uint16_t hlen = static_cast<std::uint16_t>(header.size());
  out.write(reinterpret_cast<const char*>(&hlen), 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(array.data.data()),
            static_cast<std::streamsize>(array.data.size() * sizeof(double)));
  if (!out) throw UnwritableOutput("write failed for " + path);
}

NpyArray load_npy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open " + path);

  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, "\x93NUMPY", 6) != 0)
    throw SchemaViolation("not an npy file: " + path);
  char version[2];
  in.read(version, 2);
  std::uint32_t hlen = 0;
  if (version[0] == 1) {
    std::uint16_t h16 = 0;
    in.read(reinterpret_cast<char*>(&h16), 2);
    hlen = h16;
  } else {
    in.read(reinterpret_cast<char*>(&hlen), 4);
  }
  std::string header(hlen, '\0');
  in.read(header.data(), hlen);
  if (!in) throw SchemaViolation("truncated npy header: " + path);

  if (header.find("'<f8'") == std::string::npos)
    throw SchemaViolation("npy dtype must be <f8: " + path);
  if (header.find("'fortran_order': False") == std::string::npos)
    throw SchemaViolation("npy must be C-order: " + path);

  const size_t open = header.find('(');
  const size_t close = header.find(')', open);
  if (open == std::string::npos || close == std::string::npos)
    throw SchemaViolation("npy header missing shape: " + path);

  NpyArray array;
  std::string dims = header.substr(open + 1, close - open - 1);
  std::stringstream ss(dims);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::string trimmed;
    for (char c : tok)
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
    if (!trimmed.empty()) array.shape.push_back(std::stoll(trimmed));
  }
  if (array.shape.empty()) throw SchemaViolation("npy scalar arrays unsupported: " + path);

  array.data.resize(static_cast<size_t>(array.size()));
  in.read(reinterpret_cast<char*>(array.data.data()),
          static_cast<std::streamsize>(array.data.size() * sizeof(double)));
  if (!in) throw SchemaViolation("truncated npy payload: " + path);
  return array;
}

}  // namespace gaitface
