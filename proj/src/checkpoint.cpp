#include "bridgecast/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>

#include "bridgecast/errors.hpp"

namespace bridgecast {

namespace {

constexpr char kMagic[4] = {'B', 'C', 'K', 'P'};
constexpr uint32_t kVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_bytes(std::FILE* f, const void* p, std::size_t n, const std::string& path) {
  if (std::fwrite(p, 1, n, f) != n) throw DataError("short write to " + path);
}

void read_bytes(std::FILE* f, void* p, std::size_t n, const std::string& path) {
  if (std::fread(p, 1, n, f) != n) throw DataError("truncated checkpoint " + path);
}

void write_u32(std::FILE* f, uint32_t v, const std::string& path) {
  write_bytes(f, &v, sizeof v, path);
}

uint32_t read_u32(std::FILE* f, const std::string& path) {
  uint32_t v = 0;
  read_bytes(f, &v, sizeof v, path);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot open " + path + " for writing");
  write_bytes(f.get(), kMagic, sizeof kMagic, path);
  write_u32(f.get(), kVersion, path);
  write_u32(f.get(), static_cast<uint32_t>(tensors.size()), path);
  for (const NamedTensor& t : tensors) {
    write_u32(f.get(), static_cast<uint32_t>(t.name.size()), path);
    write_bytes(f.get(), t.name.data(), t.name.size(), path);
    write_u32(f.get(), static_cast<uint32_t>(t.value.rows()), path);
    write_u32(f.get(), static_cast<uint32_t>(t.value.cols()), path);
    write_bytes(f.get(), t.value.data(), t.value.size() * sizeof(double), path);
  }
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open checkpoint " + path);
  char magic[4];
  read_bytes(f.get(), magic, sizeof magic, path);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw DataError(path + " is not a checkpoint file");
  }
  const uint32_t version = read_u32(f.get(), path);
  if (version != kVersion) {
    throw DataError(path + ": unsupported checkpoint version " + std::to_string(version));
  }
  const uint32_t count = read_u32(f.get(), path);
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = read_u32(f.get(), path);
    if (name_len > 4096) throw DataError(path + ": implausible tensor name length");
    std::string name(name_len, '\0');
    read_bytes(f.get(), name.data(), name_len, path);
    const uint32_t rows = read_u32(f.get(), path);
    const uint32_t cols = read_u32(f.get(), path);
    Matrix m(static_cast<int>(rows), static_cast<int>(cols));
    read_bytes(f.get(), m.data(), m.size() * sizeof(double), path);
    tensors.push_back({std::move(name), std::move(m)});
  }
  return tensors;
}

const Matrix* find_tensor_opt(const std::vector<NamedTensor>& tensors, const std::string& name) {
  for (const NamedTensor& t : tensors) {
    if (t.name == name) return &t.value;
  }
  return nullptr;
}

const Matrix& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
  const Matrix* m = find_tensor_opt(tensors, name);
  if (m == nullptr) throw DataError("checkpoint is missing tensor '" + name + "'");
  return *m;
}

}  // namespace bridgecast
