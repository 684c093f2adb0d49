#pragma once

#include <string>
#include <vector>

#include "bridgecast/matrix.hpp"

namespace bridgecast {

struct NamedTensor {
  std::string name;
  Matrix value;
};

// Versioned little-endian binary container of named f64 tensors with shape
// headers. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_checkpoint(const std::string& path);

const Matrix& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name);
const Matrix* find_tensor_opt(const std::vector<NamedTensor>& tensors, const std::string& name);

}  // namespace bridgecast
