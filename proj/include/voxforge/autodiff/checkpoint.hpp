// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "voxforge/autodiff/tensor.hpp"

namespace voxforge::ad {

using NamedTensor = std::pair<std::string, Tensor>;

// "TNSR" files: magic, u32 count, then per tensor u32 name length, UTF-8
// name, u32 rank, rank x u32 dims, f64 data. Little-endian throughout.
void write_tensors(std::ostream& out, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_tensors(std::istream& in);
void save_tensors(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_tensors(const std::filesystem::path& path);

// Copies loaded values into `into` by name. Throws ShapeError on a missing
// name or shape mismatch.
void assign_tensors(const std::vector<NamedTensor>& loaded, const std::vector<NamedTensor>& into);

}  // namespace voxforge::ad
