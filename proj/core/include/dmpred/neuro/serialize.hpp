#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dmpred/neuro/layers.hpp"

namespace dmpred::nn {

inline constexpr std::uint32_t kParamFileVersion = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

struct StoredTensor {
  std::string name;
  Matrix value;
};

struct ParamFile {
  std::string config;  // opaque text (JSON for models)
  std::uint64_t config_digest = 0;
  std::vector<StoredTensor> tensors;
};

/// Layout (all integers little-endian):
///   magic "DMPRNN\r\n" | u32 version | u64 fnv1a(config) | u32 len + config
///   u32 count | per tensor: u32 len + name, u32 rows, u32 cols
///   then every tensor's values as float32 in table order.
void write_param_file(const std::filesystem::path& path, std::string_view config, const ParamList& params);
ParamFile read_param_file(const std::filesystem::path& path);

/// Copies stored values into `params` by name; every parameter must be
/// present with a matching shape.
void load_into(const ParamFile& file, const ParamList& params);

}  // namespace dmpred::nn
