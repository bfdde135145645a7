#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "infopatch/importance.hpp"

namespace infopatch {

/// IIMP v1, little-endian:
///   "IIMP" | u16 version | u32 rows | u32 cols | u32 k | u32 stride | u32 scale |
///   u8 metric | rows * cols f32 scores (row-major)
inline constexpr std::uint16_t kMapFormatVersion = 1;

std::string encode_map(const ImportanceMap& map);
ImportanceMap decode_map(const std::string& bytes);

void write_map(const ImportanceMap& map, const std::filesystem::path& path);
ImportanceMap read_map(const std::filesystem::path& path);

}  // namespace infopatch
