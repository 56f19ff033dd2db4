#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "corelr/volume.hpp"

namespace corelr {

// Supported NRRD subset: NRRD0004 magic, type uint8, dimension 3, diagonal
// space directions, raw or gzip encoding, little endian. Unknown fields are
// ignored.
VoxelGrid<std::uint8_t> read_nrrd(std::string_view bytes);

/// Throws InvalidLabel if any value is outside {0,1,2,3}.
LabelVolume read_label_volume(std::string_view bytes);
BinaryMask read_mask(std::string_view bytes);

// Byte-deterministic writer. Header keys in order: type, dimension, sizes,
// space directions, endian, encoding; raw payload.
std::string write_nrrd(const VoxelGrid<std::uint8_t>& grid);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace corelr
