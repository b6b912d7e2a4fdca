// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/types.hpp"

#include <filesystem>
#include <iosfwd>

namespace ocdl {

/// Binary dictionary format, little-endian: "OCDL", u32 version (1),
/// u32 M, u32 kernel rows, u32 kernel cols, then M * rows * cols float64
/// taps, filter-major and row-major within a filter.
void write_dictionary(std::ostream& out, const Dictionary& d);
Dictionary read_dictionary(std::istream& in);

void save_dictionary(const std::filesystem::path& path, const Dictionary& d);
Dictionary load_dictionary(const std::filesystem::path& path);

/// Filters tiled on a near-square grid with a one-pixel border, each
/// rescaled to [0, 1] on its own; for visual inspection.
Image dictionary_grid(const Dictionary& d);

}  // namespace ocdl
