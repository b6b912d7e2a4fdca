// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ocdl {

/// Reads an 8-bit PGM/PPM (P2, P3, P5, P6) or PNG file as a grayscale image
/// in [0, 1]. Color input is reduced with luma weights 0.299, 0.587, 0.114.
/// Throws std::runtime_error if the file cannot be read or decoded.
Image load_grayscale(const std::filesystem::path& path);

/// Writes an image as binary PGM (P5) or, for a .png extension, 8-bit PNG.
/// Values are clamped to [0, 1] and scaled to 0..255.
void save_grayscale(const std::filesystem::path& path, const Image& img);

/// Mask files are PGM/PNG with 0 = masked and any nonzero value = valid.
Mask load_mask(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const Mask& w);

/// Regular files under `dir` with an image extension, sorted by name.
/// Mask files (`*.mask.*`) are skipped.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

inline constexpr double kDefaultTikhonov = 5.0;

/// l = argmin 1/2 ||l - s||^2 + lambda_reg/2 ||grad l||^2 with circular
/// forward differences, solved exactly per frequency bin.
Image tikhonov_lowpass(const Image& s, double lambda_reg = kDefaultTikhonov);
/// s - tikhonov_lowpass(s).
Image tikhonov_highpass(const Image& s, double lambda_reg = kDefaultTikhonov);

/// Masked variant: the data term only sees pixels with w = 1. Solved by
/// conjugate gradients on (W + lambda_reg grad^T grad) l = W s. With no
/// observed pixels the lowpass is zero.
Image tikhonov_lowpass_masked(const Image& s, const Mask& w, double lambda_reg = kDefaultTikhonov);
Image tikhonov_highpass_masked(const Image& s, const Mask& w, double lambda_reg = kDefaultTikhonov);

struct TileSpec {
    Index rows = 0;
    Index cols = 0;
};

/// Non-overlapping row-major tiles; trailing partial tiles are dropped.
/// Throws std::invalid_argument if the tile is larger than the image.
std::vector<Image> split_image(const Image& s, TileSpec spec);

/// A warning when a tile is less than twice the kernel in either dimension,
/// where circular boundaries start to couple pixels under the same filter.
std::optional<std::string> boundary_warning(TileSpec spec, Index kernel_rows, Index kernel_cols);

/// Central rows x cols window. Throws if it does not fit.
Image crop_center(const Image& s, Index rows, Index cols);

struct Corrupted {
    Signal signal;
    Mask mask;
};

/// Sets exactly round(fraction * N) distinct pixels, chosen uniformly, to 0
/// or 1 with equal probability. The mask is 0 at those pixels and 1 elsewhere.
Corrupted salt_pepper_corrupt(const Signal& s, double fraction, std::mt19937_64& rng);

struct StreamItem {
    std::size_t index;
    int epoch;
};

/// Visiting order over `count` tiles: an independent seeded shuffle per
/// epoch, concatenated.
std::vector<StreamItem> stream_sampler(std::size_t count, int epochs, std::uint64_t seed);

}  // namespace ocdl
