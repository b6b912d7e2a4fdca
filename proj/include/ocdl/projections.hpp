// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/types.hpp"

#include <cmath>

namespace ocdl {

/// Rescales every block of `block_size` entries whose norm exceeds 1 back
/// onto the unit sphere. Blocks on or inside the ball are untouched.
void project_unit_balls(Eigen::Ref<Vector> v, Index block_size);

/// Zeroes everything outside the top-left kr x kc block of each
/// shape-sized filter in a padded vector.
void mask_support(Eigen::Ref<Vector> v, Shape shape, Index kernel_rows, Index kernel_cols);

/// Projection onto C = {d : ||d_m|| <= 1 for all m}.
Dictionary proj_C(const Dictionary& d);
/// Projection onto C_PN: support mask first, then the per-filter ball.
PaddedDictionary proj_CPN(const PaddedDictionary& d);

inline double soft_threshold(double v, double theta)
{
    if (theta < 0.0)
        throw std::invalid_argument("soft_threshold: threshold must be non-negative");
    const double mag = std::abs(v) - theta;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

/// Elementwise sign(v) * max(|v| - theta, 0).
template <typename Derived>
auto soft_threshold(const Eigen::ArrayBase<Derived>& v, double theta)
{
    if (theta < 0.0)
        throw std::invalid_argument("soft_threshold: threshold must be non-negative");
    return v.sign() * (v.abs() - theta).cwiseMax(0.0);
}

template <typename Derived>
auto soft_threshold(const Eigen::MatrixBase<Derived>& v, double theta)
{
    return soft_threshold(v.array(), theta).matrix();
}

}  // namespace ocdl
