// SPDX-License-Identifier: Apache-2.0
#include "ocdl/projections.hpp"

namespace ocdl {

void project_unit_balls(Eigen::Ref<Vector> v, Index block_size)
{
    if (block_size <= 0 || v.size() % block_size != 0)
        throw std::invalid_argument("project_unit_balls: length is not a multiple of the block size");
    for (Index start = 0; start < v.size(); start += block_size) {
        auto block = v.segment(start, block_size);
        const double norm = block.norm();
        if (norm > 1.0)
            block /= norm;
    }
}

void mask_support(Eigen::Ref<Vector> v, Shape shape, Index kernel_rows, Index kernel_cols)
{
    const Index n = shape.size();
    if (n == 0 || v.size() % n != 0)
        throw std::invalid_argument("mask_support: length is not a multiple of the signal size");
    for (Index start = 0; start < v.size(); start += n) {
        for (Index r = 0; r < shape.rows; ++r) {
            const Index row = start + r * shape.cols;
            if (r >= kernel_rows)
                v.segment(row, shape.cols).setZero();
            else
                v.segment(row + kernel_cols, shape.cols - kernel_cols).setZero();
        }
    }
}

Dictionary proj_C(const Dictionary& d)
{
    Dictionary out = d;
    project_unit_balls(out.taps, d.filter_size());
    return out;
}

PaddedDictionary proj_CPN(const PaddedDictionary& d)
{
    PaddedDictionary out = d;
    mask_support(out.taps, d.shape, d.kernel_rows, d.kernel_cols);
    project_unit_balls(out.taps, d.signal_size());
    return out;
}

}  // namespace ocdl
