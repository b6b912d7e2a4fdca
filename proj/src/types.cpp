// SPDX-License-Identifier: Apache-2.0
#include "ocdl/types.hpp"

#include "ocdl/dft.hpp"

#include <algorithm>

namespace ocdl {

void validate_signal(const Signal& s)
{
    if (s.size() == 0)
        throw std::invalid_argument("signal is empty");
    if (!s.allFinite())
        throw std::invalid_argument("signal contains non-finite values");
}

void validate_mask(const Mask& w, Shape shape)
{
    if (shape_of(w) != shape)
        throw std::invalid_argument("mask shape does not match signal");
    if (!((w == 0.0) || (w == 1.0)).all())
        throw std::invalid_argument("mask must be binary");
}

Dictionary::Dictionary(Index m, Index kr, Index kc, Vector values)
    : num_filters(m), kernel_rows(kr), kernel_cols(kc), taps(std::move(values))
{
    if (taps.size() != m * kr * kc)
        throw std::invalid_argument("Dictionary: tap count does not match M*Lr*Lc");
}

PaddedDictionary pad(const Dictionary& d, Shape shape)
{
    if (d.kernel_rows > shape.rows || d.kernel_cols > shape.cols)
        throw std::invalid_argument("pad: kernel larger than signal");
    PaddedDictionary out{d.num_filters, d.kernel_rows, d.kernel_cols, shape,
                         Vector::Zero(d.num_filters * shape.size())};
    for (Index m = 0; m < d.num_filters; ++m) {
        auto src = d.filter(m);
        auto dst = out.filter(m);
        for (Index r = 0; r < d.kernel_rows; ++r)
            dst.segment(r * shape.cols, d.kernel_cols) = src.segment(r * d.kernel_cols, d.kernel_cols);
    }
    return out;
}

Dictionary crop(const PaddedDictionary& d)
{
    Dictionary out(d.num_filters, d.kernel_rows, d.kernel_cols);
    for (Index m = 0; m < d.num_filters; ++m) {
        auto src = d.filter(m);
        auto dst = out.filter(m);
        for (Index r = 0; r < d.kernel_rows; ++r)
            dst.segment(r * d.kernel_cols, d.kernel_cols) = src.segment(r * d.shape.cols, d.kernel_cols);
    }
    return out;
}

Index CoeffMaps::nonzeros() const { return (values.array() != 0.0).count(); }

double CoeffMaps::density() const
{
    if (values.size() == 0)
        return 0.0;
    return static_cast<double>(nonzeros()) / static_cast<double>(values.size());
}

CoordinateList to_coordinate_list(const CoeffMaps& x, Index kernel_rows, Index kernel_cols)
{
    const Shape sh = x.shape;
    if (kernel_rows > sh.rows || kernel_cols > sh.cols)
        throw std::invalid_argument("to_coordinate_list: kernel larger than signal");

    CoordinateList out;
    out.shape = sh;
    out.num_filters = x.num_filters();
    out.kernel_rows = kernel_rows;
    out.kernel_cols = kernel_cols;
    const Index L = kernel_rows * kernel_cols;
    out.entries.reserve(static_cast<std::size_t>(x.nonzeros() * L));

    // Column (m, k) of X is x_m circularly shifted by tap offset k, so the
    // coefficient at pixel p lands on row p + k.
    for (Index m = 0; m < x.num_filters(); ++m) {
        for (Index p = 0; p < sh.size(); ++p) {
            const double v = x.values(p, m);
            if (v == 0.0)
                continue;
            const Index pr = p / sh.cols;
            const Index pc = p % sh.cols;
            for (Index kr = 0; kr < kernel_rows; ++kr) {
                const Index rr = (pr + kr) % sh.rows;
                for (Index kc = 0; kc < kernel_cols; ++kc) {
                    const Index rc = (pc + kc) % sh.cols;
                    out.entries.push_back({rr * sh.cols + rc, m * L + kr * kernel_cols + kc, v});
                }
            }
        }
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const CoordinateEntry& a, const CoordinateEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    return out;
}

CoeffMaps to_coeff_maps(const CoordinateList& list)
{
    CoeffMaps x(list.shape, list.num_filters);
    const Index L = list.kernel_rows * list.kernel_cols;
    for (const auto& e : list.entries) {
        if (e.col % L == 0)
            x.values(e.row, e.col / L) = e.value;
    }
    return x;
}

Vector CoordinateList::apply(const Eigen::Ref<const Vector>& d) const
{
    if (d.size() != cols())
        throw std::invalid_argument("CoordinateList::apply: dictionary length mismatch");
    Vector out = Vector::Zero(rows());
    for (const auto& e : entries)
        out[e.row] += e.value * d[e.col];
    return out;
}

Vector CoordinateList::apply_adjoint(const Eigen::Ref<const Vector>& r) const
{
    if (r.size() != rows())
        throw std::invalid_argument("CoordinateList::apply_adjoint: signal length mismatch");
    Vector out = Vector::Zero(cols());
    for (const auto& e : entries)
        out[e.col] += e.value * r[e.row];
    return out;
}

CoordinateList CoordinateList::masked(const Mask& w) const
{
    validate_mask(w, shape);
    CoordinateList out = *this;
    const auto wf = flat(w);
    std::erase_if(out.entries, [&](const CoordinateEntry& e) { return wf[e.row] == 0.0; });
    return out;
}

FreqView make_freq_view(const PaddedDictionary& d, const CoeffMaps& x, const Signal& s)
{
    if (d.shape != x.shape || shape_of(s) != x.shape || d.num_filters != x.num_filters())
        throw std::invalid_argument("make_freq_view: shape mismatch");
    return {x.shape, dft_filters(d), dft_maps(x), dft_forward(s)};
}

}  // namespace ocdl
