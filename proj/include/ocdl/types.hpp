// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocdl {

using Index = Eigen::Index;
using Complex = std::complex<double>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Row-major real image. Signals, masks and tiles all use this layout so
/// that `data()` walks pixels in the same order as the flat index i = r*W + c.
using Image = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Signal = Image;
/// Binary weights aligned with a signal: 1 = observed, 0 = missing.
using Mask = Image;

/// Thrown when an iterative solver produces a non-finite value.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Shape {
    Index rows = 0;
    Index cols = 0;

    Index size() const { return rows * cols; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

inline Shape shape_of(const Image& img) { return {img.rows(), img.cols()}; }

inline Eigen::Map<const Vector> flat(const Image& img) { return {img.data(), img.size()}; }
inline Eigen::Map<Vector> flat(Image& img) { return {img.data(), img.size()}; }

inline Image to_image(const Eigen::Ref<const Vector>& v, Shape shape)
{
    if (v.size() != shape.size())
        throw std::invalid_argument("to_image: vector length does not match shape");
    return Eigen::Map<const Image>(v.data(), shape.rows, shape.cols);
}

/// Throws unless the signal is non-empty and finite.
void validate_signal(const Signal& s);
/// Throws unless every weight is exactly 0 or 1 and the shape matches.
void validate_mask(const Mask& w, Shape shape);

/// Compact filter bank: M filters of L_r x L_c taps stored filter-major,
/// row-major inside each filter. `taps` is the dictionary-space vector d.
struct Dictionary {
    Index num_filters = 0;
    Index kernel_rows = 0;
    Index kernel_cols = 0;
    Vector taps;

    Dictionary() = default;
    Dictionary(Index m, Index kr, Index kc)
        : num_filters(m), kernel_rows(kr), kernel_cols(kc), taps(Vector::Zero(m * kr * kc))
    {
    }
    Dictionary(Index m, Index kr, Index kc, Vector values);

    Index filter_size() const { return kernel_rows * kernel_cols; }
    auto filter(Index m) { return taps.segment(m * filter_size(), filter_size()); }
    auto filter(Index m) const { return taps.segment(m * filter_size(), filter_size()); }
    Image filter_image(Index m) const { return to_image(filter(m), {kernel_rows, kernel_cols}); }
};

/// Filters zero-padded to the signal shape. The support region is the
/// top-left kernel_rows x kernel_cols block of each N-sized filter.
struct PaddedDictionary {
    Index num_filters = 0;
    Index kernel_rows = 0;
    Index kernel_cols = 0;
    Shape shape;
    Vector taps;  // length M*N, filter-major

    Index signal_size() const { return shape.size(); }
    auto filter(Index m) { return taps.segment(m * signal_size(), signal_size()); }
    auto filter(Index m) const { return taps.segment(m * signal_size(), signal_size()); }
};

PaddedDictionary pad(const Dictionary& d, Shape shape);
/// Extracts the support block; values outside the support are dropped.
Dictionary crop(const PaddedDictionary& d);

/// M coefficient maps, one column per filter; column m holds x_m row-major.
struct CoeffMaps {
    Shape shape;
    Matrix values;  // N x M

    CoeffMaps() = default;
    CoeffMaps(Shape sh, Index m) : shape(sh), values(Matrix::Zero(sh.size(), m)) {}

    Index num_filters() const { return values.cols(); }
    Index signal_size() const { return shape.size(); }
    Index nonzeros() const;
    /// Fraction of nonzero coefficients, in [0, 1].
    double density() const;
    Image map_image(Index m) const { return to_image(values.col(m), shape); }
};

/// One nonzero of the operator X viewed as an N x ML matrix.
struct CoordinateEntry {
    std::int64_t row;
    std::int64_t col;
    double value;
};
static_assert(sizeof(CoordinateEntry) == 24);

/// Coordinate-list (COO) form of the operator X. Entries are sorted by
/// (row, col), so the nonzeros of each row are contiguous.
struct CoordinateList {
    Shape shape;
    Index num_filters = 0;
    Index kernel_rows = 0;
    Index kernel_cols = 0;
    std::vector<CoordinateEntry> entries;

    Index rows() const { return shape.size(); }
    Index cols() const { return num_filters * kernel_rows * kernel_cols; }
    std::size_t bytes() const { return entries.size() * sizeof(CoordinateEntry); }

    /// X d for a compact dictionary-space vector d (length ML).
    Vector apply(const Eigen::Ref<const Vector>& d) const;
    /// X^T r for a signal-space vector r (length N).
    Vector apply_adjoint(const Eigen::Ref<const Vector>& r) const;
    /// Drops every entry whose row has zero weight, giving W (.) X.
    CoordinateList masked(const Mask& w) const;
};

CoordinateList to_coordinate_list(const CoeffMaps& x, Index kernel_rows, Index kernel_cols);
/// Inverse of to_coordinate_list; reads the tap-(0,0) column of every filter.
CoeffMaps to_coeff_maps(const CoordinateList& list);

/// Frequency-domain images of the spatial quantities.
struct FreqView {
    Shape shape;
    ComplexMatrix d_hat;  // N x M
    ComplexMatrix x_hat;  // N x M
    ComplexVector s_hat;  // N
};

FreqView make_freq_view(const PaddedDictionary& d, const CoeffMaps& x, const Signal& s);

}  // namespace ocdl
