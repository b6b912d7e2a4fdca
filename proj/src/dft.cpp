// SPDX-License-Identifier: Apache-2.0
#include "ocdl/dft.hpp"

#include <unsupported/Eigen/FFT>

namespace ocdl {
namespace {

// In-place separable 2-D transform of a row-major complex array.
void transform_2d(Complex* data, Shape shape, bool inverse)
{
    thread_local Eigen::FFT<double> fft;
    thread_local std::vector<Complex> in;
    thread_local std::vector<Complex> out;

    const Index rows = shape.rows;
    const Index cols = shape.cols;
    in.resize(static_cast<std::size_t>(std::max(rows, cols)));
    out.resize(in.size());

    auto run = [&](Index n) {
        if (inverse)
            fft.inv(out.data(), in.data(), n);
        else
            fft.fwd(out.data(), in.data(), n);
    };

    if (cols > 1) {
        for (Index r = 0; r < rows; ++r) {
            Complex* row = data + r * cols;
            std::copy(row, row + cols, in.begin());
            run(cols);
            std::copy(out.begin(), out.begin() + cols, row);
        }
    }
    if (rows > 1) {
        for (Index c = 0; c < cols; ++c) {
            for (Index r = 0; r < rows; ++r)
                in[r] = data[r * cols + c];
            run(rows);
            for (Index r = 0; r < rows; ++r)
                data[r * cols + c] = out[r];
        }
    }
}

void check_length(Index n, Shape shape, const char* what)
{
    if (shape.rows <= 0 || shape.cols <= 0 || n != shape.size())
        throw std::invalid_argument(std::string(what) + ": array length does not match shape");
}

}  // namespace

ComplexVector dft_forward(const Eigen::Ref<const Vector>& a, Shape shape)
{
    check_length(a.size(), shape, "dft_forward");
    ComplexVector out = a.cast<Complex>();
    transform_2d(out.data(), shape, false);
    return out;
}

ComplexVector dft_forward(const Eigen::Ref<const ComplexVector>& a, Shape shape)
{
    check_length(a.size(), shape, "dft_forward");
    ComplexVector out = a;
    transform_2d(out.data(), shape, false);
    return out;
}

ComplexVector dft_inverse_complex(const Eigen::Ref<const ComplexVector>& a_hat, Shape shape)
{
    check_length(a_hat.size(), shape, "dft_inverse");
    ComplexVector out = a_hat;
    transform_2d(out.data(), shape, true);
    return out;
}

Vector dft_inverse(const Eigen::Ref<const ComplexVector>& a_hat, Shape shape)
{
    return dft_inverse_complex(a_hat, shape).real();
}

ComplexMatrix dft_forward_columns(const Eigen::Ref<const Matrix>& a, Shape shape)
{
    check_length(a.rows(), shape, "dft_forward_columns");
    ComplexMatrix out = a.cast<Complex>();
    for (Index k = 0; k < out.cols(); ++k)
        transform_2d(out.col(k).data(), shape, false);
    return out;
}

Matrix dft_inverse_columns(const Eigen::Ref<const ComplexMatrix>& a_hat, Shape shape)
{
    check_length(a_hat.rows(), shape, "dft_inverse_columns");
    ComplexMatrix work = a_hat;
    for (Index k = 0; k < work.cols(); ++k)
        transform_2d(work.col(k).data(), shape, true);
    return work.real();
}

ComplexMatrix dft_filters(const PaddedDictionary& d)
{
    const Eigen::Map<const Matrix> stacked(d.taps.data(), d.signal_size(), d.num_filters);
    return dft_forward_columns(stacked, d.shape);
}

}  // namespace ocdl
