// SPDX-License-Identifier: Apache-2.0
#include "ocdl/operator.hpp"

#include "ocdl/dft.hpp"

namespace ocdl {
namespace {

void check_maps(const CoeffMaps& x, Index num_filters, Shape shape, const char* what)
{
    if (x.num_filters() != num_filters || x.shape != shape)
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

void check_kernel(const CoeffMaps& x, Index kr, Index kc, const char* what)
{
    if (kr <= 0 || kc <= 0 || kr > x.shape.rows || kc > x.shape.cols)
        throw std::invalid_argument(std::string(what) + ": kernel does not fit the signal");
}

// Direct circular convolution of compact filters with (sparse) maps.
Signal convolve_direct(const CoeffMaps& x, const Dictionary& d)
{
    const Shape sh = x.shape;
    Signal out = Signal::Zero(sh.rows, sh.cols);
    for (Index m = 0; m < d.num_filters; ++m) {
        const auto f = d.filter(m);
        for (Index p = 0; p < sh.size(); ++p) {
            const double v = x.values(p, m);
            if (v == 0.0)
                continue;
            const Index pr = p / sh.cols;
            const Index pc = p % sh.cols;
            for (Index kr = 0; kr < d.kernel_rows; ++kr) {
                const Index rr = (pr + kr) % sh.rows;
                for (Index kc = 0; kc < d.kernel_cols; ++kc)
                    out(rr, (pc + kc) % sh.cols) += v * f[kr * d.kernel_cols + kc];
            }
        }
    }
    return out;
}

Vector correlate_direct(const CoeffMaps& x, const Signal& r, Index kernel_rows, Index kernel_cols)
{
    const Shape sh = x.shape;
    const Index L = kernel_rows * kernel_cols;
    Vector out = Vector::Zero(x.num_filters() * L);
    for (Index m = 0; m < x.num_filters(); ++m) {
        for (Index p = 0; p < sh.size(); ++p) {
            const double v = x.values(p, m);
            if (v == 0.0)
                continue;
            const Index pr = p / sh.cols;
            const Index pc = p % sh.cols;
            for (Index kr = 0; kr < kernel_rows; ++kr) {
                const Index rr = (pr + kr) % sh.rows;
                for (Index kc = 0; kc < kernel_cols; ++kc)
                    out[m * L + kr * kernel_cols + kc] += v * r(rr, (pc + kc) % sh.cols);
            }
        }
    }
    return out;
}

// Full circular cross-correlation of every map with r, N x M.
Matrix correlate_freq(const CoeffMaps& x, const Signal& r)
{
    const ComplexMatrix x_hat = dft_maps(x);
    const ComplexVector r_hat = dft_forward(r);
    ComplexMatrix prod = x_hat.conjugate().array().colwise() * r_hat.array();
    return dft_inverse_columns(prod, x.shape);
}

}  // namespace

Signal apply_X(const CoeffMaps& x, const Dictionary& d)
{
    check_maps(x, d.num_filters, x.shape, "apply_X");
    check_kernel(x, d.kernel_rows, d.kernel_cols, "apply_X");
    if (x.signal_size() < kDftCrossover)
        return convolve_direct(x, d);
    return apply_X(x, pad(d, x.shape));
}

Signal apply_X(const CoeffMaps& x, const PaddedDictionary& d)
{
    check_maps(x, d.num_filters, d.shape, "apply_X");
    if (x.signal_size() < kDftCrossover)
        return convolve_direct(x, crop(d));
    return apply_D(dft_filters(d), x);
}

Signal apply_D(const ComplexMatrix& d_hat, const CoeffMaps& x)
{
    if (d_hat.rows() != x.signal_size() || d_hat.cols() != x.num_filters())
        throw std::invalid_argument("apply_D: shape mismatch");
    const ComplexMatrix x_hat = dft_maps(x);
    const ComplexVector sum = (d_hat.array() * x_hat.array()).rowwise().sum();
    return to_image(dft_inverse(sum, x.shape), x.shape);
}

Vector apply_X_adjoint(const CoeffMaps& x, const Signal& r, Index kernel_rows, Index kernel_cols)
{
    check_kernel(x, kernel_rows, kernel_cols, "apply_X_adjoint");
    if (shape_of(r) != x.shape)
        throw std::invalid_argument("apply_X_adjoint: residual shape mismatch");
    if (x.signal_size() < kDftCrossover)
        return correlate_direct(x, r, kernel_rows, kernel_cols);

    const Matrix full = correlate_freq(x, r);
    PaddedDictionary view{x.num_filters(), kernel_rows, kernel_cols, x.shape,
                          Eigen::Map<const Vector>(full.data(), full.size())};
    return crop(view).taps;
}

Vector apply_X_adjoint_padded(const CoeffMaps& x, const Signal& r)
{
    if (shape_of(r) != x.shape)
        throw std::invalid_argument("apply_X_adjoint_padded: residual shape mismatch");
    if (x.signal_size() < kDftCrossover)
        return correlate_direct(x, r, x.shape.rows, x.shape.cols);
    const Matrix full = correlate_freq(x, r);
    return Eigen::Map<const Vector>(full.data(), full.size());
}

Matrix apply_D_adjoint(const ComplexMatrix& d_hat, const Signal& r)
{
    if (d_hat.rows() != r.size())
        throw std::invalid_argument("apply_D_adjoint: shape mismatch");
    const ComplexVector r_hat = dft_forward(r);
    ComplexMatrix prod = d_hat.conjugate().array().colwise() * r_hat.array();
    return dft_inverse_columns(prod, shape_of(r));
}

double loss_l(const Dictionary& d, const CoeffMaps& x, const Signal& s, double lambda)
{
    if (lambda < 0.0)
        throw std::invalid_argument("loss_l: lambda must be non-negative");
    if (shape_of(s) != x.shape)
        throw std::invalid_argument("loss_l: signal shape mismatch");
    const Signal r = apply_X(x, d) - s;
    return 0.5 * r.matrix().squaredNorm() + lambda * x.values.lpNorm<1>();
}

double loss_l(const PaddedDictionary& d, const CoeffMaps& x, const Signal& s, double lambda)
{
    if (lambda < 0.0)
        throw std::invalid_argument("loss_l: lambda must be non-negative");
    if (shape_of(s) != x.shape)
        throw std::invalid_argument("loss_l: signal shape mismatch");
    const Signal r = apply_X(x, d) - s;
    return 0.5 * r.matrix().squaredNorm() + lambda * x.values.lpNorm<1>();
}

double loss_l_masked(const Dictionary& d, const CoeffMaps& x, const Signal& s, const Mask& w, double lambda)
{
    if (lambda < 0.0)
        throw std::invalid_argument("loss_l_masked: lambda must be non-negative");
    validate_mask(w, x.shape);
    const Signal r = w * (apply_X(x, d) - s);
    return 0.5 * r.matrix().squaredNorm() + lambda * x.values.lpNorm<1>();
}

Vector grad_spatial(const CoeffMaps& x, const Dictionary& d, const Signal& s)
{
    check_maps(x, d.num_filters, shape_of(s), "grad_spatial");
    if (x.density() < 1.0)
        return grad_spatial(to_coordinate_list(x, d.kernel_rows, d.kernel_cols), d, s);
    const Signal r = apply_X(x, d) - s;
    return apply_X_adjoint(x, r, d.kernel_rows, d.kernel_cols);
}

Vector grad_spatial(const CoordinateList& X, const Dictionary& d, const Signal& s)
{
    if (X.num_filters != d.num_filters || X.kernel_rows != d.kernel_rows || X.kernel_cols != d.kernel_cols ||
        shape_of(s) != X.shape)
        throw std::invalid_argument("grad_spatial: shape mismatch");
    const Vector r = X.apply(d.taps) - flat(s);
    return X.apply_adjoint(r);
}

Vector grad_spatial(const CoeffMaps& x, const PaddedDictionary& d, const Signal& s)
{
    check_maps(x, d.num_filters, d.shape, "grad_spatial");
    if (shape_of(s) != d.shape)
        throw std::invalid_argument("grad_spatial: signal shape mismatch");
    const Signal r = apply_X(x, d) - s;
    return apply_X_adjoint_padded(x, r);
}

Vector grad_spatial_masked(const CoordinateList& X, const Dictionary& d, const Signal& s, const Mask& w)
{
    if (X.num_filters != d.num_filters || X.kernel_rows != d.kernel_rows || X.kernel_cols != d.kernel_cols ||
        shape_of(s) != X.shape)
        throw std::invalid_argument("grad_spatial_masked: shape mismatch");
    validate_mask(w, X.shape);
    const Vector r = flat(w).cwiseProduct(X.apply(d.taps) - flat(s));
    return X.apply_adjoint(r);
}

ComplexMatrix grad_frequency(const ComplexMatrix& x_hat, const ComplexMatrix& d_hat, const ComplexVector& s_hat)
{
    if (x_hat.rows() != d_hat.rows() || x_hat.cols() != d_hat.cols() || s_hat.size() != x_hat.rows())
        throw std::invalid_argument("grad_frequency: shape mismatch");
    const ComplexVector r_hat = (x_hat.array() * d_hat.array()).rowwise().sum().matrix() - s_hat;
    return x_hat.conjugate().array().colwise() * r_hat.array();
}

ComplexMatrix grad_frequency_masked(const ComplexMatrix& x_hat, const ComplexMatrix& d_hat,
                                    const ComplexVector& s_hat, const Mask& w)
{
    if (x_hat.rows() != d_hat.rows() || x_hat.cols() != d_hat.cols() || s_hat.size() != x_hat.rows())
        throw std::invalid_argument("grad_frequency_masked: shape mismatch");
    const Shape sh = shape_of(w);
    if (sh.size() != x_hat.rows())
        throw std::invalid_argument("grad_frequency_masked: mask shape mismatch");
    validate_mask(w, sh);
    const ComplexVector r_hat = (x_hat.array() * d_hat.array()).rowwise().sum().matrix() - s_hat;
    const ComplexVector r = dft_inverse_complex(r_hat, sh);
    const ComplexVector wr_hat = dft_forward(ComplexVector(flat(w).cast<Complex>().cwiseProduct(r)), sh);
    return x_hat.conjugate().array().colwise() * wr_hat.array();
}

}  // namespace ocdl
