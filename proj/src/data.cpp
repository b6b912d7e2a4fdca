// SPDX-License-Identifier: Apache-2.0
#include "ocdl/data.hpp"

#include "ocdl/dft.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ocdl {
namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Circular forward difference along rows (dr = 1) or columns (dc = 1).
SparseMatrix forward_difference(Shape sh, Index dr, Index dc)
{
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(2 * sh.size()));
    for (Index r = 0; r < sh.rows; ++r)
        for (Index c = 0; c < sh.cols; ++c) {
            const Index i = r * sh.cols + c;
            const Index j = ((r + dr) % sh.rows) * sh.cols + (c + dc) % sh.cols;
            t.emplace_back(i, j, 1.0);
            t.emplace_back(i, i, -1.0);
        }
    SparseMatrix D(sh.size(), sh.size());
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

void check_lambda(double lambda_reg)
{
    if (!(lambda_reg >= 0.0))
        throw std::invalid_argument("tikhonov: lambda_reg must be non-negative");
}

}  // namespace

Image tikhonov_lowpass(const Image& s, double lambda_reg)
{
    check_lambda(lambda_reg);
    validate_signal(s);
    const Shape sh = shape_of(s);
    const double two_pi = 2.0 * std::acos(-1.0);
    ComplexVector s_hat = dft_forward(s);
    for (Index u = 0; u < sh.rows; ++u)
        for (Index v = 0; v < sh.cols; ++v) {
            const double gr = 2.0 - 2.0 * std::cos(two_pi * static_cast<double>(u) / static_cast<double>(sh.rows));
            const double gc = 2.0 - 2.0 * std::cos(two_pi * static_cast<double>(v) / static_cast<double>(sh.cols));
            s_hat[u * sh.cols + v] /= 1.0 + lambda_reg * (gr + gc);
        }
    return to_image(dft_inverse(s_hat, sh), sh);
}

Image tikhonov_highpass(const Image& s, double lambda_reg) { return s - tikhonov_lowpass(s, lambda_reg); }

Image tikhonov_lowpass_masked(const Image& s, const Mask& w, double lambda_reg)
{
    check_lambda(lambda_reg);
    validate_signal(s);
    const Shape sh = shape_of(s);
    validate_mask(w, sh);
    if (lambda_reg == 0.0)
        return s;
    if (w.sum() == 0.0)
        return Image::Zero(sh.rows, sh.cols);

    const SparseMatrix Dr = forward_difference(sh, 1, 0);
    const SparseMatrix Dc = forward_difference(sh, 0, 1);
    SparseMatrix A = lambda_reg * (SparseMatrix(Dr.transpose() * Dr) + SparseMatrix(Dc.transpose() * Dc));
    for (Index i = 0; i < sh.size(); ++i)
        A.coeffRef(i, i) += w.data()[i];

    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(10 * sh.size());
    cg.compute(A);
    const Vector l = cg.solve(Vector(flat(w).cwiseProduct(flat(s))));
    if (cg.info() != Eigen::Success && cg.error() > 1e-8)
        throw NumericError("tikhonov_lowpass_masked: conjugate gradients did not converge");
    return to_image(l, sh);
}

Image tikhonov_highpass_masked(const Image& s, const Mask& w, double lambda_reg)
{
    return s - tikhonov_lowpass_masked(s, w, lambda_reg);
}

std::vector<Image> split_image(const Image& s, TileSpec spec)
{
    if (spec.rows < 1 || spec.cols < 1)
        throw std::invalid_argument("split_image: tile dimensions must be positive");
    if (spec.rows > s.rows() || spec.cols > s.cols())
        throw std::invalid_argument("split_image: tile larger than image");
    std::vector<Image> tiles;
    for (Index r = 0; r + spec.rows <= s.rows(); r += spec.rows)
        for (Index c = 0; c + spec.cols <= s.cols(); c += spec.cols)
            tiles.emplace_back(s.block(r, c, spec.rows, spec.cols));
    return tiles;
}

std::optional<std::string> boundary_warning(TileSpec spec, Index kernel_rows, Index kernel_cols)
{
    if (spec.rows >= 2 * kernel_rows && spec.cols >= 2 * kernel_cols)
        return std::nullopt;
    return "tile " + std::to_string(spec.rows) + "x" + std::to_string(spec.cols) +
           " is smaller than twice the kernel " + std::to_string(kernel_rows) + "x" + std::to_string(kernel_cols) +
           "; expect boundary artifacts";
}

Image crop_center(const Image& s, Index rows, Index cols)
{
    if (rows < 1 || cols < 1 || rows > s.rows() || cols > s.cols())
        throw std::invalid_argument("crop_center: window does not fit the image");
    return s.block((s.rows() - rows) / 2, (s.cols() - cols) / 2, rows, cols);
}

Corrupted salt_pepper_corrupt(const Signal& s, double fraction, std::mt19937_64& rng)
{
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("salt_pepper_corrupt: fraction must lie in [0, 1]");
    const Index N = s.size();
    const auto count = static_cast<Index>(std::llround(fraction * static_cast<double>(N)));
    std::vector<Index> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), Index{0});
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for (Index i = 0; i < count; ++i) {
        std::uniform_int_distribution<Index> pick(i, N - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    Corrupted out{s, Mask::Ones(s.rows(), s.cols())};
    std::bernoulli_distribution coin(0.5);
    for (Index i = 0; i < count; ++i) {
        out.signal.data()[order[i]] = coin(rng) ? 1.0 : 0.0;
        out.mask.data()[order[i]] = 0.0;
    }
    return out;
}

std::vector<StreamItem> stream_sampler(std::size_t count, int epochs, std::uint64_t seed)
{
    if (epochs < 1)
        throw std::invalid_argument("stream_sampler: epochs must be at least 1");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(count);
    std::vector<StreamItem> out;
    out.reserve(count * static_cast<std::size_t>(epochs));
    for (int e = 0; e < epochs; ++e) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order)
            out.push_back({i, e});
    }
    return out;
}

}  // namespace ocdl
