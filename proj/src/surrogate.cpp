// SPDX-License-Identifier: Apache-2.0
#include "ocdl/surrogate.hpp"

#include "ocdl/dft.hpp"
#include "ocdl/projections.hpp"

namespace ocdl {
namespace {

void check_alpha(double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("accumulate: alpha must lie in [0, 1]");
}

void check_normalizer(double normalizer)
{
    if (!(normalizer > 0.0))
        throw std::invalid_argument("surrogate: normalizer must be positive");
}

void add_coordinate_list(HessianAccumSpatial& acc, const CoordinateList& X, const Vector& s)
{
    const auto& e = X.entries;
    std::size_t begin = 0;
    while (begin < e.size()) {
        std::size_t end = begin;
        while (end < e.size() && e[end].row == e[begin].row)
            ++end;
        const double si = s[e[begin].row];
        for (std::size_t i = begin; i < end; ++i) {
            acc.b[e[i].col] += e[i].value * si;
            for (std::size_t j = begin; j < end; ++j)
                acc.A(e[i].col, e[j].col) += e[i].value * e[j].value;
        }
        begin = end;
    }
}

void check_spatial(const HessianAccumSpatial& acc, const CoeffMaps& x, const Signal& s)
{
    validate_signal(s);
    if (x.num_filters() != acc.num_filters || x.shape != shape_of(s))
        throw std::invalid_argument("accumulate_spatial: shape mismatch");
}

ComplexMatrix block_product(const HessianAccumFreq& acc, const ComplexMatrix& d_hat)
{
    ComplexMatrix out(d_hat.rows(), d_hat.cols());
    for (Index k = 0; k < d_hat.rows(); ++k)
        out.row(k).transpose() = acc.block(k) * d_hat.row(k).transpose();
    return out;
}

Eigen::Map<const Matrix> as_columns(const Vector& v, Index rows, Index cols) { return {v.data(), rows, cols}; }

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

// Support-restricted Hessian of the frequency accumulator acting on compact taps.
Vector hessian_compact(const HessianAccumFreq& acc, double normalizer, Index kr, Index kc, const Vector& v)
{
    const PaddedDictionary p = pad(Dictionary(acc.num_filters, kr, kc, v), acc.shape);
    const ComplexMatrix d_hat = dft_filters(p);
    PaddedDictionary hv = p;
    hv.taps = flatten(dft_inverse_columns(block_product(acc, d_hat), acc.shape)) / normalizer;
    return crop(hv).taps;
}

template <class Op>
double power_iteration(Op&& op, Vector& v, Index dim, int steps)
{
    if (steps < 1)
        throw std::invalid_argument("estimate_lipschitz: steps must be positive");
    if (v.size() != dim || !(v.norm() > 0.0))
        v = Vector::Ones(dim);
    v.normalize();
    double estimate = 0.0;
    for (int i = 0; i < steps; ++i) {
        Vector w = op(v);
        estimate = w.norm();
        if (!(estimate > 0.0))
            return 0.0;
        v = w / estimate;
    }
    return estimate;
}

}  // namespace

double forgetting_factor(long t, double p)
{
    if (t < 1)
        throw std::invalid_argument("forgetting_factor: t must be at least 1");
    if (!(p >= 0.0))
        throw std::invalid_argument("forgetting_factor: p must be non-negative");
    if (p == 0.0)
        return 1.0;
    return std::pow(1.0 - 1.0 / static_cast<double>(t), p);
}

double Forgetting::advance()
{
    ++t;
    const double alpha = forgetting_factor(t, p);
    normalizer = alpha * normalizer + 1.0;
    return alpha;
}

void StopRule::validate() const
{
    if (!(tau0 > 0.0))
        throw std::invalid_argument("StopRule: tau0 must be positive");
    if (!(alpha >= 0.0 && offset >= 0.0 && offset + alpha > 0.0))
        throw std::invalid_argument("StopRule: alpha and offset must be non-negative, not both zero");
}

double StopRule::tolerance(long t) const
{
    if (t < 1)
        throw std::invalid_argument("StopRule: t must be at least 1");
    return tau0 / (offset + alpha * static_cast<double>(t));
}

HessianAccumSpatial::HessianAccumSpatial(Index m, Index kr, Index kc)
    : num_filters(m), kernel_rows(kr), kernel_cols(kc), A(Matrix::Zero(m * kr * kc, m * kr * kc)),
      b(Vector::Zero(m * kr * kc))
{
}

HessianAccumFreq::HessianAccumFreq(Shape sh, Index m)
    : shape(sh), num_filters(m), blocks(static_cast<std::size_t>(m * m * sh.size()), Complex(0.0, 0.0)),
      b_hat(ComplexMatrix::Zero(sh.size(), m))
{
}

void accumulate_spatial(HessianAccumSpatial& acc, const CoeffMaps& x, const Signal& s, double alpha)
{
    check_alpha(alpha);
    check_spatial(acc, x, s);
    acc.A *= alpha;
    acc.b *= alpha;
    acc.energy = alpha * acc.energy + flat(s).squaredNorm();
    add_coordinate_list(acc, to_coordinate_list(x, acc.kernel_rows, acc.kernel_cols), flat(s));
}

void accumulate_spatial_masked(HessianAccumSpatial& acc, const CoeffMaps& x, const Signal& s, const Mask& w,
                               double alpha)
{
    check_alpha(alpha);
    check_spatial(acc, x, s);
    validate_mask(w, shape_of(s));
    const Vector ws = flat(w).cwiseProduct(flat(s));
    acc.A *= alpha;
    acc.b *= alpha;
    acc.energy = alpha * acc.energy + ws.squaredNorm();
    add_coordinate_list(acc, to_coordinate_list(x, acc.kernel_rows, acc.kernel_cols).masked(w), ws);
}

void accumulate_frequency(HessianAccumFreq& acc, const ComplexMatrix& x_hat, const ComplexVector& s_hat,
                          double alpha)
{
    check_alpha(alpha);
    const Index N = acc.shape.size();
    const Index M = acc.num_filters;
    if (x_hat.rows() != N || x_hat.cols() != M || s_hat.size() != N)
        throw std::invalid_argument("accumulate_frequency: shape mismatch");
    for (Index k = 0; k < N; ++k) {
        auto B = acc.block(k);
        for (Index j = 0; j < M; ++j)
            for (Index i = 0; i < M; ++i)
                B(i, j) = alpha * B(i, j) + std::conj(x_hat(k, i)) * x_hat(k, j);
    }
    acc.b_hat = alpha * acc.b_hat + (x_hat.conjugate().array().colwise() * s_hat.array()).matrix();
    // Parseval: ||s||^2 = ||s_hat||^2 / N.
    acc.energy = alpha * acc.energy + s_hat.squaredNorm() / static_cast<double>(N);
}

Vector surrogate_grad(const HessianAccumSpatial& acc, double normalizer, const Dictionary& d)
{
    check_normalizer(normalizer);
    if (d.taps.size() != acc.dim())
        throw std::invalid_argument("surrogate_grad: dictionary size mismatch");
    return (acc.A * d.taps - acc.b) / normalizer;
}

ComplexMatrix surrogate_grad(const HessianAccumFreq& acc, double normalizer, const ComplexMatrix& d_hat)
{
    check_normalizer(normalizer);
    if (d_hat.rows() != acc.shape.size() || d_hat.cols() != acc.num_filters)
        throw std::invalid_argument("surrogate_grad: spectrum shape mismatch");
    return (block_product(acc, d_hat) - acc.b_hat) / normalizer;
}

double surrogate_value(const HessianAccumSpatial& acc, double normalizer, const Dictionary& d)
{
    check_normalizer(normalizer);
    if (d.taps.size() != acc.dim())
        throw std::invalid_argument("surrogate_value: dictionary size mismatch");
    return (0.5 * d.taps.dot(acc.A * d.taps) - acc.b.dot(d.taps) + 0.5 * acc.energy) / normalizer;
}

double surrogate_value(const HessianAccumFreq& acc, double normalizer, const PaddedDictionary& d)
{
    check_normalizer(normalizer);
    if (d.shape != acc.shape || d.num_filters != acc.num_filters)
        throw std::invalid_argument("surrogate_value: dictionary shape mismatch");
    const ComplexMatrix d_hat = dft_filters(d);
    const double n = static_cast<double>(acc.shape.size());
    const double quad = (d_hat.conjugate().array() * block_product(acc, d_hat).array()).sum().real() / n;
    const double lin = (acc.b_hat.conjugate().array() * d_hat.array()).sum().real() / n;
    return (0.5 * quad - lin + 0.5 * acc.energy) / normalizer;
}

double fpr(const Dictionary& d, const Vector& grad, double eta)
{
    if (grad.size() != d.taps.size())
        throw std::invalid_argument("fpr: gradient size mismatch");
    Dictionary step = d;
    step.taps -= eta * grad;
    return (d.taps - proj_C(step).taps).norm();
}

double fpr(const PaddedDictionary& d, const Vector& grad, double eta)
{
    if (grad.size() != d.taps.size())
        throw std::invalid_argument("fpr: gradient size mismatch");
    PaddedDictionary step = d;
    step.taps -= eta * grad;
    return (d.taps - proj_CPN(step).taps).norm();
}

double estimate_lipschitz(const HessianAccumSpatial& acc, double normalizer, Vector& v, int steps)
{
    check_normalizer(normalizer);
    return power_iteration([&](const Vector& u) -> Vector { return acc.A * u / normalizer; }, v, acc.dim(), steps);
}

double estimate_lipschitz(const HessianAccumFreq& acc, double normalizer, Index kernel_rows, Index kernel_cols,
                          Vector& v, int steps)
{
    check_normalizer(normalizer);
    return power_iteration(
        [&](const Vector& u) { return hessian_compact(acc, normalizer, kernel_rows, kernel_cols, u); }, v,
        acc.num_filters * kernel_rows * kernel_cols, steps);
}

FistaOutcome<Dictionary> fista_d_update(const HessianAccumSpatial& acc, double normalizer, const Dictionary& d_init,
                                        double eta, double tau, int max_inner)
{
    check_normalizer(normalizer);
    if (d_init.taps.size() != acc.dim())
        throw std::invalid_argument("fista_d_update: dictionary size mismatch");
    const Index L = d_init.filter_size();
    auto inner = fista(
        d_init.taps, [&](const Vector& g) -> Vector { return (acc.A * g - acc.b) / normalizer; },
        [&](Vector& g) { project_unit_balls(g, L); }, eta, tau, max_inner);
    FistaOutcome<Dictionary> out{d_init, inner.iterations, inner.fpr, inner.converged};
    out.d.taps = std::move(inner.d);
    return out;
}

FistaOutcome<PaddedDictionary> fista_d_update(const HessianAccumFreq& acc, double normalizer,
                                              const PaddedDictionary& d_init, double eta, double tau,
                                              int max_inner)
{
    check_normalizer(normalizer);
    if (d_init.shape != acc.shape || d_init.num_filters != acc.num_filters)
        throw std::invalid_argument("fista_d_update: dictionary shape mismatch");
    const Shape sh = acc.shape;
    const Index N = sh.size();
    const Index M = acc.num_filters;
    auto grad = [&](const Vector& g) -> Vector {
        const ComplexMatrix g_hat = dft_forward_columns(as_columns(g, N, M), sh);
        return flatten(dft_inverse_columns(surrogate_grad(acc, normalizer, g_hat), sh));
    };
    auto project = [&](Vector& g) {
        mask_support(g, sh, d_init.kernel_rows, d_init.kernel_cols);
        project_unit_balls(g, N);
    };
    auto inner = fista(d_init.taps, grad, project, eta, tau, max_inner);
    FistaOutcome<PaddedDictionary> out{d_init, inner.iterations, inner.fpr, inner.converged};
    out.d.taps = std::move(inner.d);
    return out;
}

}  // namespace ocdl
