// SPDX-License-Identifier: Apache-2.0
#include "ocdl/csc.hpp"

#include "ocdl/dft.hpp"
#include "ocdl/operator.hpp"
#include "ocdl/projections.hpp"

#include <algorithm>
#include <cmath>

namespace ocdl {
namespace {

constexpr int kRhoUpdatePeriod = 10;
constexpr double kRhoResidualRatio = 10.0;
constexpr double kRhoScale = 2.0;

double kkt_from_gradient(const Matrix& g, const Matrix& x, double lambda)
{
    double gap = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double xi = x.data()[i];
        const double gi = g.data()[i];
        const double v = xi != 0.0 ? std::abs(gi + lambda * (xi > 0.0 ? 1.0 : -1.0))
                                   : std::max(std::abs(gi) - lambda, 0.0);
        gap = std::max(gap, v);
    }
    return gap;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

// The residual test is the primary criterion. Every rho-update period the
// KKT gap is also checked on its own: when the optimum is x = 0 the
// normalized primal residual stays at 1 while y is already exactly optimal.
bool stopping_test(const CscResult& res, const CscSettings& cfg, int it)
{
    const bool residuals = res.primal_residual < cfg.tol_residual && res.dual_residual < cfg.tol_residual;
    return residuals || it % kRhoUpdatePeriod == 0;
}

bool kkt_accepts(const CscResult& res, const CscSettings& cfg)
{
    const bool residuals = res.primal_residual < cfg.tol_residual && res.dual_residual < cfg.tol_residual;
    return residuals ? res.kkt_gap <= 10.0 * cfg.tol_residual : res.kkt_gap <= cfg.tol_residual;
}

// Per-bin solve of (a^H a + c I) x = b for each row a of d_hat, where b is
// the matching row of rhs. Sherman-Morrison:
//   x = (b - a^H (a b) / (c + a a^H)) / c.
void rank_one_solve(const ComplexMatrix& d_hat, const Vector& d_energy, double c, ComplexMatrix& rhs)
{
    for (Index k = 0; k < rhs.rows(); ++k) {
        Complex ab(0.0, 0.0);
        for (Index m = 0; m < rhs.cols(); ++m)
            ab += d_hat(k, m) * rhs(k, m);
        const Complex scale = ab / (c + d_energy[k]);
        for (Index m = 0; m < rhs.cols(); ++m)
            rhs(k, m) = (rhs(k, m) - std::conj(d_hat(k, m)) * scale) / c;
    }
}

void check_finite(const Matrix& x)
{
    if (!x.allFinite())
        throw NumericError("cbpdn: non-finite iterate");
}

struct Problem {
    Shape shape;
    Index num_filters;
    ComplexMatrix d_hat;  // N x M
    Vector d_energy;      // sum_m |d_hat(k, m)|^2
};

Problem make_problem(const PaddedDictionary& d, const Signal& s)
{
    validate_signal(s);
    if (d.shape != shape_of(s))
        throw std::invalid_argument("cbpdn: dictionary and signal shapes differ");
    if (!d.taps.allFinite())
        throw NumericError("cbpdn: non-finite dictionary taps");
    Problem p{d.shape, d.num_filters, dft_filters(d), {}};
    p.d_energy = p.d_hat.cwiseAbs2().rowwise().sum();
    return p;
}

double kkt_gap(const Problem& p, const Signal& s, const Mask* w, const CoeffMaps& x, double lambda)
{
    Signal r = apply_D(p.d_hat, x) - s;
    if (w)
        r *= *w;
    return kkt_from_gradient(apply_D_adjoint(p.d_hat, r), x.values, lambda);
}

double objective(const Problem& p, const Signal& s, const Mask* w, const CoeffMaps& x, double lambda)
{
    Signal r = apply_D(p.d_hat, x) - s;
    if (w)
        r *= *w;
    return 0.5 * r.matrix().squaredNorm() + lambda * x.values.lpNorm<1>();
}

// x = 0 is optimal exactly when ||D^T W s||_inf <= lambda.
bool zero_is_optimal(const Problem& p, const Signal& s, const Mask* w, double lambda, CscResult& res)
{
    res.x = CoeffMaps(p.shape, p.num_filters);
    res.kkt_gap = kkt_gap(p, s, w, res.x, lambda);
    if (res.kkt_gap > 0.0)
        return false;
    res.converged = true;
    res.objective = objective(p, s, w, res.x, lambda);
    return true;
}

CscResult solve_plain(const Problem& p, const Signal& s, const CscSettings& cfg)
{
    const Index N = p.shape.size();
    const Index M = p.num_filters;
    const double lambda = cfg.lambda;
    const double alpha = cfg.relax;
    double rho = cfg.initial_rho();

    const ComplexVector s_hat = dft_forward(s);
    const ComplexMatrix dh_s = p.d_hat.conjugate().array().colwise() * s_hat.array();

    Matrix x = Matrix::Zero(N, M);
    Matrix y = Matrix::Zero(N, M);
    Matrix u = Matrix::Zero(N, M);

    CscResult res;
    res.rho = rho;
    if (zero_is_optimal(p, s, nullptr, lambda, res))
        return res;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        ComplexMatrix rhs = dh_s + rho * dft_forward_columns(y - u, p.shape);
        rank_one_solve(p.d_hat, p.d_energy, rho, rhs);
        x = dft_inverse_columns(rhs, p.shape);
        check_finite(x);

        const Matrix xr = alpha * x + (1.0 - alpha) * y;
        const Matrix y_old = y;
        y = soft_threshold(xr + u, lambda / rho);
        u += xr - y;

        const double primal = (x - y).norm();
        const double dual = rho * (y - y_old).norm();
        res.primal_residual = safe_ratio(primal, std::max(x.norm(), y.norm()));
        res.dual_residual = safe_ratio(dual, rho * u.norm());
        res.iterations = it;

        if (stopping_test(res, cfg, it)) {
            res.x.values = y;
            res.kkt_gap = kkt_gap(p, s, nullptr, res.x, lambda);
            if (kkt_accepts(res, cfg)) {
                res.converged = true;
                break;
            }
        }

        if (cfg.adaptive_rho && it % kRhoUpdatePeriod == 0) {
            if (res.primal_residual > kRhoResidualRatio * res.dual_residual) {
                rho *= kRhoScale;
                u /= kRhoScale;
            } else if (res.dual_residual > kRhoResidualRatio * res.primal_residual) {
                rho /= kRhoScale;
                u *= kRhoScale;
            }
        }
    }

    res.x.values = y;
    if (!res.converged)
        res.kkt_gap = kkt_gap(p, s, nullptr, res.x, lambda);
    res.rho = rho;
    res.objective = objective(p, s, nullptr, res.x, lambda);
    return res;
}

CscResult solve_masked(const Problem& p, const Signal& s, const Mask& w, const CscSettings& cfg)
{
    validate_mask(w, p.shape);
    const Index N = p.shape.size();
    const Index M = p.num_filters;
    const double lambda = cfg.lambda;
    const double alpha = cfg.relax;
    double rho = cfg.initial_rho();

    const Vector wf = flat(w);
    const Vector ws = wf.cwiseProduct(flat(s));

    Matrix x = Matrix::Zero(N, M);
    Matrix y = Matrix::Zero(N, M);
    Matrix u2 = Matrix::Zero(N, M);
    Vector z = Vector::Zero(N);
    Vector u1 = Vector::Zero(N);

    CscResult res;
    res.rho = rho;
    if (zero_is_optimal(p, s, &w, lambda, res))
        return res;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        // x-update: (D^H D + I) x = D^H (z - u1) + (y - u2); rho cancels.
        const ComplexVector zu_hat = dft_forward(Vector(z - u1), p.shape);
        ComplexMatrix rhs = p.d_hat.conjugate().array().colwise() * zu_hat.array();
        rhs += dft_forward_columns(y - u2, p.shape);
        rank_one_solve(p.d_hat, p.d_energy, 1.0, rhs);
        const ComplexVector dx_hat = (p.d_hat.array() * rhs.array()).rowwise().sum();
        x = dft_inverse_columns(rhs, p.shape);
        const Vector dx = dft_inverse(dx_hat, p.shape);
        check_finite(x);

        const Matrix xr = alpha * x + (1.0 - alpha) * y;
        const Vector dxr = alpha * dx + (1.0 - alpha) * z;

        const Matrix y_old = y;
        const Vector z_old = z;
        const Vector v = dxr + u1;
        z = (ws + rho * v).cwiseQuotient((wf.array() + rho).matrix());
        y = soft_threshold(xr + u2, lambda / rho);
        u1 += dxr - z;
        u2 += xr - y;

        const double primal = std::sqrt((dx - z).squaredNorm() + (x - y).squaredNorm());
        const double dual = rho * std::sqrt((z - z_old).squaredNorm() + (y - y_old).squaredNorm());
        const double ax = std::sqrt(dx.squaredNorm() + x.squaredNorm());
        const double bz = std::sqrt(z.squaredNorm() + y.squaredNorm());
        const double un = rho * std::sqrt(u1.squaredNorm() + u2.squaredNorm());
        res.primal_residual = safe_ratio(primal, std::max(ax, bz));
        res.dual_residual = safe_ratio(dual, un);
        res.iterations = it;

        if (stopping_test(res, cfg, it)) {
            res.x.values = y;
            res.kkt_gap = kkt_gap(p, s, &w, res.x, lambda);
            if (kkt_accepts(res, cfg)) {
                res.converged = true;
                break;
            }
        }

        if (cfg.adaptive_rho && it % kRhoUpdatePeriod == 0) {
            if (res.primal_residual > kRhoResidualRatio * res.dual_residual) {
                rho *= kRhoScale;
                u1 /= kRhoScale;
                u2 /= kRhoScale;
            } else if (res.dual_residual > kRhoResidualRatio * res.primal_residual) {
                rho /= kRhoScale;
                u1 *= kRhoScale;
                u2 *= kRhoScale;
            }
        }
    }

    res.x.values = y;
    if (!res.converged)
        res.kkt_gap = kkt_gap(p, s, &w, res.x, lambda);
    res.rho = rho;
    res.objective = objective(p, s, &w, res.x, lambda);
    return res;
}

}  // namespace

void CscSettings::validate() const
{
    if (!(lambda >= 0.0))
        throw std::invalid_argument("CscSettings: lambda must be non-negative");
    if (!(relax >= 1.0 && relax <= 2.0))
        throw std::invalid_argument("CscSettings: relax must lie in [1, 2]");
    if (!(tol_residual > 0.0))
        throw std::invalid_argument("CscSettings: tol_residual must be positive");
    if (max_iters < 1)
        throw std::invalid_argument("CscSettings: max_iters must be at least 1");
}

CscResult cbpdn_solve(const PaddedDictionary& d, const Signal& s, const CscSettings& cfg)
{
    cfg.validate();
    return solve_plain(make_problem(d, s), s, cfg);
}

CscResult cbpdn_solve(const Dictionary& d, const Signal& s, const CscSettings& cfg)
{
    validate_signal(s);
    return cbpdn_solve(pad(d, shape_of(s)), s, cfg);
}

CscResult cbpdn_masked_solve(const PaddedDictionary& d, const Signal& s, const Mask& w, const CscSettings& cfg)
{
    cfg.validate();
    return solve_masked(make_problem(d, s), s, w, cfg);
}

CscResult cbpdn_masked_solve(const Dictionary& d, const Signal& s, const Mask& w, const CscSettings& cfg)
{
    validate_signal(s);
    return cbpdn_masked_solve(pad(d, shape_of(s)), s, w, cfg);
}

double cbpdn_kkt_gap(const Dictionary& d, const Signal& s, const CoeffMaps& x, double lambda)
{
    const Problem p = make_problem(pad(d, shape_of(s)), s);
    if (x.shape != p.shape || x.num_filters() != p.num_filters)
        throw std::invalid_argument("cbpdn_kkt_gap: shape mismatch");
    return kkt_gap(p, s, nullptr, x, lambda);
}

double cbpdn_kkt_gap_masked(const Dictionary& d, const Signal& s, const Mask& w, const CoeffMaps& x,
                            double lambda)
{
    const Problem p = make_problem(pad(d, shape_of(s)), s);
    if (x.shape != p.shape || x.num_filters() != p.num_filters)
        throw std::invalid_argument("cbpdn_kkt_gap_masked: shape mismatch");
    validate_mask(w, p.shape);
    return kkt_gap(p, s, &w, x, lambda);
}

}  // namespace ocdl
