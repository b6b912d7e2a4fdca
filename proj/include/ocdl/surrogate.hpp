// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/types.hpp"

#include <cmath>
#include <vector>

namespace ocdl {

/// alpha(t) = (1 - 1/t)^p, for t >= 1 and p >= 0.
double forgetting_factor(long t, double p);

/// Running normalizer Lambda(t) = alpha(t) Lambda(t-1) + 1.
struct Forgetting {
    double p = 10.0;
    double normalizer = 0.0;
    long t = 0;

    /// Moves to the next step and returns its alpha.
    double advance();
};

/// Inner-solver tolerance tau(t) = tau0 / (offset + alpha t).
/// The defaults give tau0 / t; offset = 1 gives tau0 / (1 + alpha t).
struct StopRule {
    double tau0 = 0.01;
    double alpha = 1.0;
    double offset = 0.0;

    void validate() const;
    double tolerance(long t) const;
};

/// A_mod = sum_tau w_tau X_tau^T X_tau and b_mod = sum_tau w_tau X_tau^T s_tau
/// over compact filters, with w the products of forgetting factors.
struct HessianAccumSpatial {
    Index num_filters = 0;
    Index kernel_rows = 0;
    Index kernel_cols = 0;
    Matrix A;
    Vector b;
    /// Weighted sum of ||W s||^2, kept for the surrogate value.
    double energy = 0.0;

    HessianAccumSpatial() = default;
    HessianAccumSpatial(Index m, Index kr, Index kc);
    Index dim() const { return num_filters * kernel_rows * kernel_cols; }
};

/// Frequency-domain accumulator: one M x M Hermitian block per bin and
/// b_hat (N x M). Blocks are stored contiguously, column-major within a block.
struct HessianAccumFreq {
    Shape shape;
    Index num_filters = 0;
    std::vector<Complex> blocks;
    ComplexMatrix b_hat;
    double energy = 0.0;

    HessianAccumFreq() = default;
    HessianAccumFreq(Shape shape, Index m);
    Eigen::Map<const ComplexMatrix> block(Index k) const
    {
        return {blocks.data() + k * num_filters * num_filters, num_filters, num_filters};
    }
    Eigen::Map<ComplexMatrix> block(Index k)
    {
        return {blocks.data() + k * num_filters * num_filters, num_filters, num_filters};
    }
    std::size_t allocated_bytes() const { return blocks.capacity() * sizeof(Complex); }
};

/// A <- alpha A + X^T X, b <- alpha b + X^T s, walking the coordinate list row by row.
void accumulate_spatial(HessianAccumSpatial& acc, const CoeffMaps& x, const Signal& s, double alpha);
/// Same with W (.) X and W (.) s.
void accumulate_spatial_masked(HessianAccumSpatial& acc, const CoeffMaps& x, const Signal& s, const Mask& w,
                               double alpha);
/// Per bin k: B_k <- alpha B_k + a^H a with a = x_hat(k, :); b_hat <- alpha b_hat + conj(x_hat) s_hat.
void accumulate_frequency(HessianAccumFreq& acc, const ComplexMatrix& x_hat, const ComplexVector& s_hat,
                          double alpha);

/// (A d - b) / Lambda over compact taps.
Vector surrogate_grad(const HessianAccumSpatial& acc, double normalizer, const Dictionary& d);
/// Bin-wise (B_k d_hat(k, :)^T - b_hat(k, :)^T) / Lambda, N x M.
ComplexMatrix surrogate_grad(const HessianAccumFreq& acc, double normalizer, const ComplexMatrix& d_hat);

/// (1/2 d^T A d - b^T d + 1/2 energy) / Lambda. The weighted l1 term of the
/// surrogate does not depend on d and is left to the caller.
double surrogate_value(const HessianAccumSpatial& acc, double normalizer, const Dictionary& d);
double surrogate_value(const HessianAccumFreq& acc, double normalizer, const PaddedDictionary& d);

/// Fixed point residual ||d - Proj(d - eta grad)||, with Proj onto C or C_PN.
double fpr(const Dictionary& d, const Vector& grad, double eta);
double fpr(const PaddedDictionary& d, const Vector& grad, double eta);

/// Largest eigenvalue of A / Lambda restricted to the filter support, by
/// `steps` rounds of power iteration. `v` (length M * kr * kc) is the warm
/// start and receives the final vector; an empty or zero v restarts from ones.
double estimate_lipschitz(const HessianAccumSpatial& acc, double normalizer, Vector& v, int steps = 20);
double estimate_lipschitz(const HessianAccumFreq& acc, double normalizer, Index kernel_rows, Index kernel_cols,
                          Vector& v, int steps = 20);

template <class D>
struct FistaOutcome {
    D d;
    /// Index j at which fpr(g_aux^j) <= tau held; 0 means d_init was returned.
    int iterations = 0;
    double fpr = 0.0;
    /// False when max_inner was reached; d is then the last projected iterate.
    bool converged = false;
};

/// Accelerated projected gradient on the surrogate, warm-started at d_init,
/// stopping once fpr(g_aux^j) <= tau.
FistaOutcome<Dictionary> fista_d_update(const HessianAccumSpatial& acc, double normalizer, const Dictionary& d_init,
                                        double eta, double tau, int max_inner);
FistaOutcome<PaddedDictionary> fista_d_update(const HessianAccumFreq& acc, double normalizer,
                                              const PaddedDictionary& d_init, double eta, double tau,
                                              int max_inner);

/// The loop shared by both fista_d_update overloads. `grad(g)` returns the
/// surrogate gradient at g and `project(g)` projects in place.
template <class Grad, class Project>
FistaOutcome<Vector> fista(const Vector& d_init, Grad&& grad, Project&& project, double eta, double tau,
                           int max_inner)
{
    FistaOutcome<Vector> out;
    Vector g = d_init;
    Vector g_aux = d_init;
    double gamma = 1.0;
    for (int j = 0; j < max_inner; ++j) {
        Vector g_next = g_aux - eta * grad(g_aux);
        project(g_next);
        out.fpr = (g_next - g_aux).norm();
        if (out.fpr <= tau) {
            out.d = j == 0 ? d_init : std::move(g_next);
            out.iterations = j;
            out.converged = true;
            return out;
        }
        const double gamma_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * gamma * gamma));
        g_aux = g_next + ((gamma - 1.0) / gamma_next) * (g_next - g);
        g = std::move(g_next);
        gamma = gamma_next;
    }
    out.d = std::move(g);
    out.iterations = max_inner;
    return out;
}

}  // namespace ocdl
