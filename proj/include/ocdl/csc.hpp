// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/types.hpp"

namespace ocdl {

/// Settings for the ADMM sparse coder.
struct CscSettings {
    double lambda = 0.1;
    /// Initial ADMM penalty; values <= 0 select 10 * lambda + 1.
    double rho_init = 0.0;
    /// Over-relaxation parameter, in [1, 2].
    double relax = 1.8;
    /// Bound on the normalized primal and dual residuals.
    double tol_residual = 1e-3;
    int max_iters = 500;
    bool adaptive_rho = true;

    void validate() const;
    double initial_rho() const { return rho_init > 0.0 ? rho_init : 10.0 * lambda + 1.0; }
};

struct CscResult {
    CoeffMaps x;
    int iterations = 0;
    /// False when max_iters was hit before the stopping test passed; x is
    /// then the last iterate.
    bool converged = false;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double rho = 0.0;
    double kkt_gap = 0.0;
    double objective = 0.0;
};

/// Convolutional basis pursuit denoising,
///   min_x 1/2 ||sum_m d_m * x_m - s||^2 + lambda sum_m ||x_m||_1,
/// by ADMM with the x-update solved per frequency bin through a rank-one
/// (Sherman-Morrison) inverse. Stops once both normalized residuals are
/// below tol_residual and the KKT gap is below 10 * tol_residual.
/// Throws NumericError if an iterate becomes non-finite.
CscResult cbpdn_solve(const Dictionary& d, const Signal& s, const CscSettings& cfg);
CscResult cbpdn_solve(const PaddedDictionary& d, const Signal& s, const CscSettings& cfg);

/// Masked CBPDN, min_x 1/2 ||W (.) (sum_m d_m * x_m - s)||^2 + lambda ||x||_1,
/// solved with mask decoupling (an extra split z = D x).
CscResult cbpdn_masked_solve(const Dictionary& d, const Signal& s, const Mask& w, const CscSettings& cfg);
CscResult cbpdn_masked_solve(const PaddedDictionary& d, const Signal& s, const Mask& w, const CscSettings& cfg);

/// Optimality violation of x: with g = D^T (D x - s),
/// max over nonzero i of |g_i + lambda sign(x_i)| and over zero i of (|g_i| - lambda)_+.
double cbpdn_kkt_gap(const Dictionary& d, const Signal& s, const CoeffMaps& x, double lambda);
double cbpdn_kkt_gap_masked(const Dictionary& d, const Signal& s, const Mask& w, const CoeffMaps& x,
                            double lambda);

}  // namespace ocdl
