// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/types.hpp"

namespace ocdl {

/// Step-size rule for the projected SGD learner: a fixed eta0, or a / (b + t).
struct StepSchedule {
    enum class Kind { fixed, diminishing };
    Kind kind = Kind::diminishing;
    double eta0 = 0.1;
    double a = 10.0;
    double b = 5.0;

    void validate() const;
};

/// Step size at step t (t >= 1).
double step_size(const StepSchedule& schedule, long t);

/// Option I: Proj_C(d - eta X^T (X d - s)) with X held as a coordinate list.
Dictionary sgd_step_spatial(const Dictionary& d, const CoeffMaps& x, const Signal& s, double eta);

/// Option II: Proj_CPN(IDFT(d_hat - eta X_hat^H (X_hat d_hat - s_hat))).
/// x_hat is N x M (one spectrum per column), s_hat has length N.
PaddedDictionary sgd_step_frequency(const PaddedDictionary& d, const ComplexMatrix& x_hat,
                                    const ComplexVector& s_hat, double eta);

/// Masked Option I: the residual is multiplied by W before the adjoint.
Dictionary sgd_step_masked_spatial(const Dictionary& d, const CoeffMaps& x, const Signal& s, const Mask& w,
                                   double eta);

/// Masked Option II: X_hat^H DFT{W (.) IDFT(X_hat d_hat - s_hat)}.
PaddedDictionary sgd_step_masked_frequency(const PaddedDictionary& d, const ComplexMatrix& x_hat,
                                           const ComplexVector& s_hat, const Mask& w, double eta);

}  // namespace ocdl
