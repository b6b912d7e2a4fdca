// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/types.hpp"

namespace ocdl {

/// Signals at or above this many pixels are convolved through the DFT;
/// smaller ones use direct circular summation.
inline constexpr Index kDftCrossover = 256;

// The operator X maps a dictionary-space vector d to sum_m d_m * x_m under
// circular boundary conditions.

Signal apply_X(const CoeffMaps& x, const Dictionary& d);
Signal apply_X(const CoeffMaps& x, const PaddedDictionary& d);

/// X^T r restricted to the kernel support (length M*Lr*Lc).
Vector apply_X_adjoint(const CoeffMaps& x, const Signal& r, Index kernel_rows, Index kernel_cols);
/// X^T r over the full padded space (length M*N): the circular
/// cross-correlation of each map with r.
Vector apply_X_adjoint_padded(const CoeffMaps& x, const Signal& r);

/// D^T r: correlation of r with every filter, one column per filter (N x M).
Matrix apply_D_adjoint(const ComplexMatrix& d_hat, const Signal& r);
/// D x through precomputed filter spectra.
Signal apply_D(const ComplexMatrix& d_hat, const CoeffMaps& x);

/// 1/2 ||X d - s||^2 + lambda ||x||_1.
double loss_l(const Dictionary& d, const CoeffMaps& x, const Signal& s, double lambda);
double loss_l(const PaddedDictionary& d, const CoeffMaps& x, const Signal& s, double lambda);
/// 1/2 ||W (.) (X d - s)||^2 + lambda ||x||_1.
double loss_l_masked(const Dictionary& d, const CoeffMaps& x, const Signal& s, const Mask& w, double lambda);

/// X^T (X d - s). Uses the coordinate list of X whenever the maps are not dense.
Vector grad_spatial(const CoeffMaps& x, const Dictionary& d, const Signal& s);
Vector grad_spatial(const CoordinateList& X, const Dictionary& d, const Signal& s);
/// Padded-space gradient (length M*N), the spatial twin of grad_frequency.
Vector grad_spatial(const CoeffMaps& x, const PaddedDictionary& d, const Signal& s);
/// X^T (W (.) (X d - s)).
Vector grad_spatial_masked(const CoordinateList& X, const Dictionary& d, const Signal& s, const Mask& w);

/// Conjugate cogradient X^H (X d - s) evaluated bin-wise. Inputs are N x M
/// spectra of maps and filters and the signal spectrum; output is N x M.
ComplexMatrix grad_frequency(const ComplexMatrix& x_hat, const ComplexMatrix& d_hat, const ComplexVector& s_hat);
/// X^H DFT{W (.) IDFT(X d - s)}.
ComplexMatrix grad_frequency_masked(const ComplexMatrix& x_hat, const ComplexMatrix& d_hat,
                                    const ComplexVector& s_hat, const Mask& w);

}  // namespace ocdl
