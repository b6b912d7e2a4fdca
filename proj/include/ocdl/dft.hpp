// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/types.hpp"

namespace ocdl {

// 2-D DFT on row-major flattened arrays. The forward transform is
// unnormalized and the inverse carries the 1/N factor, so that
// ||dft_forward(a)||^2 == N * ||a||^2.

ComplexVector dft_forward(const Eigen::Ref<const Vector>& a, Shape shape);
ComplexVector dft_forward(const Eigen::Ref<const ComplexVector>& a, Shape shape);
/// Real part of the inverse transform.
Vector dft_inverse(const Eigen::Ref<const ComplexVector>& a_hat, Shape shape);
ComplexVector dft_inverse_complex(const Eigen::Ref<const ComplexVector>& a_hat, Shape shape);

inline ComplexVector dft_forward(const Image& a) { return dft_forward(flat(a), shape_of(a)); }

/// Column-wise transforms of N x K stacks (one flattened image per column).
ComplexMatrix dft_forward_columns(const Eigen::Ref<const Matrix>& a, Shape shape);
Matrix dft_inverse_columns(const Eigen::Ref<const ComplexMatrix>& a_hat, Shape shape);

/// Spectra of the padded filters as an N x M matrix.
ComplexMatrix dft_filters(const PaddedDictionary& d);
inline ComplexMatrix dft_maps(const CoeffMaps& x) { return dft_forward_columns(x.values, x.shape); }

}  // namespace ocdl
