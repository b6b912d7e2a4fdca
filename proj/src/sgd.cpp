// SPDX-License-Identifier: Apache-2.0
#include "ocdl/sgd.hpp"

#include "ocdl/dft.hpp"
#include "ocdl/operator.hpp"
#include "ocdl/projections.hpp"

namespace ocdl {
namespace {

void check_eta(double eta)
{
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("sgd step: eta must be finite and non-negative");
}

void check_spectra(const PaddedDictionary& d, const ComplexMatrix& x_hat, const ComplexVector& s_hat)
{
    const Index N = d.signal_size();
    if (x_hat.rows() != N || x_hat.cols() != d.num_filters || s_hat.size() != N)
        throw std::invalid_argument("sgd_step_frequency: shape mismatch");
}

PaddedDictionary descend_frequency(const PaddedDictionary& d, const ComplexMatrix& grad, double eta)
{
    const ComplexMatrix d_hat = dft_filters(d);
    const Matrix next = dft_inverse_columns(d_hat - eta * grad, d.shape);
    PaddedDictionary out = d;
    out.taps = Eigen::Map<const Vector>(next.data(), next.size());
    return proj_CPN(out);
}

}  // namespace

void StepSchedule::validate() const
{
    if (kind == Kind::fixed && !(eta0 > 0.0))
        throw std::invalid_argument("StepSchedule: eta0 must be positive");
    if (kind == Kind::diminishing && !(a > 0.0 && b > 0.0))
        throw std::invalid_argument("StepSchedule: a and b must be positive");
}

double step_size(const StepSchedule& schedule, long t)
{
    if (t < 1)
        throw std::invalid_argument("step_size: t must be at least 1");
    schedule.validate();
    if (schedule.kind == StepSchedule::Kind::fixed)
        return schedule.eta0;
    return schedule.a / (schedule.b + static_cast<double>(t));
}

Dictionary sgd_step_spatial(const Dictionary& d, const CoeffMaps& x, const Signal& s, double eta)
{
    check_eta(eta);
    const CoordinateList X = to_coordinate_list(x, d.kernel_rows, d.kernel_cols);
    Dictionary out = d;
    out.taps -= eta * grad_spatial(X, d, s);
    return proj_C(out);
}

PaddedDictionary sgd_step_frequency(const PaddedDictionary& d, const ComplexMatrix& x_hat,
                                    const ComplexVector& s_hat, double eta)
{
    check_eta(eta);
    check_spectra(d, x_hat, s_hat);
    return descend_frequency(d, grad_frequency(x_hat, dft_filters(d), s_hat), eta);
}

Dictionary sgd_step_masked_spatial(const Dictionary& d, const CoeffMaps& x, const Signal& s, const Mask& w,
                                   double eta)
{
    check_eta(eta);
    const CoordinateList X = to_coordinate_list(x, d.kernel_rows, d.kernel_cols);
    Dictionary out = d;
    out.taps -= eta * grad_spatial_masked(X, d, s, w);
    return proj_C(out);
}

PaddedDictionary sgd_step_masked_frequency(const PaddedDictionary& d, const ComplexMatrix& x_hat,
                                           const ComplexVector& s_hat, const Mask& w, double eta)
{
    check_eta(eta);
    check_spectra(d, x_hat, s_hat);
    return descend_frequency(d, grad_frequency_masked(x_hat, dft_filters(d), s_hat, w), eta);
}

}  // namespace ocdl
