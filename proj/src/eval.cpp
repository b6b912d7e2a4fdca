// SPDX-License-Identifier: Apache-2.0
#include "ocdl/eval.hpp"

#include <cmath>

namespace ocdl {

CscSettings evaluation_settings(double lambda)
{
    CscSettings cfg;
    cfg.lambda = lambda;
    cfg.tol_residual = 1e-4;
    cfg.max_iters = 1000;
    return cfg;
}

double test_objective(const Dictionary& d, const std::vector<Signal>& tests, const CscSettings& cfg,
                      int* unconverged)
{
    double total = 0.0;
    int missed = 0;
    for (const Signal& s : tests) {
        const CscResult r = cbpdn_solve(d, s, cfg);
        total += r.objective;
        missed += r.converged ? 0 : 1;
    }
    if (unconverged)
        *unconverged = missed;
    return total;
}

std::uint64_t memory_estimate(Index num_filters, Index filter_size, Index signal_size, double density,
                              MemoryScheme scheme)
{
    if (num_filters < 0 || filter_size < 0 || signal_size < 0 || !(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("memory_estimate: sizes must be non-negative and density in [0, 1]");
    constexpr double kReal = 8.0;
    constexpr double kComplex = 16.0;
    constexpr double kEntry = 24.0;
    const double M = static_cast<double>(num_filters);
    const double L = static_cast<double>(filter_size);
    const double N = static_cast<double>(signal_size);
    double bytes = 0.0;
    switch (scheme) {
    case MemoryScheme::sgd_spatial_sparse:
        bytes = N * M * L * density * kEntry;
        break;
    case MemoryScheme::sgd_frequency:
        bytes = M * N * kComplex;
        break;
    case MemoryScheme::surrogate_spatial:
        bytes = L * L * M * M * kReal + L * M * N * density * kEntry;
        break;
    case MemoryScheme::surrogate_frequency:
        bytes = M * M * N * kComplex;
        break;
    }
    return static_cast<std::uint64_t>(std::llround(bytes));
}

double clt_harness(double p, long n, long trials, std::mt19937_64& rng)
{
    if (n < 1000 || trials < 1000)
        throw std::invalid_argument("clt_harness: n and trials must be at least 1000");
    if (!(p >= 0.0))
        throw std::invalid_argument("clt_harness: p must be non-negative");
    const double mu = 0.5;
    const double sigma = 1.0 / std::sqrt(12.0);
    Vector w(n);
    for (long i = 0; i < n; ++i)
        w[i] = std::pow(static_cast<double>(i + 1) / static_cast<double>(n), p);
    w /= w.sum();

    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector z(trials);
    for (long k = 0; k < trials; ++k) {
        double acc = 0.0;
        for (long i = 0; i < n; ++i)
            acc += w[i] * u(rng);
        z[k] = std::sqrt(static_cast<double>(n)) * (acc - mu) / sigma;
    }
    const double mean = z.mean();
    return std::sqrt((z.array() - mean).square().sum() / static_cast<double>(trials - 1));
}

double clt_dispersion(double p) { return (p + 1.0) / std::sqrt(2.0 * p + 1.0); }

}  // namespace ocdl
