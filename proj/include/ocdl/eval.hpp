// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/csc.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace ocdl {

/// Sparse-coding settings used for evaluation: tol 1e-4, at most 1000 iterations.
CscSettings evaluation_settings(double lambda);

/// Sum over the test signals of the CBPDN optimal value under d. Signals of
/// any shape are accepted. If `unconverged` is given it receives the number
/// of solves that hit max_iters.
double test_objective(const Dictionary& d, const std::vector<Signal>& tests, const CscSettings& cfg,
                      int* unconverged = nullptr);

enum class MemoryScheme {
    sgd_spatial_sparse,   // coordinate list of X: N M L rho entries of 24 bytes
    sgd_frequency,        // X_hat: M N complex
    surrogate_spatial,    // dense A (L^2 M^2 reals) + coordinate list (L M N rho entries)
    surrogate_frequency,  // per-bin blocks: M^2 N complex
};

/// Bytes held by the dominant per-step structure of each update scheme.
/// Spectra are counted in full (no conjugate-symmetry savings).
std::uint64_t memory_estimate(Index num_filters, Index filter_size, Index signal_size, double density,
                              MemoryScheme scheme);

/// Empirical standard deviation, across `trials`, of sqrt(n) (Z_mod - mu) / sigma
/// with Z_mod the (i/n)^p-weighted mean of n Uniform[0, 1] draws.
/// Requires n >= 1000 and trials >= 1000.
double clt_harness(double p, long n, long trials, std::mt19937_64& rng);

/// Limit of clt_harness: (p + 1) / sqrt(2p + 1).
double clt_dispersion(double p);

}  // namespace ocdl
