// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace ocdl {

/// One row of the training log.
struct ConvergenceRecord {
    long t = 0;
    int epoch = 0;
    double wall_sec = 0.0;
    double sample_obj = 0.0;
    /// Set only on evaluation steps.
    std::optional<double> test_obj;
    int inner_iters = 0;
    /// Surrogate learner only.
    std::optional<double> fpr;
    /// eta for SGD, tau for the surrogate learner.
    double step_or_tol = 0.0;
    std::uint64_t mem_bytes = 0;

    bool operator==(const ConvergenceRecord&) const = default;
};

inline constexpr std::string_view kLogHeader = "t,epoch,wall_sec,sample_obj,test_obj,inner_iters,fpr,step_or_tol,mem_bytes";

/// Writes the header and one line per record; doubles use %.17g so they read back exactly.
void write_log_csv(std::ostream& out, const std::vector<ConvergenceRecord>& log);
/// Throws std::runtime_error on a bad header or malformed row.
std::vector<ConvergenceRecord> read_log_csv(std::istream& in);

}  // namespace ocdl
