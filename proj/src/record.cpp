// SPDX-License-Identifier: Apache-2.0
#include "ocdl/record.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ocdl {
namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

double parse_double(const std::string& s)
{
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw std::runtime_error("log row: bad number '" + s + "'");
    return v;
}

std::optional<double> parse_optional(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    return parse_double(s);
}

}  // namespace

void write_log_csv(std::ostream& out, const std::vector<ConvergenceRecord>& log)
{
    out << kLogHeader << '\n';
    for (const auto& r : log)
        out << r.t << ',' << r.epoch << ',' << fmt(r.wall_sec) << ',' << fmt(r.sample_obj) << ',' << fmt(r.test_obj)
            << ',' << r.inner_iters << ',' << fmt(r.fpr) << ',' << fmt(r.step_or_tol) << ',' << r.mem_bytes << '\n';
}

std::vector<ConvergenceRecord> read_log_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kLogHeader)
        throw std::runtime_error("log: missing or unexpected header");
    std::vector<ConvergenceRecord> log;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (!line.empty() && line.back() == ',')
            f.emplace_back();
        if (f.size() != 9)
            throw std::runtime_error("log: expected 9 fields, got " + std::to_string(f.size()));
        try {
            ConvergenceRecord r;
            r.t = std::stol(f[0]);
            r.epoch = std::stoi(f[1]);
            r.wall_sec = parse_double(f[2]);
            r.sample_obj = parse_double(f[3]);
            r.test_obj = parse_optional(f[4]);
            r.inner_iters = std::stoi(f[5]);
            r.fpr = parse_optional(f[6]);
            r.step_or_tol = parse_double(f[7]);
            r.mem_bytes = std::stoull(f[8]);
            log.push_back(r);
        } catch (const std::logic_error&) {
            throw std::runtime_error("log: malformed row '" + line + "'");
        }
    }
    return log;
}

}  // namespace ocdl
