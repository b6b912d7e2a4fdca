// SPDX-License-Identifier: Apache-2.0
#include "ocdl/train.hpp"

#include "ocdl/data.hpp"
#include "ocdl/dft.hpp"
#include "ocdl/eval.hpp"
#include "ocdl/projections.hpp"

#include <chrono>
#include <random>

namespace ocdl {
namespace {

using Clock = std::chrono::steady_clock;

// State shared by both learners: the stream, the clock and the log.
class Run {
public:
    Run(const std::vector<Sample>& tiles, const TrainConfig& cfg, const std::vector<Signal>& test)
        : tiles_(tiles), cfg_(cfg), test_(test), start_(Clock::now())
    {
        cfg.validate();
        if (tiles.empty())
            throw std::invalid_argument("train: empty tile stream");
        shape_ = shape_of(tiles.front().signal);
        for (const Sample& s : tiles) {
            validate_signal(s.signal);
            if (shape_of(s.signal) != shape_)
                throw std::invalid_argument("train: all tiles must share one shape");
            if (s.mask.size() != 0)
                validate_mask(s.mask, shape_);
        }
        if (cfg.kernel_rows > shape_.rows || cfg.kernel_cols > shape_.cols)
            throw std::invalid_argument("train: kernel larger than the tiles");
        if (auto w = boundary_warning({shape_.rows, shape_.cols}, cfg.kernel_rows, cfg.kernel_cols))
            result.warnings.push_back(*w);
        csc_ = cfg.csc;
        csc_.lambda = cfg.lambda;
        order_ = stream_sampler(tiles.size(), cfg.epochs, cfg.seed + 1);
        result.dictionary = cfg.initial ? proj_C(*cfg.initial)
                                        : initial_dictionary(cfg.num_filters, cfg.kernel_rows, cfg.kernel_cols, cfg.seed);
    }

    std::size_t steps() const { return order_.size(); }
    const Sample& sample(std::size_t i) const { return tiles_[order_[i].index]; }
    Shape shape() const { return shape_; }
    bool use_mask(const Sample& s) const { return cfg_.masked && s.mask.size() != 0; }

    CscResult sparse_code(const Sample& s, long t)
    {
        CscResult r = use_mask(s) ? cbpdn_masked_solve(result.dictionary, s.signal, s.mask, csc_)
                                  : cbpdn_solve(result.dictionary, s.signal, csc_);
        if (!r.converged)
            warn(t, "sparse coding stopped at max_iters (kkt gap " + std::to_string(r.kkt_gap) + ")");
        return r;
    }

    void warn(long t, const std::string& what) { result.warnings.push_back("step " + std::to_string(t) + ": " + what); }

    ConvergenceRecord record(std::size_t i, double sample_obj)
    {
        ConvergenceRecord r;
        r.t = static_cast<long>(i + 1);
        r.epoch = order_[i].epoch;
        r.sample_obj = sample_obj;
        if (cfg_.eval_every > 0 && !test_.empty() && r.t % cfg_.eval_every == 0)
            r.test_obj = test_objective(result.dictionary, test_, evaluation_settings(cfg_.lambda));
        r.wall_sec = std::chrono::duration<double>(Clock::now() - start_).count();
        if (cfg_.on_step)
            cfg_.on_step(r.t, result.dictionary);
        return r;
    }

    TrainResult result;

private:
    const std::vector<Sample>& tiles_;
    const TrainConfig& cfg_;
    const std::vector<Signal>& test_;
    Clock::time_point start_;
    Shape shape_;
    CscSettings csc_;
    std::vector<StreamItem> order_;
};

}  // namespace

void TrainConfig::validate() const
{
    if (!(lambda >= 0.0))
        throw std::invalid_argument("TrainConfig: lambda must be non-negative");
    if (num_filters < 1 || kernel_rows < 1 || kernel_cols < 1)
        throw std::invalid_argument("TrainConfig: filters and kernel dimensions must be positive");
    step.validate();
    if (!(p >= 0.0))
        throw std::invalid_argument("TrainConfig: p must be non-negative");
    stop.validate();
    if (max_inner < 1)
        throw std::invalid_argument("TrainConfig: max_inner must be at least 1");
    if (epochs < 1)
        throw std::invalid_argument("TrainConfig: epochs must be at least 1");
    if (eval_every < 0)
        throw std::invalid_argument("TrainConfig: eval_every must be non-negative");
    CscSettings c = csc;
    c.lambda = lambda;
    c.validate();
    if (initial && (initial->num_filters != num_filters || initial->kernel_rows != kernel_rows ||
                    initial->kernel_cols != kernel_cols))
        throw std::invalid_argument("TrainConfig: initial dictionary does not match the filter count and size");
    if (algo == Algorithm::surrogate && masked && domain == Domain::frequency)
        throw std::invalid_argument(
            "TrainConfig: masked surrogate learning needs the spatial domain; in the frequency domain W (.) X "
            "breaks the per-bin block structure and every step would need dense M N x M N solves");
    if (algo == Algorithm::surrogate && domain == Domain::spatial && num_filters * filter_size() > kMaxSpatialHessianDim)
        throw std::invalid_argument("TrainConfig: spatial surrogate Hessian limited to M * L <= 4096; use the "
                                    "frequency domain");
}

Dictionary initial_dictionary(Index m, Index kr, Index kc, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Dictionary d(m, kr, kc);
    for (Index i = 0; i < d.taps.size(); ++i)
        d.taps[i] = g(rng);
    return proj_C(d);
}

TrainResult train_sgd(const std::vector<Sample>& tiles, const TrainConfig& cfg, const std::vector<Signal>& test)
{
    Run run(tiles, cfg, test);
    const Index N = run.shape().size();
    for (std::size_t i = 0; i < run.steps(); ++i) {
        const long t = static_cast<long>(i + 1);
        const Sample& s = run.sample(i);
        const CscResult csc = run.sparse_code(s, t);
        const double eta = step_size(cfg.step, t);
        Dictionary& d = run.result.dictionary;
        MemoryScheme scheme = MemoryScheme::sgd_spatial_sparse;
        if (cfg.domain == Domain::spatial) {
            d = run.use_mask(s) ? sgd_step_masked_spatial(d, csc.x, s.signal, s.mask, eta)
                                : sgd_step_spatial(d, csc.x, s.signal, eta);
        } else {
            scheme = MemoryScheme::sgd_frequency;
            const PaddedDictionary pd = pad(d, run.shape());
            const ComplexMatrix x_hat = dft_maps(csc.x);
            const ComplexVector s_hat = dft_forward(s.signal);
            d = crop(run.use_mask(s) ? sgd_step_masked_frequency(pd, x_hat, s_hat, s.mask, eta)
                                     : sgd_step_frequency(pd, x_hat, s_hat, eta));
        }
        ConvergenceRecord r = run.record(i, csc.objective);
        r.step_or_tol = eta;
        r.mem_bytes = memory_estimate(cfg.num_filters, cfg.filter_size(), N, csc.x.density(), scheme);
        run.result.log.push_back(r);
    }
    return std::move(run.result);
}

TrainResult train_surrogate(const std::vector<Sample>& tiles, const TrainConfig& cfg, const std::vector<Signal>& test)
{
    Run run(tiles, cfg, test);
    const Shape sh = run.shape();
    const bool spatial = cfg.domain == Domain::spatial;
    HessianAccumSpatial acc_s;
    HessianAccumFreq acc_f;
    if (spatial)
        acc_s = HessianAccumSpatial(cfg.num_filters, cfg.kernel_rows, cfg.kernel_cols);
    else
        acc_f = HessianAccumFreq(sh, cfg.num_filters);

    Forgetting forget{cfg.p};
    double l1_mod = 0.0;
    Vector eig;  // power-iteration warm start
    for (std::size_t i = 0; i < run.steps(); ++i) {
        const long t = static_cast<long>(i + 1);
        const Sample& s = run.sample(i);
        const CscResult csc = run.sparse_code(s, t);
        const double alpha = forget.advance();
        l1_mod = alpha * l1_mod + cfg.lambda * csc.x.values.lpNorm<1>();
        Dictionary& d = run.result.dictionary;

        double lip = 0.0;
        if (spatial) {
            if (run.use_mask(s))
                accumulate_spatial_masked(acc_s, csc.x, s.signal, s.mask, alpha);
            else
                accumulate_spatial(acc_s, csc.x, s.signal, alpha);
            lip = estimate_lipschitz(acc_s, forget.normalizer, eig);
        } else {
            accumulate_frequency(acc_f, dft_maps(csc.x), dft_forward(s.signal), alpha);
            lip = estimate_lipschitz(acc_f, forget.normalizer, cfg.kernel_rows, cfg.kernel_cols, eig);
        }
        // Zero curvature means all maps so far are zero, so the gradient is zero too.
        const double eta = lip > 0.0 ? 1.0 / lip : 1.0;
        const double tau = cfg.stop.tolerance(t);

        int inner = 0;
        double residual = 0.0;
        bool converged = true;
        double value = 0.0;
        if (spatial) {
            auto out = fista_d_update(acc_s, forget.normalizer, d, eta, tau, cfg.max_inner);
            d = std::move(out.d);
            inner = out.iterations;
            residual = out.fpr;
            converged = out.converged;
            value = surrogate_value(acc_s, forget.normalizer, d);
        } else {
            auto out = fista_d_update(acc_f, forget.normalizer, pad(d, sh), eta, tau, cfg.max_inner);
            value = surrogate_value(acc_f, forget.normalizer, out.d);
            d = crop(out.d);
            inner = out.iterations;
            residual = out.fpr;
            converged = out.converged;
        }
        if (!converged)
            run.warn(t, "dictionary update reached max_inner (fpr " + std::to_string(residual) + ")");
        run.result.surrogate_values.push_back(value + l1_mod / forget.normalizer);

        ConvergenceRecord r = run.record(i, csc.objective);
        r.inner_iters = inner;
        r.fpr = residual;
        r.step_or_tol = tau;
        r.mem_bytes = spatial ? memory_estimate(cfg.num_filters, cfg.filter_size(), sh.size(), csc.x.density(),
                                                MemoryScheme::surrogate_spatial)
                              : memory_estimate(cfg.num_filters, cfg.filter_size(), sh.size(), csc.x.density(),
                                                MemoryScheme::surrogate_frequency);
        run.result.log.push_back(r);
    }
    return std::move(run.result);
}

TrainResult train(const std::vector<Sample>& tiles, const TrainConfig& cfg, const std::vector<Signal>& test)
{
    return cfg.algo == Algorithm::sgd ? train_sgd(tiles, cfg, test) : train_surrogate(tiles, cfg, test);
}

}  // namespace ocdl
