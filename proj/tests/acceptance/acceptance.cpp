// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Pass criterion numbers as arguments to
// run a subset.
#include "oracles.hpp"
#include "synthetic.hpp"

#include "cli.hpp"
#include "ocdl/data.hpp"
#include "ocdl/dft.hpp"
#include "ocdl/eval.hpp"
#include "ocdl/operator.hpp"
#include "ocdl/projections.hpp"
#include "ocdl/sgd.hpp"
#include "ocdl/surrogate.hpp"
#include "ocdl/train.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace ocdl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------

Verdict gradient_equivalence()
{
    std::mt19937_64 rng(101);
    const Shape sh{16, 16};
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const PaddedDictionary d = pad(oracle::random_dictionary(4, 4, 4, rng), sh);
        const CoeffMaps x = oracle::random_maps(sh, 4, 0.2, rng);
        const Signal s = oracle::random_signal(sh, rng);
        const Vector g = grad_spatial(x, d, s);
        const ComplexMatrix spatial_hat =
            dft_forward_columns(Eigen::Map<const Matrix>(g.data(), sh.size(), 4), sh);
        const ComplexMatrix freq = grad_frequency(dft_maps(x), dft_filters(d), dft_forward(s));
        worst = std::max(worst, (spatial_hat - freq).norm() / freq.norm());
    }
    return {worst < 1e-10, fmt("max relative error %.2e over 50 instances (limit 1e-10)", worst)};
}

Verdict option_paths()
{
    std::mt19937_64 rng(102);
    const Shape sh{16, 16};
    double sgd_worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Dictionary d = oracle::random_dictionary(4, 4, 4, rng);
        const CoeffMaps x = oracle::random_maps(sh, 4, 0.1, rng);
        const Signal s = oracle::random_signal(sh, rng);
        const FreqView f = make_freq_view(pad(d, sh), x, s);
        const double eta = 0.05 * (trial + 1);
        const Dictionary a = sgd_step_spatial(d, x, s, eta);
        const Dictionary b = crop(sgd_step_frequency(pad(d, sh), f.x_hat, f.s_hat, eta));
        sgd_worst = std::max(sgd_worst, oracle::rel_err(b.taps, a.taps));
    }

    const auto corpus = synthetic::make_corpus(4, 4, 4, sh, 5, 0, 0.05, 0.01, 102);
    TrainConfig cfg;
    cfg.algo = Algorithm::surrogate;
    cfg.num_filters = 4;
    cfg.kernel_rows = cfg.kernel_cols = 4;
    cfg.lambda = 0.1;
    cfg.seed = 7;
    cfg.domain = Domain::spatial;
    const auto tiles = synthetic::samples(corpus.train);
    const Dictionary spatial = train_surrogate(tiles, cfg).dictionary;
    cfg.domain = Domain::frequency;
    const Dictionary frequency = train_surrogate(tiles, cfg).dictionary;
    const double sur = (spatial.taps - frequency.taps).norm();
    return {sgd_worst < 1e-10 && sur < 1e-8,
            fmt("SGD single-step relative gap %.2e (limit 1e-10); surrogate gap after 5 steps %.2e (limit 1e-8)",
                sgd_worst, sur)};
}

Verdict cbpdn_oracle()
{
    std::mt19937_64 rng(103);
    const Shape sh{8, 8};
    const double lambda = 0.1;
    CscSettings cfg;
    cfg.lambda = lambda;
    cfg.tol_residual = 1e-8;
    cfg.max_iters = 20000;
    double worst_obj = 0.0, worst_kkt = 0.0;
    int unconverged = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Dictionary d = oracle::random_dictionary(2, 3, 3, rng);
        const Signal s = oracle::random_signal(sh, rng);
        const Matrix D = oracle::dense_D(d, sh);
        const Vector ones = Vector::Ones(sh.size());
        const Vector xo = oracle::lasso_fista(D, flat(s), ones, lambda, 100000);
        const double f_oracle = oracle::lasso_objective(D, flat(s), ones, xo, lambda);
        const CscResult r = cbpdn_solve(d, s, cfg);
        unconverged += r.converged ? 0 : 1;
        worst_obj = std::max(worst_obj, std::abs(r.objective - f_oracle));
        worst_kkt = std::max(worst_kkt, r.kkt_gap);
    }
    return {worst_obj < 1e-6 && worst_kkt < 1e-4 && unconverged == 0,
            fmt("max |f_admm - f_oracle| %.2e (limit 1e-6), max KKT gap %.2e (limit 1e-4), %d unconverged",
                worst_obj, worst_kkt, unconverged)};
}

Verdict fista_contract()
{
    std::mt19937_64 rng(104);
    const Shape sh{8, 8};
    const Index M = 2, kr = 3, kc = 3, L = kr * kc;
    HessianAccumSpatial acc(M, kr, kc);
    Forgetting forget{10.0};
    for (int t = 0; t < 6; ++t) {
        const double a = forget.advance();
        accumulate_spatial(acc, oracle::random_maps(sh, M, 0.4, rng), Signal(3.0 * oracle::random_signal(sh, rng)),
                           a);
    }
    const Matrix H = acc.A / forget.normalizer;
    const Vector c = acc.b / forget.normalizer;
    const double mu = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().minCoeff();
    Vector ev;
    const double eta = 1.0 / estimate_lipschitz(acc, forget.normalizer, ev, 500);
    const Dictionary d0 = oracle::random_dictionary(M, kr, kc, rng);
    const Vector d_star = oracle::projected_gd(H, c, [&](Vector& v) { oracle::unit_balls(v, L); }, d0.taps, 100000);

    double C = 0.0;
    std::string detail = fmt("min eig %.3g;", mu);
    bool ok = mu > 0.0;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        const double err = (fista_d_update(acc, forget.normalizer, d0, eta, tau, 100000).d.taps - d_star).norm();
        if (tau == 1e-2) {
            C = err / tau;
            detail += fmt(" C = %.3g;", C);
        } else {
            ok = ok && err <= 3.0 * C * tau;
            detail += fmt(" tau %.0e: err %.2e vs 3 C tau %.2e;", tau, err, 3.0 * C * tau);
        }
    }
    return {ok, detail};
}

Verdict clt_factor()
{
    std::mt19937_64 rng(105);
    std::string detail;
    bool ok = true;
    double prev = 0.0;
    for (double p : {0.0, 2.0, 10.0}) {
        const double got = clt_harness(p, 10000, 2000, rng);
        const double want = clt_dispersion(p);
        ok = ok && std::abs(got - want) <= 0.05 * want && got > prev;
        prev = got;
        detail += fmt("p=%g: %.4f vs %.4f (%.1f%%); ", p, got, want, 100.0 * std::abs(got - want) / want);
    }
    return {ok, detail + "monotone in p"};
}

Verdict iterate_differences()
{
    const auto corpus = synthetic::make_corpus(4, 4, 4, Shape{16, 16}, 200, 0, 0.05, 0.01, 106);
    TrainConfig cfg;
    cfg.algo = Algorithm::surrogate;
    cfg.num_filters = 4;
    cfg.kernel_rows = cfg.kernel_cols = 4;
    cfg.lambda = 0.1;
    cfg.seed = 6;
    std::vector<Vector> iterates{initial_dictionary(4, 4, 4, cfg.seed).taps};
    cfg.on_step = [&](long, const Dictionary& d) { iterates.push_back(d.taps); };
    train_surrogate(synthetic::samples(corpus.train), cfg);

    // iterates[t] = d(t); scaled[t] = t ||d(t+1) - d(t)|| for t = 100..199.
    std::vector<double> scaled;
    for (std::size_t t = 100; t < 200; ++t)
        scaled.push_back(static_cast<double>(t) * (iterates[t + 1] - iterates[t]).norm());
    const double mx = *std::max_element(scaled.begin(), scaled.end());
    const double med = median(scaled);
    return {mx <= 2.0 * med, fmt("max %.4g, median %.4g, ratio %.3f (limit 2)", mx, med, mx / med)};
}

// Synthetic recovery corpus shared by criteria 7 to 9.
synthetic::Corpus recovery_corpus(std::uint64_t seed)
{
    return synthetic::make_corpus(4, 6, 6, Shape{32, 32}, 64, 16, 0.02, 0.01, seed);
}

TrainConfig recovery_config(Algorithm algo, std::uint64_t seed)
{
    TrainConfig cfg;
    cfg.algo = algo;
    cfg.num_filters = 4;
    cfg.kernel_rows = cfg.kernel_cols = 6;
    cfg.lambda = 0.05;
    cfg.epochs = 3;
    cfg.seed = seed;
    return cfg;
}

Verdict synthetic_recovery()
{
    const auto corpus = recovery_corpus(107);
    const CscSettings ev = evaluation_settings(0.05);
    const double truth = test_objective(corpus.truth, corpus.test, ev);
    const auto tiles = synthetic::samples(corpus.train);
    bool ok = true;
    std::string detail = fmt("generating dictionary %.4f;", truth);
    for (Algorithm algo : {Algorithm::sgd, Algorithm::surrogate}) {
        const auto t0 = std::chrono::steady_clock::now();
        const TrainResult r = train(tiles, recovery_config(algo, 1));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double got = test_objective(r.dictionary, corpus.test, ev);
        ok = ok && got <= 1.05 * truth && secs < 600.0;
        detail += fmt(" %s %.4f (ratio %.4f, %.1f s);", algo == Algorithm::sgd ? "sgd" : "surrogate", got,
                      got / truth, secs);
    }
    return {ok, detail + " limit ratio 1.05"};
}

std::vector<Sample> tiles_of(const std::vector<Signal>& signals, std::optional<TileSpec> spec)
{
    std::vector<Sample> out;
    for (const Signal& s : signals) {
        if (!spec) {
            out.push_back({s, {}});
            continue;
        }
        for (Image& t : split_image(s, *spec))
            out.push_back({std::move(t), {}});
    }
    return out;
}

Verdict boundary_threshold()
{
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto corpus = recovery_corpus(200 + seed);
        const CscSettings ev = evaluation_settings(0.05);
        auto final_obj = [&](std::optional<TileSpec> spec) {
            const TrainConfig cfg = recovery_config(Algorithm::surrogate, seed);
            return test_objective(train(tiles_of(corpus.train, spec), cfg).dictionary, corpus.test, ev);
        };
        const double whole = final_obj(std::nullopt);
        const double t12 = final_obj(TileSpec{12, 12});
        const double t8 = final_obj(TileSpec{8, 8});
        const bool seed_ok = std::abs(t12 - whole) <= 0.02 * whole && t8 > t12;
        ok = ok && seed_ok;
        detail += fmt("seed %d: whole %.4f, 12x12 %.4f (%+.2f%%), 8x8 %.4f (%+.2f%% vs 12x12); ", int(seed), whole,
                      t12, 100.0 * (t12 - whole) / whole, t8, 100.0 * (t8 - t12) / t12);
    }
    return {ok, detail};
}

Verdict masked_learning()
{
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto corpus = recovery_corpus(300 + seed);
        const CscSettings ev = evaluation_settings(0.05);
        std::mt19937_64 rng(seed);
        std::vector<Sample> corrupted;
        for (const Signal& s : corpus.train) {
            Corrupted c = salt_pepper_corrupt(s, 0.3, rng);
            corrupted.push_back({std::move(c.signal), std::move(c.mask)});
        }
        // Masked learning runs on the spatial option; use it for all three runs.
        TrainConfig cfg = recovery_config(Algorithm::sgd, seed);
        cfg.domain = Domain::spatial;
        const double clean = test_objective(train(synthetic::samples(corpus.train), cfg).dictionary, corpus.test, ev);
        const double unmasked = test_objective(train(corrupted, cfg).dictionary, corpus.test, ev);
        cfg.masked = true;
        const double masked = test_objective(train(corrupted, cfg).dictionary, corpus.test, ev);
        const bool seed_ok = masked < unmasked && masked <= 1.1 * clean;
        ok = ok && seed_ok;
        detail += fmt("seed %d: clean %.4f, unmasked %.4f, masked %.4f (%+.2f%% vs clean); ", int(seed), clean,
                      unmasked, masked, 100.0 * (masked - clean) / clean);
    }
    return {ok, detail};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// CSV text with the wall_sec column (third field) removed.
std::string without_wall_clock(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        const auto a = line.find(',', line.find(',') + 1);
        const auto b = line.find(',', a + 1);
        out += line.substr(0, a) + line.substr(b) + '\n';
    }
    return out;
}

int run_cli(const std::vector<std::string>& args)
{
    std::vector<const char*> argv{"ocdl"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict determinism()
{
    const fs::path root = fs::temp_directory_path() / ("ocdl_accept_" + std::to_string(std::random_device{}()));
    fs::create_directories(root / "data");
    fs::create_directories(root / "test");
    const auto corpus = synthetic::make_corpus(3, 5, 5, Shape{32, 32}, 6, 2, 0.03, 0.01, 110);
    auto save = [](const fs::path& p, const Signal& s) {
        save_grayscale(p, ((s - s.minCoeff()) / (s.maxCoeff() - s.minCoeff())).eval());
    };
    for (std::size_t i = 0; i < corpus.train.size(); ++i)
        save(root / "data" / fmt("s%02d.pgm", int(i)), corpus.train[i]);
    for (std::size_t i = 0; i < corpus.test.size(); ++i)
        save(root / "test" / fmt("t%02d.pgm", int(i)), corpus.test[i]);

    bool ok = true;
    std::string detail;
    for (const char* algo : {"sgd", "surrogate"}) {
        std::string dict[2], log[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path d = root / fmt("%s%d.ocdl", algo, k);
            const fs::path l = root / fmt("%s%d.csv", algo, k);
            const int code = run_cli({"train", "--algo", algo, "--data", (root / "data").string(), "--test",
                                      (root / "test").string(), "--eval-every", "4", "--filters", "3", "--kernel",
                                      "5x5", "--split", "16x16", "--epochs", "2", "--seed", "42", "--out",
                                      d.string(), "--log", l.string()});
            ok = ok && code == 0;
            dict[k] = slurp(d);
            log[k] = slurp(l);
        }
        const bool same = !dict[0].empty() && dict[0] == dict[1] && without_wall_clock(log[0]) == without_wall_clock(log[1]);
        ok = ok && same;
        detail += fmt("%s: dictionary files %s, logs %s; ", algo, dict[0] == dict[1] ? "identical" : "DIFFER",
                      without_wall_clock(log[0]) == without_wall_clock(log[1]) ? "identical" : "DIFFER");
    }
    fs::remove_all(root);
    return {ok, detail};
}

Verdict memory_accounting()
{
    bool ok = true;
    std::string detail;
    for (auto [m, side] : {std::pair<Index, Index>{4, 16}, {8, 32}}) {
        const Shape sh{side, side};
        HessianAccumFreq acc(sh, m);
        const std::uint64_t est = memory_estimate(m, 0, sh.size(), 0.0, MemoryScheme::surrogate_frequency);
        const double rel = std::abs(static_cast<double>(acc.allocated_bytes()) - static_cast<double>(est)) / est;
        ok = ok && rel <= 0.1;
        detail += fmt("M=%d N=%dx%d: allocated %zu, estimate %llu (%.1f%%); ", int(m), int(side), int(side),
                      acc.allocated_bytes(), static_cast<unsigned long long>(est), 100.0 * rel);
    }
    return {ok, detail};
}

struct Criterion {
    int id;
    const char* name;
    double budget_sec;  // 0: no runtime limit
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "gradient equivalence", 5, gradient_equivalence},
        {2, "option path consistency", 30, option_paths},
        {3, "CBPDN oracle equivalence", 120, cbpdn_oracle},
        {4, "FISTA/FPR contract", 60, fista_contract},
        {5, "weighted CLT factor", 60, clt_factor},
        {6, "iterate-difference rate", 300, iterate_differences},
        {7, "synthetic dictionary recovery", 1200, synthetic_recovery},
        {8, "boundary-artifact threshold", 0, boundary_threshold},
        {9, "masked learning", 0, masked_learning},
        {10, "determinism", 0, determinism},
        {11, "memory accounting", 0, memory_accounting},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const Criterion& c : all) {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_sec > 0 && secs > c.budget_sec) {
            v.pass = false;
            v.detail += fmt(" over the %.0f s budget;", c.budget_sec);
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s %2d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
