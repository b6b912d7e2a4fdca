// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "oracles.hpp"

#include "ocdl/csc.hpp"
#include "ocdl/operator.hpp"

using namespace ocdl;

namespace {

CscSettings tight(double lambda)
{
    CscSettings cfg;
    cfg.lambda = lambda;
    cfg.tol_residual = 1e-9;
    cfg.max_iters = 20000;
    return cfg;
}

Vector stacked(const CoeffMaps& x) { return Eigen::Map<const Vector>(x.values.data(), x.values.size()); }

}  // namespace

TEST_CASE("cbpdn: lambda above the zero threshold returns zero maps")
{
    std::mt19937_64 rng(1);
    const Shape sh{8, 8};
    const Dictionary d = oracle::random_dictionary(2, 3, 3, rng);
    const Signal s = oracle::random_signal(sh, rng);
    const Matrix D = oracle::dense_D(d, sh);
    const double threshold = (D.transpose() * flat(s)).cwiseAbs().maxCoeff();

    CscSettings cfg;
    cfg.lambda = threshold * 1.0001;
    const CscResult res = cbpdn_solve(d, s, cfg);
    CHECK(res.converged);
    CHECK(res.x.values.norm() == 0.0);
    CHECK(cbpdn_kkt_gap(d, s, CoeffMaps(sh, 2), cfg.lambda) == 0.0);
}

TEST_CASE("cbpdn: impulse dictionary reduces to scalar shrinkage")
{
    std::mt19937_64 rng(2);
    const Shape sh{6, 7};
    Dictionary impulse(1, 2, 2);
    impulse.taps[0] = 1.0;
    const Signal s = oracle::random_signal(sh, rng);
    const CscResult res = cbpdn_solve(impulse, s, tight(0.3));
    for (Index i = 0; i < sh.size(); ++i)
        CHECK(res.x.values(i, 0) == doctest::Approx(oracle::soft(flat(s)[i], 0.3)).epsilon(1e-6));

    CoeffMaps exact(sh, 1);
    for (Index i = 0; i < sh.size(); ++i)
        exact.values(i, 0) = oracle::soft(flat(s)[i], 0.3);
    CHECK(cbpdn_kkt_gap(impulse, s, exact, 0.3) < 1e-8);
}

TEST_CASE("cbpdn: matches a long proximal-gradient run and its support identity")
{
    std::mt19937_64 rng(3);
    const Shape sh{8, 8};
    for (int trial = 0; trial < 3; ++trial) {
        const Dictionary d = oracle::random_dictionary(2, 3, 3, rng);
        const Signal s = oracle::random_signal(sh, rng);
        const Matrix D = oracle::dense_D(d, sh);
        const Vector ones = Vector::Ones(sh.size());
        const Vector xo = oracle::lasso_fista(D, flat(s), ones, 0.1, 50000);
        const double f_oracle = oracle::lasso_objective(D, flat(s), ones, xo, 0.1);

        const CscResult res = cbpdn_solve(d, s, tight(0.1));
        CHECK(res.converged);
        CHECK(std::abs(res.objective - f_oracle) < 1e-6);
        CHECK(res.kkt_gap < 1e-4);
        CHECK(cbpdn_kkt_gap(d, s, res.x, 0.1) == doctest::Approx(res.kkt_gap));

        // x_S = (D_S^T D_S)^{-1} (D_S^T s - lambda sign(x_S)) on the oracle support.
        std::vector<Index> support;
        for (Index i = 0; i < xo.size(); ++i)
            if (std::abs(xo[i]) > 1e-9)
                support.push_back(i);
        Matrix DS(D.rows(), static_cast<Index>(support.size()));
        Vector sign(DS.cols());
        Vector xs(DS.cols());
        for (Index j = 0; j < DS.cols(); ++j) {
            DS.col(j) = D.col(support[j]);
            sign[j] = xo[support[j]] > 0 ? 1.0 : -1.0;
            xs[j] = stacked(res.x)[support[j]];
        }
        const Vector closed = (DS.transpose() * DS).ldlt().solve(DS.transpose() * flat(s) - 0.1 * sign);
        CHECK((closed - xs).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("cbpdn: solution invariants")
{
    std::mt19937_64 rng(4);
    const Shape sh{8, 8};
    const Dictionary d = oracle::random_dictionary(3, 3, 3, rng);
    const Signal s = oracle::random_signal(sh, rng);

    SUBCASE("default settings honour the KKT bound and decrease the objective")
    {
        CscSettings cfg;
        const CscResult res = cbpdn_solve(d, s, cfg);
        CHECK(res.converged);
        CHECK(res.kkt_gap <= 10.0 * cfg.tol_residual);
        CHECK(res.objective <= 0.5 * flat(s).squaredNorm());
    }
    SUBCASE("scaling s and lambda by c scales the objective by c^2")
    {
        const CscResult a = cbpdn_solve(d, s, tight(0.1));
        const CscResult b = cbpdn_solve(d, Signal(2.0 * s), tight(0.2));
        CHECK(std::abs(b.objective - 4.0 * a.objective) < 1e-6 * b.objective);
    }
    SUBCASE("density decreases as lambda grows")
    {
        double prev = 2.0;
        for (double lambda : {0.01, 0.1, 1.0}) {
            const double rho = cbpdn_solve(d, s, tight(lambda)).x.density();
            CHECK(rho < prev);
            prev = rho;
        }
    }
}

TEST_CASE("cbpdn: non-convergence and numeric failure")
{
    std::mt19937_64 rng(5);
    const Shape sh{8, 8};
    Dictionary d = oracle::random_dictionary(2, 3, 3, rng);
    const Signal s = oracle::random_signal(sh, rng);
    CscSettings cfg;
    cfg.max_iters = 2;
    const CscResult res = cbpdn_solve(d, s, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 2);

    d.taps[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(cbpdn_solve(d, s, CscSettings{}), NumericError);

    CscSettings bad;
    bad.relax = 2.5;
    CHECK_THROWS_AS(cbpdn_solve(oracle::random_dictionary(2, 3, 3, rng), s, bad), std::invalid_argument);
}

TEST_CASE("masked cbpdn: all-ones and all-zeros masks")
{
    std::mt19937_64 rng(6);
    const Shape sh{8, 8};
    const Dictionary d = oracle::random_dictionary(2, 3, 3, rng);
    const Signal s = oracle::random_signal(sh, rng);

    const CscResult plain = cbpdn_solve(d, s, tight(0.1));
    const CscResult ones = cbpdn_masked_solve(d, s, Mask::Ones(8, 8), tight(0.1));
    CHECK(ones.converged);
    CHECK(std::abs(ones.objective - plain.objective) < 1e-6);
    CHECK((ones.x.values - plain.x.values).cwiseAbs().maxCoeff() < 1e-4);

    const CscResult zeros = cbpdn_masked_solve(d, s, Mask::Zero(8, 8), CscSettings{});
    CHECK(zeros.x.values.norm() == 0.0);
    CHECK(zeros.objective == 0.0);
}

TEST_CASE("masked cbpdn: matches a long masked proximal-gradient run")
{
    std::mt19937_64 rng(7);
    const Shape sh{8, 8};
    for (int trial = 0; trial < 3; ++trial) {
        const Dictionary d = oracle::random_dictionary(2, 3, 3, rng);
        const Signal s = oracle::random_signal(sh, rng);
        const Mask w = oracle::random_mask(sh, 0.3, rng);
        const Matrix D = oracle::dense_D(d, sh);
        const Vector xo = oracle::lasso_fista(D, flat(s), flat(w), 0.1, 50000);
        const double f_oracle = oracle::lasso_objective(D, flat(s), flat(w), xo, 0.1);

        const CscResult res = cbpdn_masked_solve(d, s, w, tight(0.1));
        CHECK(res.converged);
        CHECK(std::abs(res.objective - f_oracle) < 1e-6);
        CHECK(cbpdn_kkt_gap_masked(d, s, w, res.x, 0.1) < 1e-5);
        CHECK(loss_l_masked(d, res.x, s, w, 0.1) == doctest::Approx(res.objective).epsilon(1e-12));
    }
    CHECK_THROWS_AS(cbpdn_masked_solve(oracle::random_dictionary(2, 3, 3, rng), oracle::random_signal(sh, rng),
                                       Mask::Constant(8, 8, 0.5), CscSettings{}),
                    std::invalid_argument);
}
