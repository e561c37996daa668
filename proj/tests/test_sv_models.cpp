#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "svevt/errors.hpp"
#include "svevt/stats.hpp"
#include "svevt/sv_models.hpp"

using namespace svevt;

namespace {

SvParams table5_params() {
    SvParams p;
    p.mu = -0.56;
    p.phi = 0.94;
    p.sigma = 0.33;
    p.nu = 24.0;
    p.rho = -0.61;
    p.beta = {0.0};
    return p;
}

// E[sqrt(lambda (nu-2)/nu)] for lambda ~ IG(nu/2, nu/2); the t mixture scale
// attenuates the epsilon-eta correlation by this factor
double mixture_scale_mean(double nu) {
    return std::sqrt((nu - 2.0) / 2.0) *
           std::exp(std::lgamma((nu - 1.0) / 2.0) - std::lgamma(nu / 2.0));
}

}  // namespace

TEST_CASE("degenerate vanilla path is h = 0 with normal-range draws") {
    SvParams p;
    p.mu = 0.0;
    p.phi = 0.0;
    p.sigma = 1e-12;
    p.beta = {0.0};
    SvPath path = simulate(SvVariant::Vanilla, p, 5, nullptr, 11);
    REQUIRE(path.h.size() == 5);
    REQUIRE(path.y.size() == 5);
    for (double h : path.h) CHECK(std::fabs(h) < 1e-9);
    for (double y : path.y) CHECK(std::fabs(y) < 8.0);

    SvPath again = simulate(SvVariant::Vanilla, p, 5, nullptr, 11);
    for (std::size_t t = 0; t < 5; ++t) CHECK(path.y[t] == again.y[t]);
    SvPath other = simulate(SvVariant::Vanilla, p, 5, nullptr, 12);
    bool differs = false;
    for (std::size_t t = 0; t < 5; ++t) differs = differs || other.y[t] != path.y[t];
    CHECK(differs);
}

TEST_CASE("latent variance matches the stationary law") {
    SvParams p = table5_params();
    SvPath path = simulate(SvVariant::TLeverage, p, 10000, nullptr, 21);
    double target = p.sigma * p.sigma / (1.0 - p.phi * p.phi);
    CHECK(stats::variance(path.h) == doctest::Approx(target).epsilon(0.10));
    CHECK(stats::mean(path.h) == doctest::Approx(p.mu).epsilon(0.15));
}

TEST_CASE("kurtosis ordering across variants") {
    // the t(5) tail makes the kurtosis estimator itself heavy-tailed, so the
    // stable ordering is vanilla below both t variants; T vs TL is within noise
    int ordered = 0;
    double sum_v = 0.0, sum_t = 0.0, sum_tl = 0.0;
    for (int s = 0; s < 10; ++s) {
        SvParams base;
        base.mu = -0.5;
        base.phi = 0.95;
        base.sigma = 0.25;
        base.beta = {0.0};
        SvPath v = simulate(SvVariant::Vanilla, base, 10000, nullptr, 100 + s);
        SvParams pt = base;
        pt.nu = 5.0;
        SvPath t = simulate(SvVariant::T, pt, 10000, nullptr, 100 + s);
        SvParams ptl = pt;
        ptl.rho = -0.6;
        SvPath tl = simulate(SvVariant::TLeverage, ptl, 10000, nullptr, 100 + s);
        double kv = stats::excess_kurtosis(v.y);
        double kt = stats::excess_kurtosis(t.y);
        double ktl = stats::excess_kurtosis(tl.y);
        sum_v += kv;
        sum_t += kt;
        sum_tl += ktl;
        if (kv < kt && kv < ktl) ++ordered;
    }
    CHECK(ordered >= 9);
    CHECK(sum_v < sum_t);
    CHECK(sum_v < sum_tl);
}

TEST_CASE("epsilon-eta correlation honors rho") {
    std::size_t n = 100000;
    SvParams p;
    p.mu = -0.4;
    p.phi = 0.9;
    p.sigma = 0.3;
    p.rho = -0.6;
    p.beta = {0.0};

    auto recover_corr = [&](const SvPath& path, const SvParams& q) {
        std::vector<double> eps, eta;
        for (std::size_t t = 0; t + 1 < path.h.size(); ++t) {
            eps.push_back(path.y[t] / std::exp(path.h[t] / 2.0));
            eta.push_back((path.h[t + 1] - q.mu - q.phi * (path.h[t] - q.mu)) / q.sigma);
        }
        double me = stats::mean(eps), mh = stats::mean(eta);
        double num = 0.0, de = 0.0, dh = 0.0;
        for (std::size_t t = 0; t < eps.size(); ++t) {
            num += (eps[t] - me) * (eta[t] - mh);
            de += (eps[t] - me) * (eps[t] - me);
            dh += (eta[t] - mh) * (eta[t] - mh);
        }
        return num / std::sqrt(de * dh);
    };

    SvPath lev = simulate(SvVariant::Leverage, p, n, nullptr, 31);
    CHECK(recover_corr(lev, p) == doctest::Approx(-0.6).epsilon(0.015));

    SvParams ptl = p;
    ptl.nu = 5.0;
    SvPath tl = simulate(SvVariant::TLeverage, ptl, n, nullptr, 32);
    double attenuated = -0.6 * mixture_scale_mean(5.0);
    CHECK(recover_corr(tl, ptl) == doctest::Approx(attenuated).epsilon(0.04));

    // lag-1 autocorrelation of h tracks phi
    CHECK(stats::acf(lev.h, 1) == doctest::Approx(p.phi).epsilon(0.01));
    CHECK(stats::mean(lev.y) == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
}

TEST_CASE("regressor matrix feeds the mean equation") {
    std::size_t n = 5000;
    Matrix x(n, std::vector<double>{1.0, 0.0});
    for (std::size_t t = 0; t < n; ++t) x[t][1] = (t % 2 == 0) ? 1.0 : -1.0;
    SvParams p;
    p.mu = -1.0;
    p.phi = 0.9;
    p.sigma = 0.2;
    p.beta = {0.3, 1.7};
    SvPath path = simulate(SvVariant::Vanilla, p, n, &x, 77);
    double even = 0.0, odd = 0.0;
    for (std::size_t t = 0; t < n; ++t) (t % 2 == 0 ? even : odd) += path.y[t];
    even /= n / 2.0;
    odd /= n / 2.0;
    CHECK(even == doctest::Approx(0.3 + 1.7).epsilon(0.1));
    CHECK(odd == doctest::Approx(0.3 - 1.7).epsilon(0.1));

    Matrix wrong(n - 1, std::vector<double>{1.0});
    CHECK_THROWS_AS(simulate(SvVariant::Vanilla, p, n, &wrong, 77), DataError);
}

TEST_CASE("parameter invariants are enforced") {
    SvParams p;
    p.beta = {0.0};
    p.phi = 1.1;
    CHECK_THROWS_AS(simulate(SvVariant::Vanilla, p, 10, nullptr, 1), DataError);
    p.phi = 0.9;
    p.sigma = 0.0;
    CHECK_THROWS_AS(simulate(SvVariant::Vanilla, p, 10, nullptr, 1), DataError);
    p.sigma = 0.2;
    CHECK_THROWS_AS(simulate(SvVariant::T, p, 10, nullptr, 1), DataError);  // missing nu
    p.nu = 2.0;
    CHECK_THROWS_AS(simulate(SvVariant::T, p, 10, nullptr, 1), DataError);  // nu <= 2
    p.nu = 10.0;
    CHECK_THROWS_AS(simulate(SvVariant::TLeverage, p, 10, nullptr, 1), DataError);  // missing rho
    p.rho = -1.0;
    CHECK_THROWS_AS(simulate(SvVariant::TLeverage, p, 10, nullptr, 1), DataError);
    p.rho = -0.5;
    CHECK_THROWS_AS(simulate(SvVariant::TLeverage, p, 0, nullptr, 1), DataError);  // n < 1
    CHECK_NOTHROW(simulate(SvVariant::TLeverage, p, 10, nullptr, 1));
}

TEST_CASE("student t return generator") {
    ReturnSeries a = simulate_student_t_returns(1000, 15.0, 4242);
    ReturnSeries b = simulate_student_t_returns(1000, 15.0, 4242);
    REQUIRE(a.size() == 1000);
    for (std::size_t t = 0; t < 1000; ++t) CHECK(a.returns[t] == b.returns[t]);
    CHECK(strictly_increasing(a.dates));

    ReturnSeries big = simulate_student_t_returns(100000, 1e6, 9);
    CHECK(std::fabs(stats::excess_kurtosis(big.returns)) < 0.1);
    CHECK(stats::variance(big.returns) == doctest::Approx(1.0).epsilon(0.05));

    CHECK_THROWS_AS(simulate_student_t_returns(0, 15.0, 1), DataError);
    CHECK_THROWS_AS(simulate_student_t_returns(100, 2.0, 1), DataError);
}

TEST_CASE("variant helpers") {
    CHECK(variant_name(SvVariant::Vanilla) == "sv");
    CHECK(variant_name(SvVariant::T) == "svt");
    CHECK(variant_name(SvVariant::Leverage) == "svl");
    CHECK(variant_name(SvVariant::TLeverage) == "svtl");
    CHECK(variant_from_name("svtl") == SvVariant::TLeverage);
    CHECK_THROWS_AS(variant_from_name("garch"), DataError);
    CHECK(variant_has_t(SvVariant::T));
    CHECK(!variant_has_t(SvVariant::Leverage));
    CHECK(variant_has_leverage(SvVariant::TLeverage));
    CHECK(!variant_has_leverage(SvVariant::T));
}
