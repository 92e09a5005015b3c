#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

#include "collabsense/ouprocess.hpp"
#include "oracles.hpp"

using namespace collabsense;

namespace {

// cP / eta2 = 2.5 with eta2 = tau = 1.
OUSamplingScheme fig6_scheme(double period) { return {1.0, 1.0, period, 2.5, 1.0}; }

double profile_max(const OUSamplingScheme& scheme) {
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) worst = std::max(worst, closed_form_variance(scheme, scheme.period() * i / 200));
    return worst;
}

}  // namespace

TEST_SUITE("ouprocess") {

TEST_CASE("scheme derived quantities") {
    const OUSamplingScheme s(2.0, 0.5, 0.3, 1.4, 0.8);
    CHECK(s.fisher() * s.eta2() == doctest::Approx(s.c() * s.power() * s.period()).epsilon(1e-15));
    CHECK(s.rho() == doctest::Approx(std::exp(-0.6)));
    CHECK(s.rho_prime() == doctest::Approx((1.0 - s.rho()) / (1.0 + s.rho())).epsilon(1e-14));
    CHECK(s.rho_prime() > 0.0);
    CHECK(s.rho_prime() < 1.0);
    const auto f = OUSamplingScheme::with_fisher(1.5, 1.0, 0.4, 3.0);
    CHECK(f.fisher() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(window_half_width(OUSamplingScheme(1.0, 1.0, 1.0, 1.0, 1.0)) == 28);
}

TEST_CASE("path generation") {
    SUBCASE("frozen process") {
        const VectorXd path = generate_path(1.0, 1e12, 1e-3, 1000, 4);
        CHECK((path.array() - path[0]).abs().maxCoeff() < 1e-5);
    }
    SUBCASE("stationary variance and autocovariance") {
        const double dt = 0.5;
        const int n = 1'000'000;
        const VectorXd path = generate_path(1.0, 1.0, dt, n, 8);
        const double mean = path.mean();
        const VectorXd centered = path.array() - mean;
        CHECK(std::abs(centered.squaredNorm() / n - 1.0) < 0.02);
        for (int lag = 1; lag * dt <= 2.0; ++lag) {
            CAPTURE(lag);
            const double cov = centered.head(n - lag).dot(centered.tail(n - lag)) / (n - lag);
            CHECK(std::abs(cov - std::exp(-lag * dt)) < 0.02);
        }
    }
    SUBCASE("irregular times") {
        std::vector<double> times;
        for (int k = 0; k < 200'000; ++k) times.push_back(0.7 * k + (k % 3) * 0.1);
        const VectorXd path = generate_path_at(times, 2.0, 1.0, 3);
        CHECK(std::abs(path.squaredNorm() / path.size() - 2.0) < 0.04);
        CHECK_THROWS_AS(generate_path_at(std::vector<double>{1.0, 0.5}, 1.0, 1.0, 1), std::invalid_argument);
    }
}

TEST_CASE("KMS matrix") {
    CHECK(kms_matrix(4, 0.0).isIdentity());
    MatrixXd expected(3, 3);
    expected << 1, .5, .25, .5, 1, .5, .25, .5, 1;
    CHECK(kms_matrix(3, 0.5) == expected);
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(kms_matrix(200, 0.99), Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK_THROWS_AS(kms_matrix(3, 1.0), std::invalid_argument);
}

TEST_CASE("conditioning on a few samples") {
    for (double J : {0.3, 2.0, 9.0}) {
        const std::vector<double> one = {0.0};
        CHECK(conditional_variance(one, 0.0, 1.7, 1.0, J) == doctest::Approx(1.7 / (1.0 + 1.7 * J)));
        const OUSamplingScheme s = OUSamplingScheme::with_fisher(1.7, 1.0, 0.6, J);
        const std::vector<double> two = {0.0, 0.6};
        CHECK(window_variance(s, 0.25, 0) == doctest::Approx(conditional_variance(two, 0.25, 1.7, 1.0, J)));
    }
    const auto noiseless = OUSamplingScheme::with_fisher(1.0, 1.0, 1.0, 1e10);
    CHECK(window_variance(noiseless, 0.0, window_half_width(noiseless)) < 1e-8);
    CHECK(window_variance(OUSamplingScheme(1.3, 1.0, 1.0, 0.0, 1.0), 0.4, 3) == 1.3);
}

TEST_CASE("closed form matches window conditioning") {
    for (double period : {0.25, 1.0, 3.0}) {
        for (double J : {0.5, 20.0}) {
            const auto s = OUSamplingScheme::with_fisher(0.5, 2.0, period, J);
            const WindowFilter filter(s, window_half_width(s));
            double worst = 0.0;
            for (int i = 0; i <= 100; ++i) {
                const double t = period * i / 100;
                worst = std::max(worst, std::abs(closed_form_variance(s, t) - filter.variance(t)));
            }
            CAPTURE(period);
            CAPTURE(J);
            CHECK(worst <= 1e-8);
        }
    }
}

TEST_CASE("closed form special values") {
    const OUSamplingScheme silent(1.4, 1.0, 0.5, 0.0, 1.0);
    for (double t : {0.0, 0.1, 0.25, 0.5}) CHECK(closed_form_variance(silent, t) == doctest::Approx(1.4));
    const auto s = OUSamplingScheme::with_fisher(1.2, 0.7, 0.9, 2.0);
    const double info = 1.2 * 2.0;
    CHECK(closed_form_variance(s, 0.0) ==
          doctest::Approx(1.2 / std::sqrt((info + s.rho_prime()) * (info + 1.0 / s.rho_prime()))).epsilon(1e-14));
}

TEST_CASE("profile symmetry and extremes") {
    for (double period : {0.1, 0.75, 1.5, 3.0}) {
        const OUSamplingScheme s = fig6_scheme(period);
        const VarianceProfile p = variance_profile(s, 201);
        const double at_edge = p.variances.front();
        const double at_middle = p.variances[100];
        for (std::size_t i = 0; i < p.times.size(); ++i) {
            CHECK(std::abs(p.variances[i] - p.variances[p.times.size() - 1 - i]) < 1e-12);
            CHECK(p.variances[i] > 0.0);
            CHECK(p.variances[i] <= 1.0);
            CHECK(p.variances[i] >= at_edge - 1e-15);
            CHECK(p.variances[i] <= at_middle + 1e-15);
        }
        CHECK(p.avar == doctest::Approx(avar(s)));
        CHECK(p.var0 == doctest::Approx(1.0 / std::sqrt(6.0)));
    }
}

TEST_CASE("worst-case variance falls with the sampling period") {
    double previous = profile_max(fig6_scheme(3.0));
    for (double period : {1.5, 0.75, 0.1}) {
        const double worst = profile_max(fig6_scheme(period));
        CHECK(worst <= previous);
        previous = worst;
    }
    CHECK(previous > var0(fig6_scheme(0.1)));
    CHECK(previous < 0.45);
}

TEST_CASE("average variance") {
    const auto s = OUSamplingScheme::with_fisher(1.0, 1.0, 1.0, 2.5);
    const int n = 10'000;
    double trapezoid = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double weight = (i == 0 || i == n) ? 0.5 : 1.0;
        trapezoid += weight * closed_form_variance(s, static_cast<double>(i) / n);
    }
    trapezoid /= n;
    CHECK(std::abs(trapezoid - avar(s)) / avar(s) < 1e-6);
}

TEST_CASE("sampling integral") {
    const double expected = 1.0 - std::exp(-2.0) - 2.0 * std::exp(-1.0);
    CHECK(sampling_integral(1.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));
    const double rho = std::exp(-1.0);
    const double quadrature = oracle::integrate(
        [rho](double t) {
            const double r = std::exp(-t);
            return (r - rho / r) * (r - rho / r);
        },
        0.0, 1.0);
    CHECK(std::abs(sampling_integral(1.0, 1.0) - quadrature) < 1e-10);
    // Small-x series and direct form meet continuously at x = 1.
    CHECK(normalized_sampling_integral(1.0 - 1e-12, 1.0) ==
          doctest::Approx(normalized_sampling_integral(1.0 + 1e-12, 1.0)).epsilon(1e-10));
    for (double x : {1e-3, 0.3, 0.9}) {
        const double direct = oracle::integrate(
            [x](double t) {
                const double r = std::exp(-t);
                const double rho = std::exp(-x);
                return (r - rho / r) * (r - rho / r);
            },
            0.0, x) / x;
        CAPTURE(x);
        CHECK(std::abs(normalized_sampling_integral(x, 1.0) * std::expm1(-x) * std::expm1(-x) - direct) <
              1e-10 * direct);
    }
}

TEST_CASE("T to zero limit") {
    CHECK(var0(1.0, 1.0, 2.5, 1.0) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));
    CHECK(var0(1.7, 1.0, 0.0, 3.0) == 1.7);
    const OUSamplingScheme base = fig6_scheme(0.1);
    double previous = avar(base);
    for (double period : {1e-2, 1e-3}) {
        const double a = avar(base.with_period(period));
        CHECK(a < previous);
        CHECK(a >= var0(base) - 1e-12);
        previous = a;
    }
    CHECK(previous - var0(base) < 1e-3);
    const OUSamplingScheme fine = base.with_period(1e-4);
    for (int i = 0; i <= 100; ++i) CHECK(std::abs(closed_form_variance(fine, 1e-4 * i / 100) - var0(base)) < 1e-4);
}

TEST_CASE("average variance decreases with the sampling period") {
    for (double c : {0.5, 1.0, 1.8}) {
        const OUSamplingScheme s(1.0, 1.0, 3.0, 1.4, c);
        double previous = avar(s);
        for (double period : {1.5, 0.7, 0.4, 0.1, 0.05}) {
            const double a = avar(s.with_period(period));
            CHECK(a <= previous);
            CHECK(a >= var0(s) - 1e-10);
            previous = a;
        }
    }
}

TEST_CASE("spatial constants") {
    AsymptoticConfig homogeneous;
    homogeneous.sigma2 = 0.0;
    homogeneous.xi2 = 2.0;
    homogeneous.observation = ConstantGain{1.0};
    homogeneous.channel = ConstantGain{1.0};
    for (int q : {1, 4}) {
        homogeneous.q = q;
        CHECK(spatial_constant(Strategy::optimal, homogeneous) == doctest::Approx(0.5));
        CHECK(spatial_constant(Strategy::equal, homogeneous) == doctest::Approx(0.5));
    }
    for (double sigma2 : {0.5, 1.0, 2.0}) {
        for (int q : {1, 2, 5, 20}) {
            AsymptoticConfig cfg;
            cfg.sigma2 = sigma2;
            cfg.q = q;
            CHECK(spatial_constant(Strategy::optimal, cfg) >= spatial_constant(Strategy::equal, cfg));
            const double power = 1.4;
            const double period = 0.4;
            cfg.energy = power * period;
            for (Strategy s : {Strategy::optimal, Strategy::equal}) {
                CHECK(spatial_constant(s, cfg) * power * period ==
                      doctest::Approx(cfg.eta2 * j_asym(s, cfg)).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("filter on noiseless samples reproduces them") {
    const auto s = OUSamplingScheme::with_fisher(1.0, 1.0, 0.5, 1e10);
    std::vector<double> times;
    for (int k = 0; k < 200; ++k) times.push_back(0.5 * k);
    const VectorXd theta = generate_path_at(times, 1.0, 1.0, 21);
    const VectorXd estimate = filter_path(std::span<const double>(theta.data(), theta.size()), s, times);
    CHECK((estimate - theta).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("filter is linear") {
    const auto s = OUSamplingScheme::with_fisher(1.0, 1.0, 0.4, 2.0);
    std::vector<double> grid;
    for (int j = 0; j < 300; ++j) grid.push_back(-1.0 + j * 0.07);
    std::mt19937_64 engine(5);
    std::normal_distribution<double> normal;
    VectorXd y1(60);
    VectorXd y2(60);
    for (int k = 0; k < 60; ++k) {
        y1[k] = normal(engine);
        y2[k] = normal(engine);
    }
    const VectorXd sum = y1 + y2;
    auto run = [&](const VectorXd& y) { return filter_path(std::span<const double>(y.data(), y.size()), s, grid, -2.0); };
    CHECK((run(sum) - run(y1) - run(y2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(filter_path(std::span<const double>(), s, grid), std::invalid_argument);
}

TEST_CASE("filter mean-square error matches the average variance") {
    for (double period : {0.75, 3.0}) {
        const OUSamplingScheme s = fig6_scheme(period);
        const int paths = 300;
        double sum = 0.0;
        double sum2 = 0.0;
        for (int p = 0; p < paths; ++p) {
            const double mse = simulate_filter_trace(s, 30.0, 1600, 1000 + p).mse();
            sum += mse;
            sum2 += mse * mse;
        }
        const double mean = sum / paths;
        const double se = std::sqrt((sum2 / paths - mean * mean) / (paths - 1));
        CAPTURE(period);
        CHECK(std::abs(mean - avar(s)) < 4.0 * se);
    }
}

}
