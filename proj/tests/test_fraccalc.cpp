#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qhlab/errors.hpp"
#include "qhlab/fraccalc.hpp"
#include "qhlab/quadrature.hpp"

using namespace qhlab;

namespace {

GridFunction fn(int n, const std::function<double(double)>& f, std::optional<double> hint = std::nullopt) {
    return GridFunction::from_function(TimeGrid{0, 1, n}, f, hint);
}

GridFunction fbm_path(int n, std::uint64_t seed, std::size_t j = 0) {
    TimeGrid g{0, 1, n};
    auto b = sample_paths(ProcessModel(FBM{0.75}), g, j + 1, RngSpec{seed, 0});
    return GridFunction::from_path(g, b.row(j), 0.75);
}

// brute force: nested graded Gauss per cell, split where the integrands have kinks
double alpha_norm_brute(const GridFunction& f, double alpha) {
    quad::Mesh inner{quad::Grade::left, 30, 0.2, 10};
    quad::Mesh flat{quad::Grade::none, 4, 0.2, 10};
    quad::Mesh outer{quad::Grade::both, 20, 0.2, 10};
    const int n = f.grid.n;
    // root of the linear piece on [lo, hi] hitting level y, or -1
    auto root = [&](int d, double y) {
        double lo = f.grid.t(d), hi = f.grid.t(d + 1), a = f.values[d], b = f.values[d + 1];
        if ((a - y) * (b - y) >= 0.0) return -1.0;
        return lo + (y - a) / (b - a) * (hi - lo);
    };
    auto inner_int = [&](double s, int c) {
        double fs = f(s), in = 0.0;
        auto g = [&](double w) { return std::fabs(fs - f(s - w)) * std::pow(w, -1 - alpha); };
        for (int d = 0; d < c; ++d) {
            double lo = f.grid.t(d), hi = f.grid.t(d + 1), r = root(d, fs);
            // the adjacent cell sees w^{-alpha} at its near end once s is close to t_c
            const quad::Mesh& m = d + 1 == c ? inner : flat;
            if (r > lo) in += quad::graded(g, s - hi, s - r, m) + quad::graded(g, s - r, s - lo, flat);
            else in += quad::graded(g, s - hi, s - lo, m);
        }
        return in + quad::graded(g, 0.0, s - f.grid.t(c), inner);
    };
    double tot = 0.0;
    for (int c = 0; c < n; ++c) {
        auto h = [&](double s) { return std::fabs(f(s)) * std::pow(s, -alpha) + inner_int(s, c); };
        // kinks in s: f(s) = 0 and f(s) = f(t_d) for earlier nodes
        std::vector<double> cut{f.grid.t(c), f.grid.t(c + 1)};
        for (int d = 0; d <= c; ++d)
            if (double r = root(c, d == c ? 0.0 : f.values[d]); r > cut[0]) cut.push_back(r);
        if (double r = root(c, 0.0); r > cut[0]) cut.push_back(r);
        std::sort(cut.begin(), cut.end());
        for (std::size_t k = 0; k + 1 < cut.size(); ++k)
            if (cut[k + 1] > cut[k]) tot += quad::graded(h, cut[k], cut[k + 1], outer);
    }
    return tot;
}

}  // namespace

TEST_CASE("forward derivative closed forms") {
    auto one = fn(16, [](double) { return 1.0; });
    auto lin = fn(16, [](double u) { return u; });
    CHECK(frac_derivative_forward(one, 0, 1, 0.5, 1.0) == doctest::Approx(1 / std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(frac_derivative_forward(lin, 0, 1, 0.5, 1.0) == doctest::Approx(2 / std::sqrt(M_PI)).epsilon(1e-12));
    auto zero = fn(8, [](double) { return 0.0; });
    for (double x : {0.1, 0.5, 1.0}) CHECK(frac_derivative_forward(zero, 0, 1, 0.3, x) == 0.0);
    CHECK_THROWS_AS(frac_derivative_forward(one, 0, 1, 0.3, 0.0), DomainError);
    CHECK(frac_derivative_forward(lin, 0, 1, 0.3, 0.0) == 0.0);
}

TEST_CASE("power rule on the callable route") {
    for (double alpha : {0.2, 0.3, 0.45})
        for (double beta : {0.0, 1.0, 2.0, 0.5}) {
            auto f = [beta](double u) { return std::pow(u, beta); };
            double x = 0.7;
            double want = std::tgamma(beta + 1) / std::tgamma(beta + 1 - alpha) * std::pow(x, beta - alpha);
            CHECK(frac_derivative_forward(f, 0.0, x, alpha) == doctest::Approx(want).epsilon(1e-3));
        }
}

TEST_CASE("backward derivative closed forms") {
    auto lin = fn(32, [](double u) { return u; });
    for (double alpha : {0.2, 0.4})
        for (double x : {0.0, 0.25, 0.5, 0.9})
            CHECK(frac_derivative_backward(lin, 0, 1, alpha, x) ==
                  doctest::Approx(std::pow(1 - x, alpha) / std::tgamma(alpha + 1)).epsilon(1e-12));
    CHECK(frac_derivative_backward(lin, 0, 1, 0.4, 0.0) == doctest::Approx(1.0 / std::tgamma(1.4)).epsilon(1e-12));
    auto c = fn(8, [](double) { return 3.0; });
    CHECK(frac_derivative_backward(c, 0, 1, 0.3, 0.2) == 0.0);
    CHECK_THROWS_AS(frac_derivative_backward(lin, 0, 1, 0.3, 1.0), DomainError);
}

TEST_CASE("backward derivative of sampled paths is finite") {
    TimeGrid g{0, 1, 256};
    auto b = sample_paths(ProcessModel(FBM{0.75}), g, 100, RngSpec{21, 0});
    for (std::size_t j = 0; j < 100; ++j) {
        auto p = GridFunction::from_path(g, b.row(j), 0.75);
        for (double x : {0.0, 0.37, 0.99}) REQUIRE(std::isfinite(frac_derivative_backward(p, 0, 1, 0.3, x)));
    }
}

TEST_CASE("lambda alpha") {
    auto lin = fn(64, [](double u) { return u; }, 1.0);
    auto r = lambda_alpha(lin, 0.3);
    CHECK(r.value == doctest::Approx(1 / std::tgamma(1.3)).epsilon(1e-12));
    CHECK(r.s == 0.0);
    CHECK(r.t == 1.0);
    CHECK(lambda_alpha(fn(16, [](double) { return 0.0; }, 1.0), 0.3).value == 0.0);
    CHECK(lambda_alpha(fn(16, [](double u) { return u; }), 0.3).hint_missing);
    CHECK(lambda_alpha(fn(16, [](double u) { return u; }, 0.6), 0.3).hint_inconsistent);

    // refinement stability: drop every other node of a fine path. At alpha = 0.3 the Hoelder margin
    // H - (1 - alpha) is only 0.05 and the sup keeps creeping up (~7% per doubling), so use 0.45.
    const int n = 8192;
    TimeGrid g{0, 1, n};
    auto b = sample_paths(ProcessModel(FBM{0.75}), g, 10, RngSpec{5, 0});
    for (std::size_t j = 0; j < 10; ++j) {
        auto fine = GridFunction::from_path(g, b.row(j), 0.75);
        std::vector<double> half(n / 2 + 1);
        for (int i = 0; i <= n / 2; ++i) half[i] = fine.values[2 * i];
        GridFunction coarse = GridFunction::from_path(TimeGrid{0, 1, n / 2}, half.data(), 0.75);
        double lf = lambda_alpha(fine, 0.45).value, lc = lambda_alpha(coarse, 0.45).value;
        CHECK(std::isfinite(lf));
        CHECK(std::fabs(lf - lc) <= 0.05 * lc);
        CHECK(std::isfinite(lambda_alpha(fine, 0.3).value));
    }
}

TEST_CASE("alpha norm closed forms") {
    CHECK(alpha_norm(fn(8, [](double) { return 0.0; }), 0, 1, 0.25) == 0.0);
    CHECK(alpha_norm(fn(8, [](double) { return 1.0; }), 0, 1, 0.25) == doctest::Approx(4.0 / 3).epsilon(1e-10));
    CHECK(alpha_norm(fn(8, [](double u) { return u; }), 0, 1, 0.25) == doctest::Approx(4.0 / 3).epsilon(1e-7));
    CHECK(alpha_norm(fn(256, [](double u) { return u; }), 0, 1, 0.25) == doctest::Approx(4.0 / 3).epsilon(1e-8));
}

TEST_CASE("alpha norm against brute-force nested quadrature") {
    auto f = fn(6, [](double u) { return std::sin(5 * u) - 0.3; });
    for (double alpha : {0.2, 0.4})
        CHECK(alpha_norm(f, 0, 1, alpha) == doctest::Approx(alpha_norm_brute(f, alpha)).epsilon(1e-7));
}

TEST_CASE("alpha norm tails agree with single evaluations") {
    auto p = fbm_path(512, 9);
    std::vector<double> starts{0.0, 0.25, 0.5, 0.75, 1.0 - 1.0 / 512};
    auto tails = alpha_norm_tails(p, starts, 1.0, 0.3);
    for (std::size_t k = 0; k < starts.size(); ++k)
        CHECK(tails[k] == doctest::Approx(alpha_norm(p, starts[k], 1.0, 0.3)).epsilon(1e-10));
}

TEST_CASE("gls fundamental identity and examples") {
    auto one = fn(64, [](double) { return 1.0; });
    for (double alpha : {0.1, 0.25, 0.45}) {
        auto lin = fn(64, [](double u) { return u; });
        CHECK(gls_integral(one, lin, 0, 1, alpha) == doctest::Approx(1.0).epsilon(1e-6));
        auto q = fn(64, [](double u) { return u * u - u / 3; });
        CHECK(gls_integral(one, q, 0, 1, alpha) == doctest::Approx(2.0 / 3).epsilon(1e-6));
    }
    for (int j = 0; j < 5; ++j) {
        auto p = fbm_path(256, 17, j);
        double want = p.values.back() - p.values.front();
        auto one256 = fn(256, [](double) { return 1.0; });
        CHECK(gls_integral(one256, p, 0, 1, 0.3) == doctest::Approx(want).epsilon(1e-6));
        auto c = fn(256, [](double) { return -2.5; });
        CHECK(gls_integral(c, p, 0, 1, 0.3) == doctest::Approx(-2.5 * want).epsilon(1e-6));
    }
}

TEST_CASE("gls of interpolants equals the trapezoid stieltjes sum") {
    // both interpolants are absolutely continuous: int f dg = sum (g_{i+1} - g_i)(f_i + f_{i+1})/2
    auto f = fbm_path(128, 31, 0);
    auto g = fbm_path(128, 31, 1);
    double want = 0.0;
    for (int i = 0; i < 128; ++i) want += (g.values[i + 1] - g.values[i]) * 0.5 * (f.values[i] + f.values[i + 1]);
    CHECK(gls_integral(f, g, 0, 1, 0.3) == doctest::Approx(want).epsilon(1e-7));
    // sub-interval with nodes as endpoints
    double sub = 0.0;
    for (int i = 32; i < 96; ++i) sub += (g.values[i + 1] - g.values[i]) * 0.5 * (f.values[i] + f.values[i + 1]);
    CHECK(gls_integral(f, g, 0.25, 0.75, 0.3) == doctest::Approx(sub).epsilon(1e-7));
}

TEST_CASE("gls linearity") {
    auto g = fbm_path(128, 3);
    auto f1 = fn(128, [](double u) { return std::cos(3 * u); });
    auto f2 = fn(128, [](double u) { return u * u; });
    auto f3 = fn(128, [](double u) { return 2 * std::cos(3 * u) - 0.5 * u * u; });
    double a = gls_integral(f1, g, 0, 1, 0.3), b = gls_integral(f2, g, 0, 1, 0.3);
    CHECK(gls_integral(f3, g, 0, 1, 0.3) == doctest::Approx(2 * a - 0.5 * b).epsilon(1e-10));
}

TEST_CASE("rs oracle") {
    auto one = fn(64, [](double) { return 1.0; });
    auto g = fbm_path(256, 4);
    auto one256 = fn(256, [](double) { return 1.0; });
    CHECK(rs_oracle(one256, g, 0, 1).value == doctest::Approx(g.values.back()).epsilon(1e-13));
    auto f = fn(1024, [](double u) { return u; });
    auto q = fn(1024, [](double u) { return u * u; });
    auto r = rs_oracle(f, q, 0, 1);
    CHECK(r.value == doctest::Approx(2.0 / 3).epsilon(1e-6));
    CHECK(gls_integral(f, q, 0, 1, 0.3) == doctest::Approx(2.0 / 3).epsilon(1e-6));
    // Young chain rule on a path. The plain left sum is X(1)^2/2 - QV/2 exactly, and QV ~ n^{1-2H}
    // does not decay like a power of h that Richardson can remove, so QV sets the scale.
    auto p = fbm_path(4096, 8);
    auto rp = rs_oracle(p, p, 0, 1, 0);
    double want = 0.5 * p.values.back() * p.values.back(), qv = 0.0;
    for (int i = 0; i < 4096; ++i) qv += std::pow(p.values[i + 1] - p.values[i], 2);
    CHECK(rp.value == doctest::Approx(want - 0.5 * qv).epsilon(1e-12));
    auto rr = rs_oracle(p, p, 0, 1);
    CHECK(std::fabs(rr.value - want) <= std::max(3 * rr.error, qv));
}

TEST_CASE("oracle agreement and the bound inequality on paths") {
    for (int j = 0; j < 4; ++j) {
        auto g = fbm_path(512, 77, j);
        auto f = fn(512, [](double u) { return std::exp(-u) + u; });
        double gls = gls_integral(f, g, 0, 1, 0.3);
        auto rs = rs_oracle(f, g, 0, 1);
        CHECK(std::fabs(gls - rs.value) <= std::max(1e-4, 3 * rs.error));
        double bound = lambda_alpha(g, 0.3).value * alpha_norm(f, 0, 1, 0.3);
        CHECK(std::fabs(gls) <= bound);
        double half = gls_integral(f, g, 0, 0.5, 0.3);
        CHECK(std::fabs(half) <= lambda_alpha(g, 0.3).value * alpha_norm(f, 0, 0.5, 0.3));
    }
}

TEST_CASE("frac params") {
    CHECK_THROWS_AS((FracParams{0.6}.validate()), DomainError);
    CHECK_NOTHROW((FracParams{0.3}.validate()));
    CHECK_THROWS_AS((FracParams{0.2}.validate_for(0.75)), DomainError);
    CHECK(default_alpha(0.75) == doctest::Approx(0.375));
}

TEST_CASE("holder constant") {
    auto lin = fn(10, [](double u) { return 2 * u; });
    CHECK(holder_constant(lin, 1.0) == doctest::Approx(2.0));
}
