#include "qhlab/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace qhlab::quad {

namespace {

GaussRule build_rule(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = z;
                p0 = 1.0;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    static const std::array<GaussRule, 129> rules = [] {
        std::array<GaussRule, 129> a;
        for (int n = 1; n <= 128; ++n) a[n] = build_rule(n);
        return a;
    }();
    if (order < 1 || order > 128) throw DomainError("Gauss-Legendre order must be in 1..128");
    return rules[order];
}

GaussRule unit_rule(const Mesh& m) {
    GaussRule r;
    auto add = [&](double lo, double hi) {
        const GaussRule& g = gauss_legendre(m.order);
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            r.x.push_back(c + h * g.x[i]);
            r.w.push_back(h * g.w[i]);
        }
    };
    auto one_side = [&](double a, double b, bool toward_a) {
        double h = b - a, outer = 1.0;
        for (int k = 0; k < m.levels; ++k) {
            double inner = outer * m.ratio;
            if (toward_a) add(a + h * inner, a + h * outer);
            else add(b - h * outer, b - h * inner);
            outer = inner;
        }
        if (toward_a) add(a, a + h * outer);
        else add(b - h * outer, b);
    };
    switch (m.grade) {
        case Grade::none: {
            int cells = std::max(1, m.levels);
            for (int i = 0; i < cells; ++i) add(double(i) / cells, double(i + 1) / cells);
            break;
        }
        case Grade::left: one_side(0.0, 1.0, true); break;
        case Grade::right: one_side(0.0, 1.0, false); break;
        case Grade::both:
            one_side(0.0, 0.5, true);
            one_side(0.5, 1.0, false);
            break;
    }
    return r;
}

}  // namespace qhlab::quad
