#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qhlab/errors.hpp"

namespace qhlab::quad {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule of the given order (1..128), computed once and cached.
const GaussRule& gauss_legendre(int order);

template <class F>
double gauss(F&& f, double a, double b, int order) {
    const GaussRule& r = gauss_legendre(order);
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

enum class Grade { none, left, right, both };

struct Mesh {
    Grade grade = Grade::both;
    int levels = 12;
    double ratio = 0.15;
    int order = 8;
};

namespace detail {
template <class F>
double graded_one_side(F& f, double a, double b, bool toward_a, const Mesh& m) {
    // Geometric cells [a + h r^{k+1}, a + h r^k] plus the innermost cell touching the endpoint.
    double h = b - a, s = 0.0, outer = 1.0;
    for (int k = 0; k < m.levels; ++k) {
        double inner = outer * m.ratio;
        double lo = toward_a ? a + h * inner : b - h * outer;
        double hi = toward_a ? a + h * outer : b - h * inner;
        s += gauss(f, lo, hi, m.order);
        outer = inner;
    }
    double lo = toward_a ? a : b - h * outer;
    double hi = toward_a ? a + h * outer : b;
    s += gauss(f, lo, hi, m.order);
    return s;
}
}  // namespace detail

// Composite Gauss on a mesh graded geometrically toward the chosen endpoint(s).
template <class F>
double graded(F&& f, double a, double b, const Mesh& m) {
    if (!(b > a)) return 0.0;
    switch (m.grade) {
        case Grade::none: {
            int cells = std::max(1, m.levels);
            double h = (b - a) / cells, s = 0.0;
            for (int i = 0; i < cells; ++i) s += gauss(f, a + i * h, a + (i + 1) * h, m.order);
            return s;
        }
        case Grade::left:
            return detail::graded_one_side(f, a, b, true, m);
        case Grade::right:
            return detail::graded_one_side(f, a, b, false, m);
        case Grade::both: {
            double c = 0.5 * (a + b);
            return detail::graded_one_side(f, a, c, true, m) + detail::graded_one_side(f, c, b, false, m);
        }
    }
    return 0.0;
}

// Nodes and weights of graded(.., 0, 1, m) as an explicit rule on [0, 1].
GaussRule unit_rule(const Mesh& m);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

struct AdaptiveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-15;
    int max_refinements = 6;
    int start_levels = 8;
    int start_order = 6;
};

// Refines the graded mesh (more levels and a higher order) until successive
// estimates agree; throws QuadratureError carrying the last estimate otherwise.
template <class F>
QuadResult adaptive(F&& f, double a, double b, Grade grade, const AdaptiveOptions& o = {}) {
    Mesh m{grade, o.start_levels, 0.15, o.start_order};
    double prev = graded(f, a, b, m);
    double diff = 0.0;
    for (int r = 0; r < o.max_refinements; ++r) {
        m.levels += 6;
        m.order += 4;
        double cur = graded(f, a, b, m);
        diff = std::fabs(cur - prev);
        if (!std::isfinite(cur)) throw QuadratureError("non-finite quadrature estimate", cur, diff);
        if (diff <= std::max(o.rel_tol * std::fabs(cur), o.abs_tol)) return {cur, diff};
        prev = cur;
    }
    throw QuadratureError("quadrature did not converge after mesh refinement", prev, diff);
}

}  // namespace qhlab::quad
