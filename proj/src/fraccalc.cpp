#include "qhlab/fraccalc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qhlab/errors.hpp"
#include "qhlab/kernels.hpp"
#include "qhlab/quadrature.hpp"

namespace qhlab {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

void check_same_grid(const GridFunction& f, const GridFunction& g) {
    if (f.grid.n != g.grid.n || f.grid.t0 != g.grid.t0 || f.grid.delta != g.grid.delta)
        throw DomainError("grid functions live on different grids");
}

// Slopes per unit time of cells ia .. ib-1.
std::vector<double> slopes(const GridFunction& f, int ia, int ib) {
    const double h = f.grid.step();
    std::vector<double> s(static_cast<std::size_t>(ib - ia));
    for (int j = ia; j < ib; ++j) s[j - ia] = (f.values[j + 1] - f.values[j]) / h;
    return s;
}

}  // namespace

// ---------------------------------------------------------------- GridFunction

double GridFunction::operator()(double x) const {
    const double h = grid.step();
    double r = (x - grid.t0) / h;
    if (r <= 0.0) return values.front();
    if (r >= grid.n) return values.back();
    int i = static_cast<int>(r);
    double w = r - i;
    return values[i] + w * (values[i + 1] - values[i]);
}

int GridFunction::node_index(double x) const {
    const double h = grid.step();
    long k = std::lround((x - grid.t0) / h);
    if (k < 0 || k > grid.n || std::fabs(grid.t(static_cast<int>(k)) - x) > 1e-12 * std::max(1.0, std::fabs(x)))
        throw DomainError("integration endpoint is not a grid node");
    return static_cast<int>(k);
}

void GridFunction::validate() const {
    grid.validate();
    if (values.size() != static_cast<std::size_t>(grid.n) + 1)
        throw DomainError("grid function needs n+1 values");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("grid function has a non-finite value");
    if (holder_hint && !(*holder_hint > 0.0 && *holder_hint <= 1.0))
        throw DomainError("holder hint must lie in (0, 1]");
}

GridFunction GridFunction::from_function(const TimeGrid& g, const std::function<double(double)>& f,
                                         std::optional<double> hint) {
    GridFunction r{g, std::vector<double>(static_cast<std::size_t>(g.n) + 1), hint};
    for (int i = 0; i <= g.n; ++i) r.values[i] = f(g.t(i));
    r.validate();
    return r;
}

GridFunction GridFunction::from_path(const TimeGrid& g, const double* path, std::optional<double> hint) {
    GridFunction r{g, std::vector<double>(path, path + g.n + 1), hint};
    r.validate();
    return r;
}

double holder_constant(const GridFunction& f, double exponent) {
    const double h = f.grid.step();
    const int n = f.grid.n;
    std::vector<double> pw(static_cast<std::size_t>(n) + 1);
    for (int k = 1; k <= n; ++k) pw[k] = std::pow(k * h, -exponent);
    double c = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j <= n; ++j) c = std::max(c, std::fabs(f.values[j] - f.values[i]) * pw[j - i]);
    return c;
}

void FracParams::validate() const {
    if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("alpha must lie in (0, 1/2)");
}

void FracParams::validate_for(double theta) const {
    validate();
    if (!(alpha > 1.0 - theta))
        throw DomainError("alpha must exceed 1 - theta for a theta-Hoelder integrator");
}

double default_alpha(double theta) {
    if (!(theta > 0.5 && theta <= 1.0)) throw DomainError("theta must lie in (1/2, 1]");
    return 0.5 * ((1.0 - theta) + 0.5);
}

// ---------------------------------------------------------------- derivatives

// For the linear interpolant, integrating the Hoelder difference by parts gives
// f(a)(x-a)^{-a} + int f'(u)(x-u)^{-a} du, which is exact cell by cell.
double frac_derivative_forward(const GridFunction& f, double a, double b, double alpha, double x) {
    check_alpha(alpha);
    const int ia = f.node_index(a), ib = f.node_index(b);
    if (!(x >= a && x <= b)) throw DomainError("evaluation point outside [a, b]");
    const double fa = f.values[ia];
    if (x == a) {
        if (fa != 0.0) throw DomainError("forward derivative is infinite at x = a when f(a) != 0");
        return 0.0;
    }
    const double h = f.grid.step();
    const double p = 1.0 - alpha;
    double sum = fa * std::pow(x - a, -alpha);
    for (int j = ia; j < ib; ++j) {
        double tj = f.grid.t(j);
        if (tj >= x) break;
        double hi = std::min(f.grid.t(j + 1), x);
        double s = (f.values[j + 1] - f.values[j]) / h;
        sum += s * (std::pow(x - tj, p) - std::pow(x - hi, p)) / p;
    }
    return sum / std::tgamma(1.0 - alpha);
}

double frac_derivative_forward(const std::function<double(double)>& f, double a, double x, double alpha) {
    check_alpha(alpha);
    if (!(x > a)) {
        if (x == a && f(a) == 0.0) return 0.0;
        throw DomainError("forward derivative needs x > a (or f(a) = 0 at x = a)");
    }
    const double fx = f(x);
    auto integrand = [&](double u) { return (fx - f(u)) * std::pow(x - u, -1.0 - alpha); };
    double I = quad::graded(integrand, a, x, quad::Mesh{quad::Grade::both, 40, 0.5, 8});
    return (fx * std::pow(x - a, -alpha) + alpha * I) / std::tgamma(1.0 - alpha);
}

// By parts the real-form backward derivative is (1/G(a)) int_x^b g'(u)(u-x)^{a-1} du.
double frac_derivative_backward(const GridFunction& g, double a, double b, double alpha, double x) {
    check_alpha(alpha);
    g.node_index(a);
    const int ib = g.node_index(b);
    if (!(x >= a && x < b)) throw DomainError("backward derivative needs a <= x < b");
    const double h = g.grid.step();
    int j = std::max(0, static_cast<int>(std::floor((x - g.grid.t0) / h)));
    double sum = 0.0;
    for (; j < ib; ++j) {
        double hi = g.grid.t(j + 1);
        if (hi <= x) continue;
        double lo = std::max(g.grid.t(j), x);
        double s = (g.values[j + 1] - g.values[j]) / h;
        sum += s * (std::pow(hi - x, alpha) - std::pow(lo - x, alpha));
    }
    return sum / std::tgamma(1.0 + alpha);
}

LambdaResult lambda_alpha(const GridFunction& g, double alpha) {
    check_alpha(alpha);
    LambdaResult r;
    if (!g.holder_hint) r.hint_missing = true;
    else if (!(alpha > 1.0 - *g.holder_hint && alpha < 0.5)) r.hint_inconsistent = true;
    const int n = g.grid.n;
    const double h = g.grid.step();
    std::vector<double> dw(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) dw[k] = std::pow(k + 1.0, alpha) - std::pow(double(k), alpha);
    const double scale = std::pow(h, alpha) / std::tgamma(1.0 + alpha) / h;
    double best = 0.0;
    int bs = 0, bt = 1;
    for (int s = 0; s < n; ++s) {
        double acc = 0.0;
        for (int t = s + 1; t <= n; ++t) {
            acc += (g.values[t] - g.values[t - 1]) * dw[t - s - 1];
            if (std::fabs(acc) > best) {
                best = std::fabs(acc);
                bs = s;
                bt = t;
            }
        }
    }
    r.value = best * scale;
    r.s = g.grid.t(bs);
    r.t = g.grid.t(bt);
    return r;
}

// ---------------------------------------------------------------- alpha-norm

std::vector<double> alpha_norm_tails(const GridFunction& f, const std::vector<double>& starts, double b,
                                     double alpha) {
    check_alpha(alpha);
    if (starts.empty()) return {};
    const int ib = f.node_index(b);
    std::vector<int> idx(starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) {
        idx[k] = f.node_index(starts[k]);
        if (idx[k] > ib) throw DomainError("alpha-norm start beyond b");
    }
    std::vector<std::size_t> order(starts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return idx[x] < idx[y]; });
    std::vector<int> P;
    for (std::size_t k : order)
        if (P.empty() || P.back() != idx[k]) P.push_back(idx[k]);
    const int p0 = P.front();
    const int M = ib - p0;
    std::vector<double> T(P.size(), 0.0);
    if (M == 0) return std::vector<double>(starts.size(), 0.0);

    const double h = f.grid.step();
    const double* v = f.values.data();
    std::vector<double> sl(static_cast<std::size_t>(ib));
    for (int i = p0; i < ib; ++i) sl[i] = (v[i + 1] - v[i]) / h;
    const double a1 = 1.0 - alpha, a2 = 2.0 - alpha;

    // |f(s)| (s-a)^{-alpha} over [a, b].
    const quad::GaussRule& g6 = quad::gauss_legendre(6);
    for (std::size_t pp = 0; pp < P.size(); ++pp) {
        const int p = P[pp];
        double acc = 0.0;
        for (int i = p; i < ib; ++i) {
            const double c0 = v[i], s = sl[i];
            if (i == p) {
                // Exact: int_0^h |c0 + s u| u^{-alpha} du.
                auto B = [&](double u) { return c0 * std::pow(u, a1) / a1 + s * std::pow(u, a2) / a2; };
                double root = s != 0.0 ? -c0 / s : -1.0;
                if (root > 0.0 && root < h) acc += std::fabs(B(root)) + std::fabs(B(h) - B(root));
                else acc += std::fabs(B(h));
                continue;
            }
            const double u0 = (i - p) * h;
            auto piece = [&](double lo, double hi) {
                double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo), r = 0.0;
                for (std::size_t q = 0; q < g6.x.size(); ++q) {
                    double w = c + hw * g6.x[q];
                    r += g6.w[q] * std::fabs(c0 + s * w) * std::pow(u0 + w, -alpha);
                }
                return r * hw;
            };
            double root = s != 0.0 ? -c0 / s : -1.0;
            if (root > 0.0 && root < h) acc += piece(0.0, root) + piece(root, h);
            else acc += piece(0.0, h);
        }
        T[pp] = acc;
    }

    // Double integral. Inner z-integral per cell is exact; the outer s-integral uses a
    // graded rule for adjacent cells and short Gauss rules further out.
    struct Rule {
        quad::GaussRule r;
        std::vector<double> tab;  // (k + xi_q)^{-alpha}, k = 0..kmax, row per node
        int stride = 0;
    };
    auto make = [&](quad::GaussRule r, int kmax) {
        Rule R{std::move(r), {}, std::min(kmax, M) + 1};
        R.tab.resize(R.r.x.size() * R.stride);
        for (std::size_t q = 0; q < R.r.x.size(); ++q)
            for (int k = 0; k < R.stride; ++k) R.tab[q * R.stride + k] = std::pow(k + R.r.x[q], -alpha);
        return R;
    };
    auto shift = [](const quad::GaussRule& g) {
        quad::GaussRule r = g;
        for (std::size_t q = 0; q < r.x.size(); ++q) {
            r.x[q] = 0.5 * (1.0 + g.x[q]);
            r.w[q] = 0.5 * g.w[q];
        }
        return r;
    };
    const Rule near = make(quad::unit_rule(quad::Mesh{quad::Grade::left, 14, 0.15, 10}), 1);
    const Rule mid = make(shift(quad::gauss_legendre(8)), 3);
    const Rule far = make(shift(quad::gauss_legendre(3)), M);
    const double hma = std::pow(h, -alpha);
    const double diag_scale = std::pow(h, a2) / (a1 * a2);

    // inner z-integral over cell j at s = t_i + h xi; pl, ph are the powers at the cell ends
    auto inner = [&](int i, int j, double xi, double pl, double ph) {
        const int d = i - j;
        const double sj = sl[j];
        const double c = v[i] + sl[i] * h * xi - v[j] - sj * h * (d + xi);
        // A(w) = -(c/alpha) w^{-alpha} + s_j w^{1-alpha}/(1-alpha)
        const double wl = h * (d - 1 + xi), wh = h * (d + xi);
        auto A = [&](double w, double pw) { return -(c / alpha) * pw + sj * w * pw / a1; };
        double root = sj != 0.0 ? -c / sj : -1.0;
        if (root > wl && root < wh) {
            double Ar = A(root, std::pow(root, -alpha));
            return std::fabs(Ar - A(wl, pl)) + std::fabs(A(wh, ph) - Ar);
        }
        return std::fabs(A(wh, ph) - A(wl, pl));
    };
    auto cell_pair = [&](const Rule& R, int i, int j) {
        const int d = i - j;
        // The inner integral has a kink in s where f(s) passes f(t_j) or f(t_{j+1}).
        double cuts[4] = {0.0, 0.0, 0.0, 0.0};
        int nc = 1;
        const double df = v[i + 1] - v[i];
        if (df != 0.0) {
            for (double y : {v[j], v[j + 1]}) {
                double x = (y - v[i]) / df;
                if (x > 1e-12 && x < 1.0 - 1e-12) cuts[nc++] = x;
            }
        }
        if (nc == 1) {
            double total = 0.0;
            for (std::size_t q = 0; q < R.r.x.size(); ++q) {
                const double* tab = R.tab.data() + q * R.stride;
                total += R.r.w[q] * inner(i, j, R.r.x[q], hma * tab[d - 1], hma * tab[d]);
            }
            return total * h;
        }
        cuts[nc++] = 1.0;
        std::sort(cuts, cuts + nc);
        double total = 0.0;
        for (int k = 0; k + 1 < nc; ++k) {
            const double lo = cuts[k], len = cuts[k + 1] - lo;
            if (len <= 0.0) continue;
            const quad::GaussRule& r = (d == 1 && k == 0) ? near.r : mid.r;
            for (std::size_t q = 0; q < r.x.size(); ++q) {
                const double xi = lo + len * r.x[q];
                const double pl = std::pow(h * (d - 1 + xi), -alpha), ph = std::pow(h * (d + xi), -alpha);
                total += len * r.w[q] * inner(i, j, xi, pl, ph);
            }
        }
        return total * h;
    };

    std::vector<double> T2(P.size(), 0.0);
    for (int i = p0; i < ib; ++i) {
        int pp = static_cast<int>(std::upper_bound(P.begin(), P.end(), i) - P.begin()) - 1;
        double acc = std::fabs(sl[i]) * diag_scale;
        if (pp >= 0 && P[pp] == i) T2[pp--] += acc;
        for (int j = i - 1; j >= p0 && pp >= 0; --j) {
            const int d = i - j;
            acc += cell_pair(d == 1 ? near : d <= 3 ? mid : far, i, j);
            if (P[pp] == j) T2[pp--] += acc;
        }
    }

    std::vector<double> out(starts.size());
    for (std::size_t k = 0; k < starts.size(); ++k) {
        std::size_t pp = std::lower_bound(P.begin(), P.end(), idx[k]) - P.begin();
        out[k] = T[pp] + T2[pp];
    }
    return out;
}

double alpha_norm(const GridFunction& f, double a, double b, double alpha) {
    return alpha_norm_tails(f, {a}, b, alpha).front();
}

// ---------------------------------------------------------------- GLS integral

double gls_integral(const GridFunction& f, const GridFunction& g, double a, double b, double alpha,
                    const GlsOptions& opt) {
    check_alpha(alpha);
    check_same_grid(f, g);
    const int ia = f.node_index(a), ib = f.node_index(b);
    if (ib <= ia) throw DomainError("gls_integral needs a < b");
    const int M = ib - ia;
    const double h = f.grid.step();
    std::vector<double> sf = slopes(f, ia, ib), sg = slopes(g, ia, ib);
    std::vector<double> rf(sf.rbegin(), sf.rend());
    const double fa = f.values[ia];
    const double p = 1.0 - alpha;
    const double cF = 1.0 / std::tgamma(1.0 - alpha), cB = 1.0 / std::tgamma(1.0 + alpha);
    const double hma = std::pow(h, -alpha), hp = std::pow(h, p) / p, ha = std::pow(h, alpha);

    // First cell: xi = w^{1/(1-alpha)} absorbs the (x-a)^{-alpha} weight.
    quad::GaussRule first = quad::unit_rule(quad::Mesh{quad::Grade::right, opt.levels, 0.15, opt.order});
    for (std::size_t q = 0; q < first.x.size(); ++q) {
        double w = first.x[q];
        first.w[q] *= std::pow(w, alpha / p) / p;
        first.x[q] = std::pow(w, 1.0 / p);
    }
    const quad::GaussRule rest = quad::unit_rule(quad::Mesh{quad::Grade::both, opt.levels, 0.15, opt.order});

    std::vector<double> D(static_cast<std::size_t>(M)), E(static_cast<std::size_t>(M));
    auto tables = [&](double xi) {
        double prev = std::pow(xi, p);
        D[0] = prev;
        for (int k = 1; k < M; ++k) {
            double cur = std::pow(k + xi, p);
            D[k] = cur - prev;
            prev = cur;
        }
        prev = std::pow(1.0 - xi, alpha);
        E[0] = prev;
        for (int k = 1; k < M; ++k) {
            double cur = std::pow(k + 1.0 - xi, alpha);
            E[k] = cur - prev;
            prev = cur;
        }
    };

    double total = 0.0;
    auto run = [&](const quad::GaussRule& R, int m_lo, int m_hi) {
        for (std::size_t q = 0; q < R.x.size(); ++q) {
            const double xi = R.x[q];
            tables(xi);
            double part = 0.0;
            for (int m = m_lo; m < m_hi; ++m) {
                double fwd = fa * hma * std::pow(m + xi, -alpha) +
                             hp * kernels::dot(rf.data() + (M - 1 - m), D.data(), static_cast<std::size_t>(m) + 1);
                double bwd = ha * kernels::dot(sg.data() + m, E.data(), static_cast<std::size_t>(M - m));
                part += fwd * bwd;
            }
            total += R.w[q] * part;
        }
    };
    run(first, 0, 1);
    run(rest, 1, M);
    double r = total * h * cF * cB;
    if (!std::isfinite(r)) throw NumericError("gls_integral produced a non-finite value");
    return r;
}

// ---------------------------------------------------------------- Riemann-Stieltjes oracle

RsResult rs_oracle(const GridFunction& f, const GridFunction& g, double a, double b, int n_refine) {
    check_same_grid(f, g);
    const int ia = f.node_index(a), ib = f.node_index(b);
    if (ib < ia) throw DomainError("rs_oracle needs a <= b");
    RsResult res;
    const int M = ib - ia;
    int levels = std::max(0, n_refine);
    while (levels > 0 && (M % (1 << levels) != 0 || M / (1 << levels) < 2)) --levels;
    if (levels < n_refine) res.warning = "refinement depth reduced to " + std::to_string(levels);
    std::vector<double> S(static_cast<std::size_t>(levels) + 1);
    for (int r = 0; r <= levels; ++r) {
        int st = 1 << r;
        double s = 0.0;
        for (int k = ia; k < ib; k += st) s += f.values[k] * (g.values[k + st] - g.values[k]);
        S[r] = s;
    }
    // Richardson on h, 2h, 4h, ... assuming an expansion in powers of h.
    std::vector<double> prev = S;
    double last = S[0], before = S[0];
    for (int l = 1; l <= levels; ++l) {
        std::vector<double> cur(prev.size() - 1);
        double fct = std::ldexp(1.0, l);
        for (std::size_t r = 0; r + 1 < prev.size(); ++r) cur[r] = (fct * prev[r] - prev[r + 1]) / (fct - 1.0);
        before = last;
        last = cur[0];
        prev = std::move(cur);
    }
    res.value = last;
    res.error = levels == 0 ? 0.0 : std::fabs(last - before);
    if (levels == 0) {
        res.reliable = false;
        if (res.warning.empty()) res.warning = "no refinement available";
    } else if (res.error > 1e-3 * std::max(1.0, std::fabs(res.value))) {
        res.reliable = false;
        res.warning = "oracle unreliable: refinements disagree by " + std::to_string(res.error);
    }
    return res;
}

}  // namespace qhlab
