#include "qhlab/smallball.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qhlab/errors.hpp"
#include "qhlab/kernels.hpp"
#include "qhlab/parallel.hpp"

namespace qhlab {

void HelixInput::validate() const {
    if (!(C1 > 0.0 && C2 > 0.0)) throw DomainError("helix constants C1, C2 must be positive");
    if (!(H1 > 0.0 && H1 <= 1.0 && H2 > 0.0 && H2 <= 1.0)) throw DomainError("helix exponents must lie in (0, 1]");
    if (!(H1 >= H2)) throw DomainError("helix needs H1 >= H2");
    if (sign == Sign::positive && !(H1 >= 0.5))
        throw DomainError("positively correlated increments force H1 >= 1/2");
    if (sign == Sign::negative && !(H2 <= 0.5))
        throw DomainError("negatively correlated increments force H2 <= 1/2");
}

double SmallBallConstants::a_of_eps(double eps) const {
    return std::pow(C0, 1.0 / (2.0 * input.H1)) * std::pow(eps, 1.0 / input.H1);
}

// Chaining on a grid of mesh a = C0^{1/(2H1)} eps^{1/H1}:
//   positive case  P <= exp{-eps^4 / (16 C2^2 a^{2H2+2})},
//   negative case  P <= exp{-eps^4 / (32 C2^2 a^{4H2+1})}.
// Substituting a gives C4 = (16 C2^2 C0^{(H2+1)/H1})^{-1}, exponent 4 - (2H2+2)/H1, and
// C5 = (32 C2^2 C0^{(4H2+1)/(2H1)})^{-1}, exponent 4 - (4H2+1)/H1. a <= 1/4 iff eps <= 4^{-H1} C0^{-1/2}.
SmallBall derive_constants(const HelixInput& in) {
    in.validate();
    SmallBall r;
    SmallBallConstants& c = r.constants;
    SmallBallExponents& e = r.exponents;
    c.input = in;
    c.C0 = 64.0 / in.C1;
    c.C3 = std::pow(4.0, -in.H1) / std::sqrt(c.C0);
    c.C4 = 1.0 / (16.0 * in.C2 * in.C2 * std::pow(c.C0, (in.H2 + 1.0) / in.H1));
    c.C5 = 1.0 / (32.0 * in.C2 * in.C2 * std::pow(c.C0, (4.0 * in.H2 + 1.0) / (2.0 * in.H1)));
    if (in.sign == Sign::positive) {
        e.lambda = (2.0 * in.H2 + 2.0) / in.H1 - 4.0;
        e.mu = 2.0 - 2.0 * in.H2;
        e.K2 = c.C4;
        // compare without the division so the boundary H2 = 2H1 - 1 is decided exactly
        if (!(in.H2 > 2.0 * in.H1 - 1.0))
            throw DomainError("small-ball bound is vacuous: eps-exponent 4 - (2H2+2)/H1 is not negative "
                              "(needs H2 > 2H1 - 1)");
    } else {
        e.lambda = (4.0 * in.H2 + 1.0) / in.H1 - 4.0;
        e.mu = 1.0;
        e.K2 = c.C5;
        if (!(in.H2 > in.H1 - 0.25))
            throw DomainError("small-ball bound is vacuous: eps-exponent 4 - (4H2+1)/H1 is not negative "
                              "(needs H2 > H1 - 1/4)");
    }
    e.K1 = std::exp(e.K2 * std::pow(c.C3, -e.lambda));
    return r;
}

double theoretical_bound(const SmallBallConstants& c, const SmallBallExponents& e, double eps, double delta) {
    if (!(eps >= 0.0)) throw DomainError("eps must be non-negative");
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
    if (eps == 0.0) return 0.0;
    if (eps > c.C3 * std::pow(delta, c.input.H1)) return 1.0;
    return std::min(1.0, std::exp(-e.K2 * std::pow(eps, -e.lambda) * std::pow(delta, e.mu)));
}

double theoretical_bound_rescaled(const HelixInput& in, double eps, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
    HelixInput scaled = in;
    scaled.C2 = in.C2 * std::pow(delta, 2.0 * (in.H2 - in.H1));
    SmallBall sb = derive_constants(scaled);
    return theoretical_bound(sb.constants, sb.exponents, eps * std::pow(delta, -in.H1), 1.0);
}

double anchored_bound(const SmallBallConstants& c, const SmallBallExponents& e, double eps, double delta) {
    return theoretical_bound(c, e, 2.0 * eps, delta);
}

SmallBallExponents anchored_exponents(const SmallBallExponents& e) {
    SmallBallExponents a = e;
    a.K2 = e.K2 * std::pow(2.0, -e.lambda);
    return a;
}

bool theta_admissible(const SmallBallExponents& e, double theta) {
    return theta > 0.0 && theta <= e.mu / e.lambda * (1.0 + 1e-12);
}

const char* estimator_name(Estimator e) { return e == Estimator::grid ? "grid" : "bridge"; }

// Image series for the strip (lo, hi) of width w, d = y - x:
//   sum_k exp(-2kw(kw - d)/T) - exp((d^2 - (x + y - 2hi - 2kw)^2)/(2T)).
double bridge_stay_probability(double x, double y, double T, double lo, double hi) {
    if (!(x > lo && x < hi && y > lo && y < hi)) return 0.0;
    const double w = hi - lo, d = y - x;
    double sum = 1.0 - std::exp((d * d - std::pow(x + y - 2.0 * hi, 2)) / (2.0 * T));
    for (int k = 1; k < 1000; ++k) {
        bool any = false;
        for (int sgn : {1, -1}) {
            double kk = sgn * k;
            double e1 = -2.0 * kk * w * (kk * w - d) / T;
            double ek = x + y - 2.0 * hi - 2.0 * kk * w;
            double e2 = (d * d - ek * ek) / (2.0 * T);
            if (e1 > -40.0) {
                sum += std::exp(e1);
                any = true;
            }
            if (e2 > -40.0) {
                sum -= std::exp(e2);
                any = true;
            }
        }
        if (!any) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

std::vector<McEstimate> mc_estimate(const ProcessModel& m, const std::vector<double>& eps, double t0,
                                    double delta, StatKind kind, const McSettings& s) {
    if (s.n_grid < 128) throw DomainError("mc_estimate needs n_grid >= 128");
    if (s.m_paths < 1000) throw DomainError("mc_estimate needs m_paths >= 1000");
    for (double e : eps)
        if (!(e >= 0.0)) throw DomainError("eps must be non-negative");
    const bool bridge = s.estimator == Estimator::bridge;
    if (bridge && (!std::holds_alternative<Wiener>(m.variant()) || kind != StatKind::anchored))
        throw DomainError("bridge estimator is available for the anchored statistic of Wiener paths only");

    TimeGrid g{t0, delta, s.n_grid};
    PathSampler sampler(m, g, s.sampler, s.threads);
    const std::size_t M = s.m_paths, E = eps.size();
    const std::size_t w = static_cast<std::size_t>(s.n_grid) + 1;
    const double h = g.step();
    // Per-path values, reduced in path order afterwards so results do not depend on threads.
    std::vector<double> vals(M * E, 0.0);
    for_each_path(sampler, M, s.rng, s.threads, [&](std::size_t j, const double* path, unsigned) {
        double* out = vals.data() + j * E;
        if (!bridge) {
            double st = path_statistic(path, w, 0, w - 1, kind);
            for (std::size_t k = 0; k < E; ++k) out[k] = st <= eps[k] ? 1.0 : 0.0;
            return;
        }
        double st = path_statistic(path, w, 0, w - 1, StatKind::anchored);
        for (std::size_t k = 0; k < E; ++k) {
            const double e = eps[k];
            if (!(st < e)) continue;
            double p = 1.0;
            for (std::size_t i = 0; i + 1 < w && p > 0.0; ++i)
                p *= bridge_stay_probability(path[i], path[i + 1], h, -e, e);
            out[k] = p;
        }
    });
    std::vector<McEstimate> res(E);
    for (std::size_t k = 0; k < E; ++k) {
        double sum = 0.0, sq = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            double v = vals[j * E + k];
            sum += v;
            sq += v * v;
        }
        double mean = sum / M;
        double var = bridge ? std::max(0.0, (sq - M * mean * mean) / (M - 1.0)) : mean * (1.0 - mean);
        double se = std::sqrt(var / M);
        res[k] = McEstimate{eps[k], mean, 1.959963984540054 * se, se};
    }
    return res;
}

SmallBallReport verify_bound(const ProcessModel& m, const HelixInput& helix, const std::vector<double>& eps_list,
                             const std::vector<double>& delta_list, const VerifyOptions& o) {
    SmallBallReport rep;
    rep.derived = derive_constants(helix);
    rep.n_grid = o.mc.n_grid;
    if (o.certify_grid > 0) {
        QuasiHelixCertificate c = verify_a1_a2(m, o.certify_grid, helix.H1, helix.H2, o.mc.threads);
        if (!c.pass) throw DomainError("model does not satisfy the declared envelope exponents");
        if (helix.C1 > c.C1_fit * (1.0 + 1e-9) || helix.C2 < c.C2_fit * (1.0 - 1e-9))
            throw DomainError("declared C1/C2 are not certified on the verification grid");
        QuasiHelixCertificate sg = verify_sign_condition(m, o.certify_grid, helix.sign, 0.0, 1e-10, o.mc.threads);
        if (!sg.pass) throw DomainError("model does not satisfy the declared increment sign condition");
    }
    const SmallBallConstants& c = rep.derived.constants;
    const SmallBallExponents& e = rep.derived.exponents;
    for (double delta : delta_list) {
        if (!(delta > 0.0 && delta <= 1.0 && o.t0 + delta <= 1.0 + 1e-12))
            throw DomainError("window [t0, t0 + delta] must lie in [0, 1]");
        for (StatKind kind : {StatKind::range, StatKind::anchored}) {
            McSettings s = o.mc;
            if (kind == StatKind::range) s.estimator = Estimator::grid;
            std::vector<McEstimate> est = mc_estimate(m, eps_list, o.t0, delta, kind, s);
            for (const McEstimate& me : est) {
                SmallBallRow r;
                r.eps = me.eps;
                r.delta = delta;
                r.kind = kind;
                r.mc_estimate = me.estimate;
                r.mc_halfwidth = me.halfwidth;
                r.bound = kind == StatKind::range ? theoretical_bound(c, e, me.eps, delta)
                                                  : anchored_bound(c, e, me.eps, delta);
                r.pass = r.mc_estimate - r.mc_halfwidth <= r.bound;
                rep.rows.push_back(r);
            }
        }
    }
    return rep;
}

double fit_decay_slope(const std::vector<double>& eps, const std::vector<double>& p) {
    if (eps.size() != p.size()) throw DomainError("fit_decay_slope: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(p[i] > 0.0 && p[i] < 1.0) || !(eps[i] > 0.0)) continue;
        double x = std::log(1.0 / eps[i]), y = std::log(-std::log(p[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    if (k < 2) throw DomainError("fit_decay_slope needs at least two usable points");
    double den = k * sxx - sx * sx;
    if (den == 0.0) throw DomainError("fit_decay_slope: degenerate eps values");
    return (k * sxy - sx * sy) / den;
}

}  // namespace qhlab
