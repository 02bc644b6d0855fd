#include "qhlab/replicate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/zeta.hpp>

#include "qhlab/errors.hpp"

namespace qhlab {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

double sgn(double x) { return x > 0.0 ? 1.0 : x < 0.0 ? -1.0 : 0.0; }

// Sub-blocks of the diverging integrand, as grid edges with their block labels.
struct SubBlocks {
    std::vector<int> edges;
    std::vector<int> k;
};

// Power schedule rescaled to [a, b]; sub-blocks shorter than 4 grid steps are merged
// into the next one, which keeps the larger label. The tail beyond the last full
// sub-block joins the final one.
SubBlocks sub_blocks(int a, int b, double gamma, double K) {
    SubBlocks s;
    s.edges.push_back(a);
    const int len = b - a;
    if (len < 8) {
        s.edges.push_back(b);
        s.k.push_back(1);
        return s;
    }
    double acc = 0.0;
    int k = 1;
    for (; k < 1000000; ++k) {
        acc += K * std::pow(double(k), -gamma);
        int e = a + static_cast<int>(std::floor(acc * len + 1e-9));
        if (e - s.edges.back() >= 4 && b - e >= 4) {
            s.edges.push_back(e);
            s.k.push_back(k);
        } else if (e > b - 4) {
            break;
        }
    }
    s.edges.push_back(b);
    s.k.push_back(k);
    return s;
}

struct Walk {
    int stop = -1;        // first index where the running integral reached the target
    double prev = 0.0;    // running integral one step before the stop
    double at_stop = 0.0;
    double total = 0.0;
    std::vector<double> contrib;
    std::vector<int> tau;
    std::vector<bool> success;
};

// Running integral of the diverging integrand along the grid. cum[i - a] and phi[i - a]
// receive the running value and the integrand (scaled units) when given. The walk stops
// at the target unless keep_going.
Walk walk(const double* x, const SubBlocks& sb, double beta, double c, double target, bool keep_going,
          double* cum, double* phi) {
    Walk w;
    const int a = sb.edges.front();
    double base = 0.0;
    bool stopped = false;
    if (cum) cum[0] = 0.0;
    for (std::size_t q = 0; q < sb.k.size(); ++q) {
        const int lo = sb.edges[q], hi = sb.edges[q + 1];
        const double kk = sb.k[q];
        const double thr = std::pow(kk, -beta), wt = std::pow(kk, beta - 1.0), nu = std::ldexp(1.0, -sb.k[q]);
        int tau = hi;
        bool hit = false;
        for (int i = lo; i <= hi; ++i) {
            if (std::fabs(c * (x[i] - x[lo])) >= thr) {
                tau = i;
                hit = true;
                break;
            }
        }
        double prev = base;
        for (int i = lo; i <= hi; ++i) {
            const double y = c * (x[std::min(i, tau)] - x[lo]);
            const Clamp cl = smooth_clamp(nu, y);
            const double val = base + wt * cl.g;
            if (phi && i < tau) phi[i - a] = c * wt * cl.d1;
            if (cum && !stopped) cum[i - a] = val;
            if (!stopped && val >= target && i > a) {
                stopped = true;
                w.stop = i;
                w.prev = prev;
                w.at_stop = val;
                if (!keep_going) {
                    w.total = val;
                    return w;
                }
            }
            prev = val;
        }
        const double contrib = wt * smooth_clamp(nu, c * (x[tau] - x[lo])).g;
        w.contrib.push_back(contrib);
        w.tau.push_back(tau);
        w.success.push_back(hit);
        base += contrib;
    }
    w.total = base;
    return w;
}

}  // namespace

const char* schedule_name(ScheduleKind k) { return k == ScheduleKind::power ? "power" : "dyadic"; }

std::vector<int> BlockSchedule::indices(const TimeGrid& g) const {
    std::vector<int> r(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        double u = (t[k] - g.t0) / g.step();
        r[k] = std::clamp(static_cast<int>(std::floor(u + 1e-9)), 0, g.n);
    }
    return r;
}

BlockSchedule make_schedule(ScheduleKind kind, int N, double gamma) {
    BlockSchedule s;
    s.kind = kind;
    s.N = N;
    if (kind == ScheduleKind::power) {
        if (!(gamma > 1.0)) throw DomainError("power schedule needs gamma > 1");
        if (N < 1) throw DomainError("power schedule needs N >= 1");
        s.gamma = gamma;
        s.K = 1.0 / boost::math::zeta(gamma);
        s.t.push_back(0.0);
        long double acc = 0.0L;
        for (int k = 1; k <= N; ++k) {
            double d = s.K * std::pow(double(k), -gamma);
            acc += d;
            s.deltas.push_back(d);
            s.t.push_back(static_cast<double>(acc));
        }
    } else {
        if (N < 2) throw DomainError("dyadic schedule needs N >= 2");
        s.t.push_back(0.0);
        for (int k = 1; k <= N; ++k) {
            s.deltas.push_back(std::ldexp(1.0, -k));
            s.t.push_back(1.0 - std::ldexp(1.0, -k));
        }
    }
    return s;
}

Clamp smooth_clamp(double nu, double x) {
    if (!(nu > 0.0)) throw DomainError("clamp width nu must be positive");
    const double r = std::hypot(x, nu);
    Clamp c;
    c.g = x * x / (r + nu);  // sqrt(x^2 + nu^2) - nu without cancellation
    c.d1 = x / r;
    c.d2 = nu * nu / (r * r * r);
    return c;
}

LemmaParams lemma_defaults(const SmallBallExponents& e, double theta, double beta_offset) {
    LemmaParams p;
    p.exponents = e;
    p.theta = theta;
    const double ml = e.mu / e.lambda;
    p.beta = ml + beta_offset;
    const double hi = std::min(1.0 / theta, p.beta / ml);
    p.gamma = 0.5 * (1.0 + hi);
    return p;
}

std::vector<std::string> lemma_violations(const LemmaParams& p) {
    std::vector<std::string> v;
    const double ml = p.exponents.mu / p.exponents.lambda;
    if (!(p.theta > 0.0 && p.theta <= ml * (1.0 + 1e-12))) v.push_back("theta <= mu/lambda");
    if (!(p.beta > ml)) v.push_back("beta > mu/lambda");
    if (!(p.gamma > 1.0)) v.push_back("gamma > 1");
    if (!(p.gamma < 1.0 / p.theta)) v.push_back("gamma < 1/theta");
    if (!(p.gamma < p.beta / ml)) v.push_back("gamma < beta*lambda/mu");
    return v;
}

DivergenceResult run_diverging_integrand(const double* path, const TimeGrid& grid, const LemmaParams& p,
                                         const BlockSchedule& sched, double level_M) {
    std::vector<std::string> bad = lemma_violations(p);
    if (!bad.empty()) {
        std::string msg = "infeasible lemma parameters, violated:";
        for (auto& b : bad) msg += " " + b + ";";
        throw DomainError(msg);
    }
    if (sched.kind != ScheduleKind::power) throw DomainError("diverging integrand needs a power schedule");
    // Schedule lives on [0, 1]; map it affinely to the grid window.
    BlockSchedule mapped = sched;
    for (double& t : mapped.t) t = grid.t0 + grid.delta * t;
    std::vector<int> idx = mapped.indices(grid);
    for (int k = 1; k <= sched.N; ++k)
        if (idx[k] - idx[k - 1] + 1 < 8)
            throw DomainError("block " + std::to_string(k) + " holds fewer than 8 grid points; refine the grid");

    SubBlocks sb;
    sb.edges = idx;
    for (int k = 1; k <= sched.N; ++k) sb.k.push_back(k);
    Walk w = walk(path, sb, p.beta, 1.0, level_M, true, nullptr, nullptr);

    DivergenceResult r;
    r.contributions = w.contrib;
    r.success = w.success;
    r.tau_index = w.tau;
    r.cumulative = w.total;
    r.hit = w.stop >= 0;
    if (r.hit) r.hit_block = static_cast<int>(std::upper_bound(idx.begin(), idx.end(), w.stop - 1) - idx.begin());
    double clipped = 0.0;
    for (int k = 1; k <= sched.N; ++k) {
        double kk = k;
        double c = r.contributions[k - 1];
        if (r.success[k - 1])
            c = std::pow(kk, p.beta - 1.0) * smooth_clamp(std::ldexp(1.0, -k), std::pow(kk, -p.beta)).g;
        clipped += c;
        if (clipped >= level_M) r.clipped_hit = true;
    }
    r.clipped_cumulative = clipped;
    return r;
}

// ---------------------------------------------------------------- parameters

double ReplicationParams::sigma(int n, double delta_n) const {
    return std::pow(double(n), eps_gap) * std::pow(delta_n, kappa - exponents.mu / exponents.lambda);
}

double ReplicationParams::nu(int n, double delta_n) const { return std::pow(delta_n, kappa) / sigma(n, delta_n); }

LemmaParams ReplicationParams::lemma() const {
    LemmaParams l;
    l.beta = beta;
    l.gamma = gamma;
    l.theta = theta;
    l.exponents = exponents;
    return l;
}

std::vector<std::string> replication_violations(const ReplicationParams& p) {
    std::vector<std::string> v;
    const double ml = p.exponents.mu / p.exponents.lambda;
    if (!(p.theta > 0.5 && p.theta <= ml * (1.0 + 1e-12))) v.push_back("1/2 < theta <= mu/lambda");
    if (!(p.alpha > 1.0 - p.theta && p.alpha < 0.5)) v.push_back("1 - theta < alpha < 1/2");
    if (!(1.0 + p.kappa - ml * (1.0 + p.alpha / p.theta) > 0.0))
        v.push_back("1 + kappa - mu(1 + alpha/theta)/lambda > 0");
    if (!(p.kappa > 0.0 && p.kappa < p.rho)) v.push_back("0 < kappa < rho");
    if (!(p.eps_gap > 0.0)) v.push_back("eps > 0");
    if (!(p.beta > ml)) v.push_back("beta > mu/lambda");
    if (!(p.gamma > 1.0 && p.gamma < std::min(1.0 / p.theta, p.beta / ml)))
        v.push_back("1 < gamma < min(1/theta, beta*lambda/mu)");
    return v;
}

bool replication_feasible(const ReplicationParams& p) { return replication_violations(p).empty(); }

ReplicationParams select_parameters(double H1, double H2, double rho) {
    if (!(rho > 0.0)) throw DomainError("rho must be positive");
    ReplicationParams p;
    p.rho0_display = rho_zero(H1, H2);  // enforces 0 < 2H1 - 1 < H2 <= H1
    SmallBall sb = derive_constants(HelixInput{1.0, 1.0, H1, H2, Sign::positive});
    p.exponents = sb.exponents;
    p.H1 = H1;
    p.rho = rho;
    p.eps_gap = 0.05;
    const double ml = p.exponents.mu / p.exponents.lambda;
    const double kappa = 0.9 * rho;
    // 1 + kappa - ml (1 + alpha/theta) > 0 with alpha > 1 - theta holds iff theta > ml / (1 + kappa).
    const double theta_hi = std::min(H2, ml);
    const double theta_lo = std::max(0.5, ml / (1.0 + kappa));
    if (!(theta_lo < theta_hi))
        throw DomainError("rho = " + num(rho) + " is infeasible: theta must exceed " + num(theta_lo) +
                          " but stay below min(H2, mu/lambda) = " + num(theta_hi) + " (rho thresholds " +
                          num(p.rho0_display) + " closed form, " + num(ml / theta_hi - 1.0) +
                          " as mu/(lambda theta) - 1 at theta = " + num(theta_hi) + ")");
    // Top of the 0.01 lattice below the cap when it fits, otherwise the middle of the window.
    const double theta = std::max(theta_hi - 0.01, 0.5 * (theta_lo + theta_hi));
    const double alpha_hi = std::min(0.5, theta * ((1.0 + kappa) / ml - 1.0));
    double alpha = 0.5 * ((1.0 - theta) + alpha_hi);
    for (int k = 1; k <= 9; ++k) {
        const double a = (1.0 - theta) + k * (theta - 0.5) / 10.0;
        if (a < alpha_hi) {
            alpha = a;
            break;
        }
    }
    p.theta = theta;
    p.alpha = alpha;
    p.kappa = kappa;
    p.rho0_theta = ml / theta - 1.0;
    p.clears_display = rho > p.rho0_display;
    p.clears_theta = rho > p.rho0_theta;
    p.beta = ml + 1.5;
    p.gamma = 0.5 * (1.0 + std::min(1.0 / theta, p.beta / ml));
    return p;
}

// ---------------------------------------------------------------- replication

const char* case_name(BlockCase c) { return c == BlockCase::caught_up ? "caught-up" : "tracking"; }
const char* trigger_name(Trigger t) { return t == Trigger::adapted ? "adapted" : "literal"; }

ReplicationTrace run_replication(const GridFunction& X, const GridFunction& Z, const ReplicationParams& p,
                                 const BlockSchedule& sched, const ReplicationOptions& o) {
    std::vector<std::string> bad = replication_violations(p);
    if (!bad.empty()) {
        std::string msg = "infeasible replication parameters, violated:";
        for (auto& b : bad) msg += " " + b + ";";
        throw DomainError(msg);
    }
    if (X.grid.n != Z.grid.n || X.grid.t0 != Z.grid.t0 || X.grid.delta != Z.grid.delta)
        throw DomainError("target Z must live on the path grid");
    if (X.grid.t0 != 0.0 || X.grid.delta != 1.0) throw DomainError("replication runs on a grid over [0, 1]");
    if (!Z.holder_hint || std::fabs(*Z.holder_hint - p.rho) > 1e-12)
        throw DomainError("target Hoelder hint must equal rho");

    const TimeGrid& g = X.grid;
    const int n = g.n;
    const double* x = X.values.data();
    const double* z = Z.values.data();
    ReplicationTrace tr;
    tr.t_index = sched.indices(g);
    const int N = sched.N;
    for (int k = 1; k <= N; ++k)
        if (tr.t_index[k] <= tr.t_index[k - 1]) throw DomainError("schedule blocks collapse on this grid");
    std::vector<double> V(static_cast<std::size_t>(n) + 1, 0.0), psi(static_cast<std::size_t>(n) + 1, 0.0);
    const double K = 1.0 / boost::math::zeta(p.gamma);

    bool A = true;
    for (int bn = 1; bn < N; ++bn) {
        const int a = tr.t_index[bn], b = tr.t_index[bn + 1];
        const double Dn = sched.t[bn + 1] - sched.t[bn];
        const double xi = z[a], xi_prev = z[tr.t_index[bn - 1]];
        const double Vn = V[a];
        BlockRecord r;
        r.n = bn;
        r.event_A = A;
        r.start_index = a;
        r.end_index = b;
        const int len = b - a + 1;
        if (A) {
            r.kase = BlockCase::caught_up;
            const double v = Vn - xi;
            const double s = -sgn(v);
            r.v_or_delta = v;
            r.target = xi - Vn;
            if (v == 0.0) {
                r.success = true;
                r.tau_index = a;
                for (int i = a; i <= b; ++i) V[i] = Vn;
            } else {
                const double c = std::pow(Dn, -p.H1);
                SubBlocks sb = sub_blocks(a, b, p.gamma, K);
                std::vector<double> cum(len, 0.0), phi(len, 0.0);
                Walk w = walk(x, sb, p.beta, c, std::fabs(v), false, cum.data(), phi.data());
                if (w.stop >= 0) {
                    r.success = true;
                    r.tau_index = w.stop;
                    r.truncation = (std::fabs(v) - w.prev) / (w.at_stop - w.prev);
                    for (int i = a; i < w.stop; ++i) {
                        V[i] = Vn + s * cum[i - a];
                        psi[i] = s * phi[i - a];
                    }
                    psi[w.stop - 1] *= r.truncation;
                    for (int i = w.stop; i <= b; ++i) V[i] = xi;
                } else {
                    r.success = false;
                    r.tau_index = b;
                    for (int i = a; i <= b; ++i) {
                        V[i] = Vn + s * cum[i - a];
                        if (i < b) psi[i] = s * phi[i - a];
                    }
                    ++tr.failed_blocks;
                }
            }
        } else {
            r.kase = BlockCase::tracking;
            const double delta = std::fabs(xi - xi_prev);
            const double s = sgn(xi - xi_prev);
            const double sigma = p.sigma(bn, Dn), nu = p.nu(bn, Dn);
            r.v_or_delta = delta;
            r.target = xi - xi_prev;
            r.sigma = sigma;
            r.nu = nu;
            int tau = b;
            bool hit = false;
            for (int i = a; i <= b; ++i) {
                if (sigma * smooth_clamp(nu, x[i] - x[a]).g >= delta) {
                    tau = i;
                    hit = true;
                    break;
                }
            }
            const double reached = sigma * smooth_clamp(nu, x[tau] - x[a]).g;
            for (int i = a; i <= b; ++i) {
                const Clamp cl = smooth_clamp(nu, x[std::min(i, tau)] - x[a]);
                V[i] = Vn + s * sigma * cl.g;
                if (i < tau) psi[i] = s * sigma * cl.d1;
            }
            r.tau_index = tau;
            r.success = hit;
            r.overshoot = hit ? reached - delta : 0.0;
        }
        r.achieved = V[b] - Vn;
        // Event for the next block.
        if (o.trigger == Trigger::adapted) {
            A = !r.success;
        } else if (r.kase == BlockCase::caught_up) {
            A = false;
        } else {
            const int pa = tr.t_index[bn - 1];
            double sup = 0.0;
            for (int i = pa; i <= a; ++i) sup = std::max(sup, std::fabs(x[i] - x[pa]));
            A = sup <= r.v_or_delta / r.sigma + r.nu;
        }
        tr.blocks.push_back(r);
    }
    const int iN = tr.t_index[N];
    for (int i = iN + 1; i <= n; ++i) V[i] = V[iN];
    tr.terminal_error = std::fabs(V[iN] - z[tr.t_index[N - 1]]);
    tr.psi = GridFunction{g, std::move(psi), std::nullopt};
    tr.V = GridFunction{g, std::move(V), std::nullopt};
    tr.target = Z;
    return tr;
}

TraceDiagnostics trace_diagnostics(const ReplicationTrace& tr, double alpha) {
    TraceDiagnostics d;
    const int N = static_cast<int>(tr.t_index.size()) - 1;
    const TimeGrid& g = tr.V.grid;
    std::vector<double> starts;
    for (int k = 1; k <= N; ++k) {
        d.error.push_back(std::fabs(tr.V.values[tr.t_index[k]] - tr.target.values[tr.t_index[k - 1]]));
        starts.push_back(g.t(tr.t_index[k]));
    }
    d.alpha_tail = alpha_norm_tails(tr.psi, starts, g.t(g.n), alpha);
    for (int k = 1; k <= N; ++k) {
        int c = 0;
        for (const BlockRecord& b : tr.blocks)
            if (b.n > k && b.kase == BlockCase::caught_up) ++c;
        d.case1_after.push_back(c);
    }
    for (const BlockRecord& b : tr.blocks)
        if (b.kase == BlockCase::caught_up) d.last_case1 = std::max(d.last_case1, b.n);
    for (int k = std::max(1, d.last_case1 + 1); k < N; ++k) {
        double cur = d.alpha_tail[k - 1], nxt = d.alpha_tail[k];
        if (!(nxt < cur || (cur == 0.0 && nxt == 0.0))) d.tail_decreasing = false;
    }
    return d;
}

}  // namespace qhlab
