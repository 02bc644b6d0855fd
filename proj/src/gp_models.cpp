#include "qhlab/gp_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "qhlab/errors.hpp"
#include "qhlab/parallel.hpp"
#include "qhlab/quadrature.hpp"

namespace qhlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

}  // namespace

// ---------------------------------------------------------------- Kernel

double Kernel::molchan_constant(double H) {
    require(H > 0.5 && H < 1.0, "fbm-type kernel needs H in (1/2, 1)");
    return std::sqrt(H * (2.0 * H - 1.0) / boost::math::beta(2.0 - 2.0 * H, H - 0.5));
}

double Kernel::fbm_inner_integral(double H, double t, double s) {
    if (!(t > s)) return 0.0;
    // u = s + v^{1/p}, p = H - 1/2, turns u^p (u-s)^{p-1} du into (1/p)(s + v^{1/p})^p dv.
    const double p = H - 0.5;
    const double ip = 1.0 / p;
    const double V = std::pow(t - s, p);
    auto f = [&](double v) { return std::pow(s + std::pow(v, ip), p); };
    return quad::graded(f, 0.0, V, quad::Mesh{quad::Grade::left, 14, 0.15, 12}) * ip;
}

Kernel Kernel::exponential(double a) {
    require(std::isfinite(a), "exponential kernel rate must be finite");
    Kernel k;
    k.form_ = KernelForm::exponential;
    k.a_ = a;
    k.name_ = "exp(a=" + fmt(a) + ")";
    KernelConstants& c = k.declared_;
    c.claims_b1 = a >= 0.0;
    c.k = std::min(1.0, std::exp(a));
    c.K_up = std::max(1.0, std::exp(a));
    c.C5 = std::fabs(a) * std::max(1.0, std::exp(a));
    c.H3 = 1.0;
    return k;
}

Kernel Kernel::fbm_type(double H, std::function<double(double)> phi, double phi_lower, double phi_upper,
                        std::optional<double> C_H) {
    require(H > 0.5 && H < 1.0, "fbm-type kernel needs H in (1/2, 1)");
    require(phi_lower > 0.0 && phi_upper >= phi_lower, "fbm-type kernel needs 0 < k <= K for phi");
    Kernel k;
    k.form_ = KernelForm::fbm_type;
    k.H_ = H;
    k.C_H_ = C_H ? *C_H : molchan_constant(H);
    require(k.C_H_ > 0.0, "fbm-type kernel needs C_H > 0");
    if (phi) k.phi_ = std::make_shared<const std::function<double(double)>>(std::move(phi));
    k.singular_at_zero_ = true;
    k.name_ = "fbm_type(H=" + fmt(H) + ")";
    const double r = H - 0.5;
    KernelConstants& c = k.declared_;
    c.claims_b1 = true;
    c.r = r;
    c.D2 = k.C_H_ * phi_upper / r;
    c.D3 = k.C_H_ * phi_upper / r;
    c.H2 = r;
    c.D1 = k.C_H_ * phi_lower / (2.0 * r);
    c.H1 = 2.0 * H - 0.5;
    c.b3_lower_form = true;
    return k;
}

Kernel Kernel::tabulated(std::vector<double> values, int n, KernelConstants declared) {
    require(n >= 1, "tabulated kernel needs n >= 1");
    require(values.size() == static_cast<std::size_t>(n + 1) * (n + 1),
            "tabulated kernel needs (n+1)^2 values");
    Kernel k;
    k.form_ = KernelForm::tabulated;
    k.table_ = std::make_shared<const std::vector<double>>(std::move(values));
    k.table_n_ = n;
    k.declared_ = declared;
    k.name_ = "tabulated(n=" + std::to_string(n) + ")";
    return k;
}

Kernel Kernel::closed_form(std::function<double(double, double)> f, std::string name,
                           KernelConstants declared) {
    Kernel k;
    k.form_ = KernelForm::closed_form;
    k.fn_ = std::make_shared<const std::function<double(double, double)>>(std::move(f));
    k.declared_ = declared;
    k.name_ = std::move(name);
    k.singular_at_zero_ = declared.r && *declared.r > 0.0;
    return k;
}

double Kernel::operator()(double t, double s) const {
    if (s > t) return 0.0;
    switch (form_) {
        case KernelForm::exponential:
            return std::exp(a_ * (t - s));
        case KernelForm::fbm_type: {
            if (s <= 0.0) return t > 0.0 ? kInf : 0.0;
            double ph = phi_ ? (*phi_)(s) : 1.0;
            return C_H_ * std::pow(s, 0.5 - H_) * ph * fbm_inner_integral(H_, t, s);
        }
        case KernelForm::tabulated: {
            const int n = table_n_;
            const auto& v = *table_;
            double x = std::clamp(t, 0.0, 1.0) * n, y = std::clamp(s, 0.0, 1.0) * n;
            int i = std::min(static_cast<int>(x), n - 1), j = std::min(static_cast<int>(y), n - 1);
            double fx = x - i, fy = y - j;
            auto at = [&](int a, int b) { return v[static_cast<std::size_t>(a) * (n + 1) + b]; };
            return (1 - fx) * ((1 - fy) * at(i, j) + fy * at(i, j + 1)) +
                   fx * ((1 - fy) * at(i + 1, j) + fy * at(i + 1, j + 1));
        }
        case KernelForm::closed_form:
            return (*fn_)(t, s);
    }
    return 0.0;
}

// ---------------------------------------------------------------- models

namespace {

struct Validator {
    void operator()(const Wiener&) const {}
    void operator()(const FBM& m) const { require(m.H > 0.0 && m.H < 1.0, "fbm: H must lie in (0,1)"); }
    void operator()(const SubFBM& m) const {
        require(m.H > 0.0 && m.H < 1.0, "subfbm: H must lie in (0,1)");
    }
    void operator()(const BiFBM& m) const {
        require(m.H > 0.0 && m.H < 1.0, "bifbm: H must lie in (0,1)");
        require(m.K > 0.0 && m.K <= 1.0, "bifbm: K must lie in (0,1]");
    }
    void operator()(const VolterraWiener&) const {}
    void operator()(const VolterraFBM& m) const {
        require(m.H > 0.5 && m.H < 1.0, "volterra_fbm: H must lie in (1/2,1)");
    }
    void operator()(const FracOU& m) const {
        require(m.H > 0.5 && m.H < 1.0, "fracou: H must lie in (1/2,1)");
        require(std::isfinite(m.a), "fracou: a must be finite");
    }
};

struct Namer {
    std::string operator()(const Wiener&) const { return "wiener"; }
    std::string operator()(const FBM& m) const { return "fbm(H=" + fmt(m.H) + ")"; }
    std::string operator()(const SubFBM& m) const { return "subfbm(H=" + fmt(m.H) + ")"; }
    std::string operator()(const BiFBM& m) const {
        return "bifbm(H=" + fmt(m.H) + ",K=" + fmt(m.K) + ")";
    }
    std::string operator()(const VolterraWiener& m) const {
        return "volterra_wiener(" + m.kernel.name() + ")";
    }
    std::string operator()(const VolterraFBM& m) const {
        return "volterra_fbm(" + m.kernel.name() + ",H=" + fmt(m.H) + ")";
    }
    std::string operator()(const FracOU& m) const {
        return "fracou(a=" + fmt(m.a) + ",H=" + fmt(m.H) + ")";
    }
};

double fbm_cov(double H, double s, double t) {
    double h2 = 2.0 * H;
    return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::fabs(t - s), h2));
}

quad::AdaptiveOptions cov_options() {
    quad::AdaptiveOptions o;
    o.rel_tol = 1e-9;
    o.abs_tol = 1e-14;
    o.max_refinements = 7;
    return o;
}

// int_0^b f(z) dz for integrands carrying K's s^{-r} factors at z = 0.
// With r declared, z = w^{1/(1-2r)} removes a z^{-2r} singularity.
template <class F>
double integrate_from_zero(const Kernel& k, F&& f, double b) {
    if (!(b > 0.0)) return 0.0;
    const auto& r = k.declared().r;
    if (k.singular_at_zero() && r && *r > 0.0 && *r < 0.5) {
        const double e = 1.0 / (1.0 - 2.0 * *r);
        auto g = [&](double w) { return f(std::pow(w, e)) * e * std::pow(w, e - 1.0); };
        return quad::adaptive(g, 0.0, std::pow(b, 1.0 / e), quad::Grade::both, cov_options()).value;
    }
    return quad::adaptive(f, 0.0, b, quad::Grade::both, cov_options()).value;
}

double vw_cov(const Kernel& k, double s, double t) {
    double lo = std::min(s, t), hi = std::max(s, t);
    if (!(lo > 0.0)) return 0.0;
    return integrate_from_zero(k, [&](double z) { return k(hi, z) * k(lo, z); }, lo);
}

// H(2H-1) int_0^{t1} int_0^{t2} K(t1,s) K(t2,v) |s-v|^{2H-2} dv ds with v = s -+ w^{1/(2H-1)}
// in the inner integral, which turns |s-v|^{2H-2} dv into dw/(2H-1).
template <class K>
double vfbm_cov(const K& kern, double H, double s_, double t_) {
    double t1 = std::max(s_, t_), t2 = std::min(s_, t_);
    if (!(t2 > 0.0)) return 0.0;
    const double e = 2.0 * H - 1.0;
    const double q = 1.0 / e;
    const quad::Mesh inner{quad::Grade::left, 8, 0.15, 10};
    auto J = [&](double s) {
        double left = 0.0, right = 0.0;
        double m = std::min(s, t2);
        double w0 = s > t2 ? std::pow(s - t2, e) : 0.0;
        double w1 = std::pow(s, e);
        if (m > 0.0 && w1 > w0)
            left = quad::graded([&](double w) { return kern(t2, std::max(0.0, s - std::pow(w, q))); }, w0,
                                w1, inner);
        if (s < t2)
            right = quad::graded([&](double w) { return kern(t2, std::min(t2, s + std::pow(w, q))); }, 0.0,
                                 std::pow(t2 - s, e), inner);
        return left + right;
    };
    auto outer = [&](double s) { return kern(t1, s) * J(s); };
    double v = quad::adaptive(outer, 0.0, t2, quad::Grade::both, cov_options()).value;
    if (t1 > t2) v += quad::adaptive(outer, t2, t1, quad::Grade::both, cov_options()).value;
    return H * v;
}

struct CovVisitor {
    double s, t;
    double operator()(const Wiener&) const { return std::min(s, t); }
    double operator()(const FBM& m) const { return fbm_cov(m.H, s, t); }
    double operator()(const SubFBM& m) const {
        double h2 = 2.0 * m.H;
        return std::pow(s, h2) + std::pow(t, h2) -
               0.5 * (std::pow(s + t, h2) + std::pow(std::fabs(t - s), h2));
    }
    double operator()(const BiFBM& m) const {
        double h2 = 2.0 * m.H;
        return std::pow(2.0, -m.K) * (std::pow(std::pow(t, h2) + std::pow(s, h2), m.K) -
                                      std::pow(std::fabs(t - s), h2 * m.K));
    }
    double operator()(const VolterraWiener& m) const { return vw_cov(m.kernel, s, t); }
    double operator()(const VolterraFBM& m) const { return vfbm_cov(m.kernel, m.H, s, t); }
    double operator()(const FracOU& m) const {
        const double a = m.a;
        auto k = [a](double tt, double ss) { return ss > tt ? 0.0 : std::exp(a * (tt - ss)); };
        return vfbm_cov(k, m.H, s, t);
    }
};

void check_time(double x, const char* what) {
    require(x >= 0.0 && x <= 1.0, std::string(what) + " must lie in [0,1]");
}

}  // namespace

ProcessModel::ProcessModel(ModelVariant v) : v_(std::move(v)) { std::visit(Validator{}, v_); }

std::string ProcessModel::id() const { return std::visit(Namer{}, v_); }

bool ProcessModel::stationary_increments() const {
    return std::holds_alternative<Wiener>(v_) || std::holds_alternative<FBM>(v_);
}

bool ProcessModel::uses_quadrature() const {
    return std::holds_alternative<VolterraWiener>(v_) || std::holds_alternative<VolterraFBM>(v_) ||
           std::holds_alternative<FracOU>(v_);
}

double covariance(const ProcessModel& m, double s, double t) {
    check_time(s, "s");
    check_time(t, "t");
    return std::visit(CovVisitor{s, t}, m.variant());
}

double volterra_wiener_incremental_variance(const Kernel& k, double s, double t) {
    require(s <= t, "incremental variance needs s <= t");
    if (!(t > s)) return 0.0;
    double a = 0.0;
    if (s > 0.0)
        a = integrate_from_zero(k, [&](double z) {
            double d = k(t, z) - k(s, z);
            return d * d;
        }, s);
    double b = quad::adaptive([&](double z) {
        double v = k(t, z);
        return v * v;
    }, s, t, quad::Grade::both, cov_options()).value;
    return a + b;
}

double volterra_wiener_incremental_covariance(const Kernel& k, double s1, double t1, double s2, double t2) {
    require(s1 <= t1 && t1 <= s2 && s2 <= t2, "incremental covariance needs s1 <= t1 <= s2 <= t2");
    double a = 0.0, b = 0.0;
    if (s1 > 0.0)
        a = integrate_from_zero(k, [&](double z) { return (k(t1, z) - k(s1, z)) * (k(t2, z) - k(s2, z)); },
                                s1);
    if (t1 > s1)
        b = quad::adaptive([&](double z) { return k(t1, z) * (k(t2, z) - k(s2, z)); }, s1, t1,
                           quad::Grade::both, cov_options()).value;
    return a + b;
}

double incremental_variance(const ProcessModel& m, double s, double t) {
    check_time(s, "s");
    check_time(t, "t");
    require(s <= t, "incremental variance needs s <= t");
    double v;
    double rtt = covariance(m, t, t), rss = covariance(m, s, s);
    if (const auto* vw = std::get_if<VolterraWiener>(&m.variant()))
        v = volterra_wiener_incremental_variance(vw->kernel, s, t);
    else
        v = rtt - 2.0 * covariance(m, s, t) + rss;
    double tol = 1e-10 * std::max({rtt, rss, 1e-300});
    if (v < -tol)
        throw ModelInconsistencyError("negative incremental variance " + fmt(v) + " on [" + fmt(s) + "," +
                                      fmt(t) + "] for " + m.id());
    return v;
}

double incremental_covariance(const ProcessModel& m, double s1, double t1, double s2, double t2) {
    for (double x : {s1, t1, s2, t2}) check_time(x, "time");
    require(s1 <= t1 && s2 <= t2, "incremental covariance needs s1 <= t1 and s2 <= t2");
    return covariance(m, t1, t2) - covariance(m, t1, s2) - covariance(m, s1, t2) + covariance(m, s1, s2);
}

const char* sign_name(Sign s) { return s == Sign::positive ? "positive" : "negative"; }

// ---------------------------------------------------------------- checkers

std::vector<double> grid_covariance(const ProcessModel& m, int n, double t0, unsigned threads) {
    require(n >= 1, "grid needs n >= 1");
    require(t0 >= 0.0 && t0 < 1.0, "grid start must lie in [0,1)");
    const std::size_t N = static_cast<std::size_t>(n) + 1;
    std::vector<double> M(N * N);
    auto t = [&](std::size_t i) { return i == static_cast<std::size_t>(n) ? 1.0 : t0 + i * (1.0 - t0) / n; };
    parallel_for(N, threads, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = i; j < N; ++j) M[i * N + j] = covariance(m, t(i), t(j));
    });
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < i; ++j) M[i * N + j] = M[j * N + i];
    return M;
}

QuasiHelixCertificate verify_a1_a2(const ProcessModel& m, int grid_size, double H1, double H2,
                                   unsigned threads) {
    require(grid_size >= 8, "verify_a1_a2 needs grid_size >= 8");
    require(H2 > 0.0 && H2 <= H1 && H1 <= 1.0, "verify_a1_a2 needs 0 < H2 <= H1 <= 1");
    const int n = grid_size;
    const std::size_t N = n + 1;
    std::vector<double> M = grid_covariance(m, n, 0.0, threads);
    QuasiHelixCertificate c;
    c.H1 = H1;
    c.H2 = H2;
    c.grid_size = n;
    double c1 = kInf, c2 = 0.0, maxv = 0.0;
    for (std::size_t i = 0; i < N; ++i) maxv = std::max(maxv, M[i * N + i]);
    c.max_variance = maxv;
    bool any_positive = false;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            double v = M[j * N + j] - 2.0 * M[i * N + j] + M[i * N + i];
            double d = static_cast<double>(j - i) / n;
            if (v > 1e-14 * maxv) any_positive = true;
            c1 = std::min(c1, v / std::pow(d, 2.0 * H1));
            c2 = std::max(c2, v / std::pow(d, 2.0 * H2));
        }
    if (!any_positive) throw DomainError("degenerate model: increments vanish on the grid");
    c.C1_fit = c1;
    c.C2_fit = c2;
    c.pass = std::isfinite(c1) && std::isfinite(c2) && c1 > 0.0 && c2 > 0.0 && H1 >= H2;
    return c;
}

QuasiHelixCertificate verify_sign_condition(const ProcessModel& m, int grid_size, Sign sign, double t0,
                                            double tol_rel, unsigned threads) {
    require(grid_size >= 8, "verify_sign_condition needs grid_size >= 8");
    const int n = grid_size;
    const std::size_t N = n + 1;
    std::vector<double> M = grid_covariance(m, n, t0, threads);
    auto R = [&](std::size_t i, std::size_t j) { return M[i * N + j]; };
    double maxv = 0.0;
    for (std::size_t i = 0; i < N; ++i) maxv = std::max(maxv, R(i, i));
    const double sg = sign == Sign::positive ? 1.0 : -1.0;
    double worst = 0.0;
    for (std::size_t i1 = 0; i1 < N; ++i1)
        for (std::size_t j1 = i1 + 1; j1 < N; ++j1)
            for (std::size_t i2 = j1; i2 < N; ++i2)
                for (std::size_t j2 = i2 + 1; j2 < N; ++j2) {
                    double v = R(j1, j2) - R(j1, i2) - R(i1, j2) + R(i1, i2);
                    worst = std::max(worst, -sg * v);
                }
    QuasiHelixCertificate c;
    c.H1 = std::numeric_limits<double>::quiet_NaN();
    c.H2 = std::numeric_limits<double>::quiet_NaN();
    c.C1_fit = std::numeric_limits<double>::quiet_NaN();
    c.C2_fit = std::numeric_limits<double>::quiet_NaN();
    c.sign = sign;
    c.grid_size = n;
    c.max_variance = maxv;
    c.max_sign_violation = worst;
    c.pass = worst <= tol_rel * maxv;
    return c;
}

bool sign_proposition_holds(Sign sign, double H) { return sign == Sign::positive ? H >= 0.5 : H <= 0.5; }

// ---------------------------------------------------------------- kernel conditions

namespace {

struct Worst {
    ConditionResult r;
    bool first = true;
    void take(double margin, double t, double s) {
        if (first || margin < r.margin) {
            r.margin = margin;
            r.witness_t = t;
            r.witness_s = s;
            first = false;
        }
    }
    ConditionResult done(double tol = 1e-9) {
        r.claimed = true;
        r.holds = first || r.margin >= -tol;
        return r;
    }
};

// Relative slack of "value <= bound".
double slack_le(double value, double bound) {
    double scale = std::max(std::fabs(bound), 1e-300);
    return (bound - value) / scale;
}

// Relative slack of "value >= lower".
double slack_ge(double value, double lower) {
    double scale = std::max(std::fabs(lower), 1e-300);
    return (value - lower) / scale;
}

}  // namespace

ConditionReport kernel_condition_report(const Kernel& k, int grid_size) {
    require(grid_size >= 2, "kernel_condition_report needs grid_size >= 2");
    const int n = grid_size;
    const KernelConstants& c = k.declared();
    const int s_first = k.singular_at_zero() ? 1 : 0;
    auto g = [&](int i) { return static_cast<double>(i) / n; };
    // Tabulate once: K(t_j, s_i) for s_i <= t_j.
    std::vector<double> T(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
    for (int j = 0; j <= n; ++j)
        for (int i = s_first; i <= j; ++i) T[static_cast<std::size_t>(j) * (n + 1) + i] = k(g(j), g(i));
    auto K = [&](int j, int i) { return T[static_cast<std::size_t>(j) * (n + 1) + i]; };
    ConditionReport rep;

    {
        Worst w;
        for (int i = s_first; i <= n; ++i)
            for (int j = i; j <= n; ++j) {
                w.take(K(j, i) / std::max(1.0, std::fabs(K(j, i))), g(j), g(i));
                if (j > i) w.take((K(j, i) - K(j - 1, i)) / std::max(1.0, std::fabs(K(j, i))), g(j), g(i));
            }
        rep["B1"] = w.done(1e-12);
    }

    const double r = c.r.value_or(0.0);
    auto sr = [&](int i) { return std::pow(g(i), -r); };
    if (c.D2 && c.D3 && c.H2) {
        ConditionResult range;
        range.claimed = true;
        range.margin = std::min(*c.H2 - 0.5, 1.0 - *c.H2);
        range.holds = *c.H2 > 0.5 && *c.H2 < 1.0;
        rep["B2.range"] = range;
        Worst inc, size;
        for (int i = std::max(1, s_first); i <= n; ++i)
            for (int j2 = i; j2 <= n; ++j2) {
                for (int j1 = std::max(i, 0); j1 < j2; ++j1)
                    inc.take(slack_le(std::fabs(K(j2, i) - K(j1, i)),
                                      *c.D2 * std::pow(g(j2) - g(j1), *c.H2) * sr(i)),
                             g(j2), g(i));
                if (j2 > i)
                    size.take(slack_le(K(j2, i), *c.D3 * std::pow(g(j2) - g(i), *c.H2 - 0.5) * sr(i)), g(j2),
                              g(i));
            }
        rep["B2.increment"] = inc.done();
        rep["B2.bound"] = size.done();
    } else {
        rep["B2.range"] = ConditionResult{};
        rep["B2.increment"] = ConditionResult{};
        rep["B2.bound"] = ConditionResult{};
    }

    if (c.D1 && c.H1) {
        Worst w;
        for (int i = std::max(1, s_first); i <= n; ++i)
            for (int j2 = i + 1; j2 <= n; ++j2) {
                if (c.b3_lower_form) {
                    double lower = *c.D1 * std::pow(g(j2) - g(i), *c.H1 - 0.5) * sr(i);
                    w.take(slack_ge(K(j2, i), lower), g(j2), g(i));
                } else {
                    for (int j1 = i; j1 < j2; ++j1) {
                        double lower = *c.D1 * std::pow(g(j2) - g(j1), *c.H1) * sr(i);
                        double v = std::fabs(K(j2, i) - K(j1, i));
                        w.take(slack_ge(v, lower), g(j2), g(i));
                    }
                }
            }
        rep[c.b3_lower_form ? "B3b" : "B3a"] = w.done();
        rep[c.b3_lower_form ? "B3a" : "B3b"] = ConditionResult{};
    } else {
        rep["B3a"] = ConditionResult{};
        rep["B3b"] = ConditionResult{};
    }

    if (c.k && c.K_up) {
        Worst w;
        for (int i = s_first; i <= n; ++i)
            for (int j = i; j <= n; ++j) {
                w.take(slack_ge(K(j, i), *c.k), g(j), g(i));
                w.take(slack_le(K(j, i), *c.K_up), g(j), g(i));
            }
        ConditionResult res = w.done();
        res.holds = res.holds && *c.k > 0.0;
        rep["B4"] = res;
    } else {
        rep["B4"] = ConditionResult{};
    }

    if (c.C5 && c.H3) {
        Worst w;
        for (int i = s_first; i <= n; ++i)
            for (int j2 = i + 1; j2 <= n; ++j2)
                for (int j1 = i; j1 < j2; ++j1)
                    w.take(slack_le(std::fabs(K(j2, i) - K(j1, i)), *c.C5 * std::pow(g(j2) - g(j1), *c.H3)),
                           g(j2), g(i));
        ConditionResult res = w.done();
        res.holds = res.holds && *c.H3 >= 0.5;
        rep["B5"] = res;
    } else {
        rep["B5"] = ConditionResult{};
    }
    return rep;
}

// ---------------------------------------------------------------- exponent algebra

double rho_zero(double H1, double H2) {
    if (!(2.0 * H1 - 1.0 > 0.0)) throw DomainError("rho_zero needs 0 < 2H1 - 1 (H1 > 1/2)");
    if (!(2.0 * H1 - 1.0 < H2)) throw DomainError("rho_zero needs 2H1 - 1 < H2");
    if (!(H2 <= H1)) throw DomainError("rho_zero needs H2 <= H1");
    return (1.0 + H2) * (H1 - H2) / (H2 + 1.0 - 2.0 * H1);
}

double rho_zero_from_exponents(double lambda, double mu, double theta) {
    if (!(lambda > 0.0)) throw DomainError("rho_zero_from_exponents needs lambda > 0");
    if (!(mu > 0.0)) throw DomainError("rho_zero_from_exponents needs mu > 0");
    if (!(theta > 0.0)) throw DomainError("rho_zero_from_exponents needs theta > 0");
    if (theta > mu / lambda * (1.0 + 1e-12))
        throw DomainError("theta exceeds mu/lambda: exponents lambda, mu, theta are incompatible");
    return std::max(0.0, mu / (lambda * theta) - 1.0);
}

bool same_regularity_check(double H1, double H2) {
    return H1 < 2.0 * H2 * (H2 + 1.0) / (1.0 + 3.0 * H2);
}

}  // namespace qhlab
