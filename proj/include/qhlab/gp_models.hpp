#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qhlab {

enum class KernelForm { closed_form, fbm_type, exponential, tabulated };

// Constants a kernel declares for the structural conditions. Unset means "not claimed".
struct KernelConstants {
    std::optional<double> r;   // singularity exponent in s^{-r}, r in [0, 1/2)
    std::optional<double> D1;  // (B3)
    std::optional<double> D2;  // (B2) increment bound
    std::optional<double> D3;  // (B2) size bound
    std::optional<double> H1;  // (B3)
    std::optional<double> H2;  // (B2)
    std::optional<double> k;      // (B4) lower bound
    std::optional<double> K_up;   // (B4) upper bound
    std::optional<double> C5;     // (B5) Hoelder constant
    std::optional<double> H3;     // (B5) Hoelder exponent
    bool b3_lower_form = false;   // true: (B3,b) K >= D1 (t-s)^{H1-1/2} s^{-r}; false: (B3,a)
    bool claims_b1 = false;
};

// Causal kernel K(t, s); evaluate returns 0 for s > t.
class Kernel {
public:
    static Kernel exponential(double a);
    // Remark-4.4 type kernel C_H s^{1/2-H} phi(s) int_s^t u^{H-1/2} (u-s)^{H-3/2} du.
    // Without an explicit C_H the Molchan constant is used, so phi = 1 gives fBm.
    static Kernel fbm_type(double H, std::function<double(double)> phi = {}, double phi_lower = 1.0,
                           double phi_upper = 1.0, std::optional<double> C_H = std::nullopt);
    // Values on the (n+1)x(n+1) grid i/n, row-major in (t, s); bilinear in between.
    static Kernel tabulated(std::vector<double> values, int n, KernelConstants declared = {});
    static Kernel closed_form(std::function<double(double, double)> f, std::string name,
                              KernelConstants declared = {});

    double operator()(double t, double s) const;
    KernelForm form() const { return form_; }
    const KernelConstants& declared() const { return declared_; }
    const std::string& name() const { return name_; }
    // True when K(t, s) ~ s^{-r} with r > 0 near s = 0 (grade quadrature toward 0).
    bool singular_at_zero() const { return singular_at_zero_; }
    double fbm_H() const { return H_; }
    double fbm_constant() const { return C_H_; }

    // Inner integral int_s^t u^{H-1/2} (u-s)^{H-3/2} du of the fbm-type kernel.
    static double fbm_inner_integral(double H, double t, double s);
    static double molchan_constant(double H);

private:
    KernelForm form_ = KernelForm::closed_form;
    KernelConstants declared_;
    std::string name_;
    bool singular_at_zero_ = false;
    double H_ = 0.0, C_H_ = 0.0, a_ = 0.0;
    std::shared_ptr<const std::function<double(double)>> phi_;
    std::shared_ptr<const std::function<double(double, double)>> fn_;
    std::shared_ptr<const std::vector<double>> table_;
    int table_n_ = 0;
};

struct Wiener {};
struct FBM {
    double H;
};
struct SubFBM {
    double H;
};
struct BiFBM {
    double H;
    double K;
};
struct VolterraWiener {
    Kernel kernel;
};
struct VolterraFBM {
    Kernel kernel;
    double H;
};
struct FracOU {
    double a;
    double H;
};

using ModelVariant = std::variant<Wiener, FBM, SubFBM, BiFBM, VolterraWiener, VolterraFBM, FracOU>;

class ProcessModel {
public:
    // Validates parameter ranges; throws DomainError.
    ProcessModel(ModelVariant v);

    const ModelVariant& variant() const { return v_; }
    std::string id() const;
    // Wiener and fBm: increments on a uniform grid form a stationary sequence.
    bool stationary_increments() const;
    // Covariance uses quadrature (Volterra families).
    bool uses_quadrature() const;

private:
    ModelVariant v_;
};

double covariance(const ProcessModel& m, double s, double t);
// E(X_t - X_s)^2, 0 <= s <= t <= 1. Volterra-Wiener uses the split-integral form.
double incremental_variance(const ProcessModel& m, double s, double t);
// E(X_{t1} - X_{s1})(X_{t2} - X_{s2}) by polarization.
double incremental_covariance(const ProcessModel& m, double s1, double t1, double s2, double t2);
// Volterra-Wiener only: direct kernel integrals (no polarization).
double volterra_wiener_incremental_variance(const Kernel& k, double s, double t);
double volterra_wiener_incremental_covariance(const Kernel& k, double s1, double t1, double s2, double t2);

enum class Sign { positive, negative };
const char* sign_name(Sign s);

struct QuasiHelixCertificate {
    double H1 = 0.0;
    double H2 = 0.0;
    double C1_fit = 0.0;
    double C2_fit = 0.0;
    Sign sign = Sign::positive;
    double max_sign_violation = 0.0;
    int grid_size = 0;
    bool pass = false;
    double max_variance = 0.0;
};

// Covariance on the grid t0 + i (1 - t0)/n, cached for the checkers.
std::vector<double> grid_covariance(const ProcessModel& m, int n, double t0 = 0.0, unsigned threads = 1);

QuasiHelixCertificate verify_a1_a2(const ProcessModel& m, int grid_size, double H1, double H2,
                                   unsigned threads = 1);
QuasiHelixCertificate verify_sign_condition(const ProcessModel& m, int grid_size, Sign sign,
                                            double t0 = 0.0, double tol_rel = 1e-12,
                                            unsigned threads = 1);

// A positive sign with H1 = H2 = H forces H >= 1/2; negative forces H <= 1/2.
bool sign_proposition_holds(Sign sign, double H);

struct ConditionResult {
    bool claimed = false;
    bool holds = false;
    double witness_t = 0.0;
    double witness_s = 0.0;
    double margin = 0.0;  // worst slack; negative when violated
};
using ConditionReport = std::map<std::string, ConditionResult>;

ConditionReport kernel_condition_report(const Kernel& k, int grid_size);

double rho_zero(double H1, double H2);
double rho_zero_from_exponents(double lambda, double mu, double theta);
bool same_regularity_check(double H1, double H2);

}  // namespace qhlab
