#pragma once

#include <string>
#include <vector>

#include "qhlab/gp_models.hpp"
#include "qhlab/rng.hpp"
#include "qhlab/sampler.hpp"

namespace qhlab {

struct HelixInput {
    double C1 = 1.0;
    double C2 = 1.0;
    double H1 = 0.5;
    double H2 = 0.5;
    Sign sign = Sign::positive;
    void validate() const;
};

struct SmallBallConstants {
    HelixInput input;
    double C0 = 0.0;
    double C3 = 0.0;
    double C4 = 0.0;
    double C5 = 0.0;
    // Grid size a of the chaining argument: C0^{1/(2H1)} eps^{1/H1}.
    double a_of_eps(double eps) const;
};

struct SmallBallExponents {
    double lambda = 0.0;
    double mu = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
};

struct SmallBall {
    SmallBallConstants constants;
    SmallBallExponents exponents;
};

// Throws DomainError when the eps-exponent is not negative (bound vacuous).
SmallBall derive_constants(const HelixInput& in);

// Range statistic: exp{-K2 eps^{-lambda} delta^{mu}} for eps <= C3 delta^{H1}, else 1.
double theoretical_bound(const SmallBallConstants& c, const SmallBallExponents& e, double eps, double delta);
// The same bound obtained by rescaling [0, delta] to [0, 1]: C2 -> C2 delta^{2(H2-H1)},
// eps -> eps delta^{-H1}, then the unit-interval bound.
double theoretical_bound_rescaled(const HelixInput& in, double eps, double delta);
// Anchored statistic via anchored <= eps => range <= 2 eps.
double anchored_bound(const SmallBallConstants& c, const SmallBallExponents& e, double eps, double delta);
// Exponents for the anchored form: K2 absorbs 2^{-lambda}.
SmallBallExponents anchored_exponents(const SmallBallExponents& e);

// A Hoelder exponent theta used downstream must not exceed mu/lambda.
bool theta_admissible(const SmallBallExponents& e, double theta);

enum class Estimator { grid, bridge };
const char* estimator_name(Estimator e);

struct McSettings {
    int n_grid = 1024;
    std::size_t m_paths = 20000;
    RngSpec rng{};
    unsigned threads = 1;
    Estimator estimator = Estimator::grid;
    SamplerOptions sampler{};
};

struct McEstimate {
    double eps = 0.0;
    double estimate = 0.0;
    double halfwidth = 0.0;  // 95% Wald
    double std_error = 0.0;
};

// One sampling pass, every eps evaluated on the same paths. Window [t0, t0 + delta].
std::vector<McEstimate> mc_estimate(const ProcessModel& m, const std::vector<double>& eps, double t0,
                                    double delta, StatKind kind, const McSettings& s);

// Probability that a Brownian bridge from x to y over time T stays in (lo, hi).
double bridge_stay_probability(double x, double y, double T, double lo, double hi);

struct SmallBallRow {
    double eps = 0.0;
    double delta = 0.0;
    StatKind kind = StatKind::range;
    double mc_estimate = 0.0;
    double mc_halfwidth = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct SmallBallReport {
    std::vector<SmallBallRow> rows;
    SmallBall derived;
    int n_grid = 0;
};

struct VerifyOptions {
    McSettings mc{};
    double t0 = 0.0;
    // Certify the helix on a coarse grid before sampling (0 disables).
    int certify_grid = 24;
};

SmallBallReport verify_bound(const ProcessModel& m, const HelixInput& helix, const std::vector<double>& eps_list,
                             const std::vector<double>& delta_list, const VerifyOptions& o);

// Least-squares slope of log(-log p) against log(1/eps); rows with p outside (0, 1) are skipped.
double fit_decay_slope(const std::vector<double>& eps, const std::vector<double>& p);

}  // namespace qhlab
