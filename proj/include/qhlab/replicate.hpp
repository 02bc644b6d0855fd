#pragma once

#include <string>
#include <vector>

#include "qhlab/fraccalc.hpp"
#include "qhlab/smallball.hpp"

namespace qhlab {

enum class ScheduleKind { power, dyadic };
const char* schedule_name(ScheduleKind k);

struct BlockSchedule {
    ScheduleKind kind = ScheduleKind::dyadic;
    int N = 0;
    double gamma = 0.0;
    double K = 0.0;             // power kind: (sum k^{-gamma})^{-1}
    std::vector<double> t;      // t_0 = 0 < ... < t_N
    std::vector<double> deltas; // deltas[k-1] = t_k - t_{k-1}
    // Grid index of t_k, rounded down.
    std::vector<int> indices(const TimeGrid& g) const;
};

BlockSchedule make_schedule(ScheduleKind kind, int N, double gamma = 0.0);

struct Clamp {
    double g = 0.0, d1 = 0.0, d2 = 0.0;
};
// g(x) = sqrt(x^2 + nu^2) - nu with its first two derivatives.
Clamp smooth_clamp(double nu, double x);

// Parameters of the diverging-integrand construction.
struct LemmaParams {
    double beta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    SmallBallExponents exponents;
};

// beta = mu/lambda + beta_offset, gamma the midpoint of (1, min(1/theta, beta lambda/mu)).
LemmaParams lemma_defaults(const SmallBallExponents& e, double theta, double beta_offset = 1.5);
// Violated constraints, empty when feasible.
std::vector<std::string> lemma_violations(const LemmaParams& p);

struct DivergenceResult {
    std::vector<double> contributions;  // k^{beta-1} g_k(X_{tau_k} - X_{t_{k-1}})
    std::vector<bool> success;           // threshold k^{-beta} hit inside block k
    std::vector<int> tau_index;
    double cumulative = 0.0;
    bool hit = false;
    int hit_block = 0;  // first block where the running integral reached M, 0 if never
    // Same sum with each successful block credited at the exact threshold (continuous crossing).
    double clipped_cumulative = 0.0;
    bool clipped_hit = false;
};

// Power schedule over [grid.t0, grid.t0 + grid.delta]; every block must hold >= 8 grid points.
DivergenceResult run_diverging_integrand(const double* path, const TimeGrid& grid, const LemmaParams& p,
                                         const BlockSchedule& sched, double level_M);

struct ReplicationParams {
    double theta = 0.0;
    double alpha = 0.0;
    double kappa = 0.0;
    double eps_gap = 0.05;
    double beta = 0.0;
    double gamma = 0.0;
    double rho = 0.0;
    double H1 = 0.0;  // scale exponent of the Case-1 rescaling
    SmallBallExponents exponents;
    double rho0_display = 0.0;  // (1 + H2)(H1 - H2)/(H2 + 1 - 2H1)
    double rho0_theta = 0.0;    // mu/(lambda theta) - 1
    bool clears_display = false;
    bool clears_theta = false;

    double sigma(int n, double delta_n) const;
    double nu(int n, double delta_n) const;
    LemmaParams lemma() const;
};

// Empty when every displayed constraint holds.
std::vector<std::string> replication_violations(const ReplicationParams& p);
bool replication_feasible(const ReplicationParams& p);

ReplicationParams select_parameters(double H1, double H2, double rho);

enum class BlockCase { caught_up, tracking };
const char* case_name(BlockCase c);

enum class Trigger { adapted, literal };
const char* trigger_name(Trigger t);

struct BlockRecord {
    int n = 0;
    BlockCase kase = BlockCase::caught_up;
    bool event_A = false;
    int start_index = 0, end_index = 0, tau_index = 0;
    double target = 0.0;    // Case 1: xi_n - V(t_n); Case 2: xi_n - xi_{n-1}
    double achieved = 0.0;  // V(t_{n+1}) - V(t_n)
    double v_or_delta = 0.0;
    double sigma = 0.0, nu = 0.0;
    bool success = false;
    double truncation = 1.0;  // Case 1 factor on the last step
    double overshoot = 0.0;   // Case 2: achieved magnitude minus delta_n
};

struct ReplicationTrace {
    GridFunction psi, V, target;
    std::vector<BlockRecord> blocks;
    std::vector<int> t_index;  // grid indices of t_0..t_N
    double terminal_error = 0.0;
    int failed_blocks = 0;
};

struct ReplicationOptions {
    Trigger trigger = Trigger::adapted;
};

// X and Z on the same grid over [0, 1]; Z.holder_hint must equal params.rho.
ReplicationTrace run_replication(const GridFunction& X, const GridFunction& Z, const ReplicationParams& p,
                                 const BlockSchedule& sched, const ReplicationOptions& o = {});

struct TraceDiagnostics {
    std::vector<double> error;        // per n = 1..N: |V(t_n) - Z(t_{n-1})|
    std::vector<double> alpha_tail;   // ||psi||_{alpha,[t_n,1]}
    std::vector<int> case1_after;     // Case-1 blocks with index > n
    int last_case1 = 0;
    bool tail_decreasing = true;      // strictly, for n past the last Case-1 block
};

TraceDiagnostics trace_diagnostics(const ReplicationTrace& tr, double alpha);

}  // namespace qhlab
