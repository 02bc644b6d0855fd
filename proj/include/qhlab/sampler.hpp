#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qhlab/gp_models.hpp"
#include "qhlab/rng.hpp"

namespace qhlab {

struct TimeGrid {
    double t0 = 0.0;
    double delta = 1.0;
    int n = 2;

    double t(int i) const { return i == n ? t0 + delta : t0 + delta * i / n; }
    double step() const { return delta / n; }
    void validate() const;
};

struct PathBatch {
    TimeGrid grid;
    std::size_t m = 0;
    std::vector<double> values;  // m x (n+1), row-major
    std::string model_id;
    std::uint64_t seed = 0;
    std::uint64_t stream_base = 0;

    std::size_t width() const { return static_cast<std::size_t>(grid.n) + 1; }
    const double* row(std::size_t j) const { return values.data() + j * width(); }
    double* row(std::size_t j) { return values.data() + j * width(); }
};

// (n+1)x(n+1) row-major matrix of R(t_i, t_j).
std::vector<double> build_covariance_matrix(const ProcessModel& m, const TimeGrid& g, unsigned threads = 1);

struct CholeskyFactor {
    std::size_t dim = 0;
    std::vector<double> L;  // dim x dim, row-major lower triangle
    double jitter = 0.0;    // absolute jitter added to the diagonal
};

// Jitter escalates through {0, 1e-14, 1e-12, 1e-10} x max diagonal; NotPsdError names the
// first failing pivot at the largest jitter. Zero pivots with a vanishing remaining column
// (exactly degenerate rows such as X_0 = 0) give a zero column.
CholeskyFactor factor_covariance(const std::vector<double>& M, std::size_t dim);

enum class Route { automatic, dense, toeplitz, independent };
const char* route_name(Route r);

struct SamplerOptions {
    Route route = Route::automatic;
    std::size_t max_dense_n = 4096;
    std::size_t batch = 16;  // paths sharing one Durbin-Levinson sweep
};

// Paths are X_{t_i} - X_{t0} on the grid, path j driven by the normal stream
// (seed, stream index j). Sampling is const and thread-safe.
class PathSampler {
public:
    PathSampler(const ProcessModel& m, const TimeGrid& g, SamplerOptions opt = {}, unsigned threads = 1);

    Route route() const { return route_; }
    double jitter() const { return factor_.jitter; }
    const TimeGrid& grid() const { return grid_; }
    std::size_t batch() const { return opt_.batch; }
    const std::string& model_id() const { return model_id_; }

    // count paths with streams first_stream .. first_stream+count-1 into out, count x (n+1).
    void sample(std::uint64_t seed, std::uint64_t first_stream, std::size_t count, double* out) const;

private:
    void sample_dense(std::uint64_t seed, std::uint64_t first, std::size_t count, double* out) const;
    void sample_toeplitz(std::uint64_t seed, std::uint64_t first, std::size_t count, double* out) const;
    void sample_independent(std::uint64_t seed, std::uint64_t first, std::size_t count, double* out) const;

    TimeGrid grid_;
    SamplerOptions opt_;
    Route route_ = Route::dense;
    std::string model_id_;
    CholeskyFactor factor_;      // dense route, over X_{t_1..t_n} - X_{t0}
    std::vector<double> acov_;   // increment autocovariance, lags 0..n-1
};

PathBatch sample_paths(const ProcessModel& m, const TimeGrid& g, std::size_t count, RngSpec rng,
                       unsigned threads = 1, SamplerOptions opt = {});

// Streams count paths without storing them; fn(j, path, worker) sees path j's n+1 values.
void for_each_path(const PathSampler& s, std::size_t count, RngSpec rng, unsigned threads,
                   const std::function<void(std::size_t, const double*, unsigned)>& fn);

enum class StatKind { range, anchored };
const char* stat_name(StatKind k);

// Window [i0, i1] inclusive.
double path_statistic(const double* path, std::size_t len, std::size_t i0, std::size_t i1, StatKind kind);
double path_statistic(const std::vector<double>& path, std::size_t i0, std::size_t i1, StatKind kind);

void write_path_batch(const PathBatch& b, std::ostream& os);
PathBatch read_path_batch(std::istream& is);

}  // namespace qhlab
