#include "qhlab/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "qhlab/errors.hpp"
#include "qhlab/kernels.hpp"
#include "qhlab/parallel.hpp"

namespace qhlab {

void TimeGrid::validate() const {
    if (n < 2) throw DomainError("grid needs n >= 2");
    if (!(t0 >= 0.0)) throw DomainError("grid needs t0 >= 0");
    if (!(delta > 0.0)) throw DomainError("grid needs delta > 0");
    if (t0 + delta > 1.0 + 1e-12) throw DomainError("grid needs t0 + delta <= 1");
}

std::vector<double> build_covariance_matrix(const ProcessModel& m, const TimeGrid& g, unsigned threads) {
    g.validate();
    const std::size_t N = static_cast<std::size_t>(g.n) + 1;
    std::vector<double> M(N * N);
    parallel_for(N, threads, [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i)
            for (std::size_t j = i; j < N; ++j)
                M[i * N + j] = covariance(m, std::min(1.0, g.t(static_cast<int>(i))),
                                          std::min(1.0, g.t(static_cast<int>(j))));
    });
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < i; ++j) M[i * N + j] = M[j * N + i];
    return M;
}

namespace {

// Returns the first failing pivot or dim on success.
std::size_t try_cholesky(const std::vector<double>& M, std::size_t n, double jitter, double zero_tol,
                         std::vector<double>& L, double& bad_value) {
    std::fill(L.begin(), L.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double* Lj = L.data() + j * n;
        double d = M[j * n + j] + jitter - kernels::dot(Lj, Lj, j);
        if (d > zero_tol) {
            double piv = std::sqrt(d);
            Lj[j] = piv;
            for (std::size_t i = j + 1; i < n; ++i) {
                double* Li = L.data() + i * n;
                Li[j] = (M[i * n + j] - kernels::dot(Li, Lj, j)) / piv;
            }
        } else {
            if (d < -zero_tol) {
                bad_value = d;
                return j;
            }
            for (std::size_t i = j + 1; i < n; ++i) {
                double* Li = L.data() + i * n;
                double r = M[i * n + j] - kernels::dot(Li, Lj, j);
                if (std::fabs(r) > zero_tol) {
                    bad_value = d;
                    return j;
                }
            }
        }
    }
    return n;
}

}  // namespace

CholeskyFactor factor_covariance(const std::vector<double>& M, std::size_t dim) {
    if (M.size() != dim * dim) throw DomainError("factor_covariance: matrix size mismatch");
    double maxdiag = 0.0;
    for (std::size_t i = 0; i < dim; ++i) maxdiag = std::max(maxdiag, M[i * dim + i]);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::fabs(M[i * dim + j] - M[j * dim + i]) > 1e-12 * std::max(1.0, maxdiag))
                throw DomainError("factor_covariance: matrix is not symmetric");
    CholeskyFactor f;
    f.dim = dim;
    f.L.assign(dim * dim, 0.0);
    const double zero_tol = 1e-15 * std::max(maxdiag, 1e-300);
    std::size_t bad = 0;
    double bad_value = 0.0;
    for (double level : {0.0, 1e-14, 1e-12, 1e-10}) {
        double jitter = level * maxdiag;
        bad = try_cholesky(M, dim, jitter, zero_tol, f.L, bad_value);
        if (bad == dim) {
            f.jitter = jitter;
            return f;
        }
    }
    throw NotPsdError(bad, bad_value);
}

const char* route_name(Route r) {
    switch (r) {
        case Route::automatic: return "automatic";
        case Route::dense: return "dense";
        case Route::toeplitz: return "toeplitz";
        case Route::independent: return "independent";
    }
    return "?";
}

PathSampler::PathSampler(const ProcessModel& m, const TimeGrid& g, SamplerOptions opt, unsigned threads)
    : grid_(g), opt_(opt), model_id_(m.id()) {
    g.validate();
    if (opt_.batch == 0) opt_.batch = 1;
    const std::size_t n = static_cast<std::size_t>(g.n);
    const double h = g.step();

    bool stationary = m.stationary_increments();
    if (stationary) {
        acov_.resize(n);
        if (std::holds_alternative<Wiener>(m.variant())) {
            acov_[0] = h;
        } else {
            const double H2 = 2.0 * std::get<FBM>(m.variant()).H;
            const double scale = std::pow(h, H2);
            for (std::size_t k = 0; k < n; ++k) {
                double kk = static_cast<double>(k);
                acov_[k] = scale * 0.5 *
                           (std::pow(kk + 1.0, H2) + std::pow(std::fabs(kk - 1.0), H2) - 2.0 * std::pow(kk, H2));
            }
        }
    }
    bool independent = stationary && std::all_of(acov_.begin() + 1, acov_.end(), [](double v) { return v == 0.0; });

    Route r = opt_.route;
    if (r == Route::automatic) r = independent ? Route::independent : stationary ? Route::toeplitz : Route::dense;
    if ((r == Route::toeplitz && !stationary) || (r == Route::independent && !independent))
        throw DomainError(std::string("route ") + route_name(r) + " not applicable to " + model_id_);
    route_ = r;

    if (route_ == Route::dense) {
        if (n > opt_.max_dense_n)
            throw DomainError("dense sampling route limited to n <= " + std::to_string(opt_.max_dense_n) +
                              " for non-stationary models");
        // Covariance of X_{t_i} - X_{t0}, i = 1..n.
        std::vector<double> full = build_covariance_matrix(m, g, threads);
        const std::size_t N = n + 1;
        std::vector<double> C(n * n);
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 1; j <= n; ++j)
                C[(i - 1) * n + (j - 1)] = full[i * N + j] - full[i * N] - full[j] + full[0];
        factor_ = factor_covariance(C, n);
    }
}

void PathSampler::sample(std::uint64_t seed, std::uint64_t first, std::size_t count, double* out) const {
    switch (route_) {
        case Route::dense: sample_dense(seed, first, count, out); break;
        case Route::toeplitz: sample_toeplitz(seed, first, count, out); break;
        case Route::independent: sample_independent(seed, first, count, out); break;
        case Route::automatic: break;
    }
}

void PathSampler::sample_dense(std::uint64_t seed, std::uint64_t first, std::size_t count, double* out) const {
    const std::size_t n = static_cast<std::size_t>(grid_.n);
    std::vector<double> z(n);
    for (std::size_t b = 0; b < count; ++b) {
        NormalStream ns(seed, first + b);
        ns.fill(z.data(), n);
        double* x = out + b * (n + 1);
        x[0] = 0.0;
        for (std::size_t i = 0; i < n; ++i) x[i + 1] = kernels::dot(factor_.L.data() + i * n, z.data(), i + 1);
    }
}

void PathSampler::sample_independent(std::uint64_t seed, std::uint64_t first, std::size_t count,
                                     double* out) const {
    const std::size_t n = static_cast<std::size_t>(grid_.n);
    const double sd = std::sqrt(acov_[0]);
    for (std::size_t b = 0; b < count; ++b) {
        NormalStream ns(seed, first + b);
        double* x = out + b * (n + 1);
        x[0] = 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += sd * ns.next();
            x[i + 1] = acc;
        }
    }
}

// Durbin-Levinson (Hosking) on the stationary increment sequence. The innovations form
// is the Cholesky factor of the increment Toeplitz matrix, so paths coincide with the
// dense route for the same normals.
void PathSampler::sample_toeplitz(std::uint64_t seed, std::uint64_t first, std::size_t count,
                                  double* out) const {
    const std::size_t n = static_cast<std::size_t>(grid_.n);
    std::vector<double> phi(n + 1, 0.0), G(n), Yr(count * n);
    for (std::size_t k = 0; k < n; ++k) G[n - 1 - k] = acov_[k];
    std::vector<NormalStream> streams;
    streams.reserve(count);
    for (std::size_t b = 0; b < count; ++b) streams.emplace_back(seed, first + b);

    double v = acov_[0];
    for (std::size_t b = 0; b < count; ++b) Yr[b * n + n - 1] = std::sqrt(v) * streams[b].next();
    for (std::size_t k = 1; k < n; ++k) {
        double a = (acov_[k] - kernels::dot(phi.data() + 1, G.data() + (n - k), k - 1)) / v;
        for (std::size_t j = 1, l = k - 1; j < l; ++j, --l) {
            double pj = phi[j], pl = phi[l];
            phi[j] = pj - a * pl;
            phi[l] = pl - a * pj;
        }
        if ((k - 1) % 2 == 1) {
            std::size_t mid = (k - 1 + 1) / 2;
            phi[mid] -= a * phi[mid];
        }
        phi[k] = a;
        v *= (1.0 - a * a);
        if (!(v > 0.0)) throw NumericError("Durbin-Levinson innovation variance lost positivity");
        const double sd = std::sqrt(v);
        for (std::size_t b = 0; b < count; ++b) {
            double* y = Yr.data() + b * n;
            y[n - 1 - k] = kernels::dot(phi.data() + 1, y + (n - k), k) + sd * streams[b].next();
        }
    }
    for (std::size_t b = 0; b < count; ++b) {
        double* x = out + b * (n + 1);
        const double* y = Yr.data() + b * n;
        x[0] = 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += y[n - 1 - i];
            x[i + 1] = acc;
        }
    }
}

PathBatch sample_paths(const ProcessModel& m, const TimeGrid& g, std::size_t count, RngSpec rng,
                       unsigned threads, SamplerOptions opt) {
    if (count < 1) throw DomainError("sample_paths needs m >= 1");
    PathSampler s(m, g, opt, threads);
    PathBatch b;
    b.grid = g;
    b.m = count;
    b.model_id = m.id();
    b.seed = rng.master_seed;
    b.stream_base = rng.stream_index;
    b.values.resize(count * b.width());
    const std::size_t B = s.batch();
    const std::size_t nb = (count + B - 1) / B;
    parallel_for(nb, threads, [&](std::size_t lo, std::size_t hi, unsigned) {
        for (std::size_t q = lo; q < hi; ++q) {
            std::size_t j0 = q * B, c = std::min(B, count - j0);
            s.sample(rng.master_seed, rng.stream_index + j0, c, b.row(j0));
        }
    });
    return b;
}

void for_each_path(const PathSampler& s, std::size_t count, RngSpec rng, unsigned threads,
                   const std::function<void(std::size_t, const double*, unsigned)>& fn) {
    const std::size_t B = s.batch();
    const std::size_t w = static_cast<std::size_t>(s.grid().n) + 1;
    const std::size_t nb = (count + B - 1) / B;
    parallel_for(nb, threads, [&](std::size_t lo, std::size_t hi, unsigned worker) {
        std::vector<double> buf(B * w);
        for (std::size_t q = lo; q < hi; ++q) {
            std::size_t j0 = q * B, c = std::min(B, count - j0);
            s.sample(rng.master_seed, rng.stream_index + j0, c, buf.data());
            for (std::size_t k = 0; k < c; ++k) fn(j0 + k, buf.data() + k * w, worker);
        }
    });
}

const char* stat_name(StatKind k) { return k == StatKind::range ? "range" : "anchored"; }

double path_statistic(const double* path, std::size_t len, std::size_t i0, std::size_t i1, StatKind kind) {
    if (i1 < i0 || i1 >= len) throw DomainError("path_statistic: empty or out-of-range window");
    const std::size_t w = i1 - i0 + 1;
    if (kind == StatKind::anchored) return kernels::max_abs_dev(path + i0, w, path[i0]);
    double lo, hi;
    kernels::minmax(path + i0, w, lo, hi);
    return hi - lo;
}

double path_statistic(const std::vector<double>& path, std::size_t i0, std::size_t i1, StatKind kind) {
    if (path.empty()) throw DomainError("path_statistic: empty path");
    return path_statistic(path.data(), path.size(), i0, i1, kind);
}

namespace {

constexpr char kMagic[5] = {'Q', 'H', 'L', 'X', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw NumericError("truncated path batch");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_path_batch(const PathBatch& b, std::ostream& os) {
    os.write(kMagic, 5);
    put_u64(os, b.model_id.size());
    os.write(b.model_id.data(), static_cast<std::streamsize>(b.model_id.size()));
    put_u64(os, static_cast<std::uint64_t>(b.grid.n));
    put_u64(os, b.m);
    put_u64(os, b.seed);
    for (double x : b.values) put_u64(os, std::bit_cast<std::uint64_t>(x));
}

PathBatch read_path_batch(std::istream& is) {
    char magic[5];
    if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) throw NumericError("bad path batch magic");
    PathBatch b;
    std::uint64_t len = get_u64(is);
    if (len > (1u << 20)) throw NumericError("implausible model id length");
    b.model_id.resize(len);
    if (!is.read(b.model_id.data(), static_cast<std::streamsize>(len))) throw NumericError("truncated path batch");
    b.grid.n = static_cast<int>(get_u64(is));
    b.m = get_u64(is);
    b.seed = get_u64(is);
    b.values.resize(b.m * b.width());
    for (double& x : b.values) x = std::bit_cast<double>(get_u64(is));
    return b;
}

}  // namespace qhlab
