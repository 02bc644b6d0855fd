#include "qhlab/kernels.hpp"

#include <atomic>
#include <cmath>

#include "qhlab/errors.hpp"

namespace qhlab::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void minmax(const double* x, std::size_t n, double& lo, double& hi) {
    lo = x[0];
    hi = x[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
}

double max_abs_dev(const double* x, std::size_t n, double anchor) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::fabs(x[i] - anchor);
        if (d > m) m = d;
    }
    return m;
}

}  // namespace scalar

#ifndef QHLAB_HAVE_AVX2_TU
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void minmax(const double* x, std::size_t n, double& lo, double& hi) { scalar::minmax(x, n, lo, hi); }
double max_abs_dev(const double* x, std::size_t n, double anchor) {
    return scalar::max_abs_dev(x, n, anchor);
}
}  // namespace avx2
#endif

namespace {

bool cpu_has_avx2() {
#if defined(QHLAB_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{cpu_has_avx2() ? Isa::avx2 : Isa::scalar};
    return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool isa_available(Isa isa) {
    if (isa == Isa::scalar) return true;
    static const bool has = cpu_has_avx2();
    return has;
}

void set_isa(Isa isa) {
    if (!isa_available(isa)) throw DomainError(std::string("instruction set not available: ") + isa_name(isa));
    current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) {
    return active_isa() == Isa::avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

void minmax(const double* x, std::size_t n, double& lo, double& hi) {
    if (active_isa() == Isa::avx2)
        avx2::minmax(x, n, lo, hi);
    else
        scalar::minmax(x, n, lo, hi);
}

double max_abs_dev(const double* x, std::size_t n, double anchor) {
    return active_isa() == Isa::avx2 ? avx2::max_abs_dev(x, n, anchor)
                                     : scalar::max_abs_dev(x, n, anchor);
}

}  // namespace qhlab::kernels
