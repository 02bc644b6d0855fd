#pragma once

#include <cstddef>

// Hot loops with a scalar reference and an AVX2+FMA variant chosen at runtime.
namespace qhlab::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
bool isa_available(Isa isa);
// Forces a variant (tests, benchmarking). Throws DomainError if unavailable.
void set_isa(Isa isa);
const char* isa_name(Isa isa);

double dot(const double* a, const double* b, std::size_t n);
// n >= 1.
void minmax(const double* x, std::size_t n, double& lo, double& hi);
double max_abs_dev(const double* x, std::size_t n, double anchor);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void minmax(const double* x, std::size_t n, double& lo, double& hi);
double max_abs_dev(const double* x, std::size_t n, double anchor);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void minmax(const double* x, std::size_t n, double& lo, double& hi);
double max_abs_dev(const double* x, std::size_t n, double anchor);
}  // namespace avx2

}  // namespace qhlab::kernels
