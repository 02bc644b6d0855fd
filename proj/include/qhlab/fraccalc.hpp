#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qhlab/sampler.hpp"

namespace qhlab {

// Tabulated function, linear between nodes.
struct GridFunction {
    TimeGrid grid;
    std::vector<double> values;  // n+1 values
    std::optional<double> holder_hint;

    double operator()(double x) const;
    // Index of the node equal to x (to 1e-12 relative); DomainError otherwise.
    int node_index(double x) const;
    void validate() const;

    static GridFunction from_function(const TimeGrid& g, const std::function<double(double)>& f,
                                      std::optional<double> hint = std::nullopt);
    static GridFunction from_path(const TimeGrid& g, const double* path, std::optional<double> hint);
};

// Smallest C with |f(t_i) - f(t_j)| <= C |t_i - t_j|^exponent over all node pairs.
double holder_constant(const GridFunction& f, double exponent);

struct FracParams {
    double alpha = 0.25;
    void validate() const;             // alpha in (0, 1/2)
    void validate_for(double theta) const;  // additionally alpha > 1 - theta
};

// Midpoint of (1 - theta, 1/2).
double default_alpha(double theta);

// (D^alpha_{a+} f)(x). f is the linear interpolant; a must be a node, x anywhere in (a, b].
double frac_derivative_forward(const GridFunction& f, double a, double b, double alpha, double x);
// Same for a callable f, by graded quadrature (ratio 0.5, 40 levels toward x).
double frac_derivative_forward(const std::function<double(double)>& f, double a, double x, double alpha);

// (D^{1-alpha}_{b-} g_{b-})(x), real form: positive for increasing g. b must be a node, a <= x < b.
double frac_derivative_backward(const GridFunction& g, double a, double b, double alpha, double x);

struct LambdaResult {
    double value = 0.0;
    double s = 0.0, t = 0.0;  // maximizing pair
    bool hint_missing = false;
    bool hint_inconsistent = false;  // alpha outside (1 - hint, 1/2)
};

// sup over node pairs s < t of |(D^{1-alpha}_{t-} g_{t-})(s)|.
LambdaResult lambda_alpha(const GridFunction& g, double alpha);

double alpha_norm(const GridFunction& f, double a, double b, double alpha);
// ||f||_{alpha,[a_k, b]} for every a_k in starts (nodes), in one pass.
std::vector<double> alpha_norm_tails(const GridFunction& f, const std::vector<double>& starts, double b,
                                     double alpha);

struct GlsOptions {
    int levels = 6;  // graded Gauss per cell, both ends
    int order = 6;
};

// int_a^b (D^alpha_{a+} f)(x) (D^{1-alpha}_{b-} g_{b-})(x) dx; a, b nodes of the common grid.
double gls_integral(const GridFunction& f, const GridFunction& g, double a, double b, double alpha,
                    const GlsOptions& opt = {});

struct RsResult {
    double value = 0.0;
    double error = 0.0;
    bool reliable = true;
    std::string warning;
};

// Left-point Riemann-Stieltjes sums at strides 1, 2, .., 2^n_refine with Richardson extrapolation.
RsResult rs_oracle(const GridFunction& f, const GridFunction& g, double a, double b, int n_refine = 2);

}  // namespace qhlab
