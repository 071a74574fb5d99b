#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace levy {

// Adaptive Simpson on [a,b]; abs_tol is the absolute error target.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 40);

// n-point Gauss-Legendre nodes/weights on [-1,1] (Newton on Legendre P_n).
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

double integrate_gauss(const std::function<double(double)>& f, double a, double b, int n);

// Regularized incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a).
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with k dof.
inline double chi_square_pvalue(double k, double chi2) { return gamma_q(0.5 * k, 0.5 * chi2); }

// C(alpha) = int_0^inf (1 - cos s) s^{-1-alpha} ds, alpha in (0,2).
// Periodwise quadrature plus a two-term asymptotic tail.
double one_minus_cos_moment(double alpha);

// Closed form of the same integral, kept as an independent cross-check:
// Gamma(2-alpha) cos(pi alpha/2) / (alpha (1-alpha)), = pi/2 at alpha = 1.
double one_minus_cos_moment_closed(double alpha);

// Halton low-discrepancy sequence (bases 2 and 3), index starts at 1.
double halton(std::size_t index, unsigned base);

// Quasi-random points in the disk |x| < radius (Halton in the square +
// rejection; deterministic).
std::vector<std::pair<double, double>> halton_disk(std::size_t count, double radius);

// Natural cubic-spline-free monotone helper: periodic cubic (Catmull-Rom)
// interpolation of a uniformly sampled 2*pi-periodic table.
double periodic_cubic(const std::vector<double>& table, double theta);

}  // namespace levy
