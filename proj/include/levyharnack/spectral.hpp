#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "levyharnack/common.hpp"
#include "levyharnack/sequences.hpp"

namespace levy {

struct Arc {
    double center = 0.0;      // radians
    double half_width = 0.0;  // angular half-width
    double density = 1.0;     // f_mu value on the arc
    double chord_radius = 0.0;  // 2 sin(half_width/2): ball radius cutting this arc
};

// Symmetric spectral measure on the unit circle: either a list of arcs
// (mirrored through the origin automatically) or a bounded density callback.
class SpectralMeasure {
  public:
    static SpectralMeasure from_arcs(const std::vector<Arc>& base_arcs);
    static SpectralMeasure from_density(std::function<double(double)> f, double bound_m);
    static SpectralMeasure isotropic(double level = 1.0);

    double density(double theta) const;
    double bound() const { return bound_m_; }
    double total_mass() const { return total_mass_; }
    bool is_arc_measure() const { return !arcs_.empty(); }
    bool is_isotropic() const { return isotropic_; }
    const std::vector<Arc>& arcs() const { return arcs_; }  // base + mirrors
    std::size_t base_arc_count() const { return base_count_; }
    double max_symmetry_defect(int grid = 720) const;  // max |f(t) - f(t+pi)|

    SpectralMeasure() = default;  // empty; fill via a factory before use

  private:
    std::vector<Arc> arcs_;
    std::size_t base_count_ = 0;
    std::function<double(double)> density_fn_;
    double bound_m_ = 0.0;
    double total_mass_ = 0.0;
    bool isotropic_ = false;
};

// The theorem's measure: density 1 on the union over n <= n_max of the arcs
// cut from the circle by B(xi_n, 2 sin(alpha_n/4)) and their mirrors; each arc
// is exactly the cone band [A_{n-1}+B_n, A_n+B_n].
SpectralMeasure counterexample_measure(const SequencePair& seq, int n_max);

struct StableModel {
    double alpha = 0.5;
    SpectralMeasure measure;
    double kappa = 0.0;            // Levy normalization: 1/int_0^inf (1-cos s) s^{-1-alpha} ds
    double cos_moment = 0.0;       // the integral itself, as evaluated

    static StableModel make(double alpha, SpectralMeasure mu);
};

struct QuadratureValue {
    double value = 0.0;
    double achieved_error = 0.0;  // estimated; may exceed the request (reported, not thrown)
};

// Characteristic exponent Phi(u) = int |u.xi|^alpha mu(dxi), adaptive
// Gauss pairs with kink splitting at directions orthogonal to u.
// The direct form takes alpha in (0,2]; alpha = 2 is a quadrature sanity case
// only (no jump representation exists there).
QuadratureValue char_exponent_direct(double alpha, const SpectralMeasure& mu, Vec2 u,
                                     double rel_tol = 1e-10);
QuadratureValue char_exponent_quad(const StableModel& m, Vec2 u, double rel_tol = 1e-10);
double char_exponent(const StableModel& m, Vec2 u);

// Levy density f_nu(z) = kappa f_mu(z/|z|) |z|^{-alpha-2}; throws on z = 0.
double levy_density(const StableModel& m, Vec2 z);

struct Nondegeneracy {
    double c = 0.0;          // min over |u| = 1 of Phi(u)
    double theta_min = 0.0;  // minimizing direction
};
Nondegeneracy nondegeneracy_constant(const StableModel& m, int grid = 256);

// One jump of size > eps: direction by arc masses (or rejection against the
// density bound), radius Pareto with P(R > r) = (eps/r)^alpha.
Vec2 sample_jump(const StableModel& m, double eps, std::mt19937_64& rng);

// nu({|y| > eps}) = kappa * mass * eps^{-alpha} / alpha.
double jump_rate(const StableModel& m, double eps);

struct ExitRecord {
    Vec2 start;
    Vec2 exit_position;
    double exit_time = 0.0;
    std::uint64_t jumps = 0;
    bool complete = false;          // false: jump budget exhausted inside the ball
    bool compensated_exit = false;  // crossed the boundary on a Gaussian move
    double small_jump_bound = 0.0;  // expected neglected displacement over [0, tau] (alpha < 1)
};

struct ExitSimConfig {
    double eps = -1.0;  // <= 0: use 1e-3 * R; must satisfy eps <= R/100
    std::uint64_t max_jumps = 10000000;
    bool gaussian_compensation = false;  // mandatory to request alpha >= 1
};

// Compound-Poisson big-jump scheme: jumps of size > eps at rate jump_rate;
// exit at the first state on or outside the sphere |x| = R.
ExitRecord simulate_exit(const StableModel& m, Vec2 x0, double R, const ExitSimConfig& cfg,
                         std::mt19937_64& rng);

// Paths are independent streams keyed by (seed, path index); output order is
// by index, so results do not depend on the worker count.
std::vector<ExitRecord> simulate_exit_batch(const StableModel& m, Vec2 x0, double R,
                                            const ExitSimConfig& cfg, std::size_t n_paths,
                                            std::uint64_t seed, unsigned threads);

// External interfaces.
std::string measure_to_json(const SpectralMeasure& mu);
SpectralMeasure measure_from_json(const std::string& text);
std::string exit_records_csv(const std::vector<ExitRecord>& records);

}  // namespace levy
