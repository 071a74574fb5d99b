#include "levyharnack/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "levyharnack/numerics.hpp"
#include "levyharnack/rng.hpp"

namespace levy {

namespace {

double wrap_angle(double t) {
    t = std::fmod(t, 2.0 * kPi);
    return t < 0.0 ? t + 2.0 * kPi : t;
}

// Signed angular distance in (-pi, pi].
double ang_dist(double a, double b) {
    double d = std::fmod(a - b, 2.0 * kPi);
    if (d > kPi) d -= 2.0 * kPi;
    if (d <= -kPi) d += 2.0 * kPi;
    return d;
}

}  // namespace

SpectralMeasure SpectralMeasure::from_arcs(const std::vector<Arc>& base_arcs) {
    require(!base_arcs.empty(), "SpectralMeasure: empty arc list");
    SpectralMeasure mu;
    mu.base_count_ = base_arcs.size();
    for (const Arc& a : base_arcs) {
        require(a.half_width > 0.0 && a.density > 0.0,
                "SpectralMeasure: arcs need positive width and density");
        Arc base = a;
        base.center = wrap_angle(a.center);
        mu.arcs_.push_back(base);
    }
    for (const Arc& a : base_arcs) {
        Arc mirror = a;
        mirror.center = wrap_angle(a.center + kPi);
        mu.arcs_.push_back(mirror);
    }
    // Arcs must not overlap in the interior (touching endpoints are fine).
    std::vector<Arc> sorted = mu.arcs_;
    std::sort(sorted.begin(), sorted.end(),
              [](const Arc& p, const Arc& q) { return p.center < q.center; });
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        double gap = sorted[i + 1].center - sorted[i].center;
        if (gap + 1e-15 < sorted[i].half_width + sorted[i + 1].half_width)
            throw std::logic_error("SpectralMeasure: overlapping arcs");
    }
    double mass = 0.0;
    double m = 0.0;
    for (const Arc& a : mu.arcs_) {
        mass += 2.0 * a.half_width * a.density;
        m = std::max(m, a.density);
    }
    mu.total_mass_ = mass;
    mu.bound_m_ = m;
    return mu;
}

SpectralMeasure SpectralMeasure::from_density(std::function<double(double)> f, double bound_m) {
    require(static_cast<bool>(f) && bound_m > 0.0, "SpectralMeasure: need density and bound");
    SpectralMeasure mu;
    mu.density_fn_ = std::move(f);
    mu.bound_m_ = bound_m;
    mu.total_mass_ = integrate_adaptive([&mu](double t) { return mu.density_fn_(t); }, 0.0,
                                        2.0 * kPi, 1e-11 * bound_m);
    require(mu.total_mass_ > 0.0, "SpectralMeasure: zero total mass");
    return mu;
}

SpectralMeasure SpectralMeasure::isotropic(double level) {
    require(level > 0.0, "isotropic level > 0");
    // Two half-circle arcs: exact mass 2*pi*level and exact uniform sampling.
    Arc a;
    a.center = 0.5 * kPi;
    a.half_width = 0.5 * kPi;
    a.density = level;
    a.chord_radius = 2.0 * std::sin(0.25 * kPi);
    SpectralMeasure mu = from_arcs({a});
    mu.isotropic_ = true;
    return mu;
}

double SpectralMeasure::density(double theta) const {
    if (!arcs_.empty()) {
        for (const Arc& a : arcs_)
            if (std::abs(ang_dist(theta, a.center)) <= a.half_width) return a.density;
        return 0.0;
    }
    return density_fn_(wrap_angle(theta));
}

double SpectralMeasure::max_symmetry_defect(int grid) const {
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        // half-step offset keeps sample points off exact arc boundaries
        double t = 2.0 * kPi * (i + 0.5) / grid;
        worst = std::max(worst, std::abs(density(t) - density(t + kPi)));
    }
    return worst;
}

SpectralMeasure counterexample_measure(const SequencePair& seq, int n_max) {
    require(n_max >= 1 && n_max <= seq.max_n(), "counterexample_measure: n_max within sequence");
    std::vector<Arc> arcs;
    for (int n = 1; n <= n_max; ++n) {
        const SequenceEntry& e = seq.at(n);
        double band_lo = std::atan(seq.lower_edge_tan(n));  // A_{n-1}+B_n
        Arc a;
        a.half_width = 0.5 * e.alpha;
        a.center = band_lo + a.half_width;
        a.density = 1.0;
        a.chord_radius = 2.0 * std::sin(0.25 * e.alpha);
        if (a.half_width > 0.0) arcs.push_back(a);
    }
    return SpectralMeasure::from_arcs(arcs);
}

StableModel StableModel::make(double alpha, SpectralMeasure mu) {
    require(alpha > 0.0 && alpha < 2.0, "StableModel: alpha in (0,2)");
    StableModel m;
    m.alpha = alpha;
    m.measure = std::move(mu);
    m.cos_moment = one_minus_cos_moment(alpha);
    m.kappa = 1.0 / m.cos_moment;
    return m;
}

namespace {

// int_a^b |cos(t)|^alpha dt with adaptive Gauss pairs, splitting at the kinks
// t = pi/2 + k pi. weight(t) multiplies the integrand.
double abs_cos_piece(const std::function<double(double)>& weight, double alpha, double a, double b,
                     double tol, double& err_out, int depth = 18) {
    auto f = [&](double t) { return weight(t) * std::pow(std::abs(std::cos(t)), alpha); };
    double v24 = integrate_gauss(f, a, b, 24);
    double v48 = integrate_gauss(f, a, b, 48);
    double err = std::abs(v48 - v24);
    if (err <= tol || depth <= 0) {
        err_out += err;
        return v48;
    }
    double m = 0.5 * (a + b), sub = 0.0;
    sub += abs_cos_piece(weight, alpha, a, m, 0.5 * tol, err_out, depth - 1);
    sub += abs_cos_piece(weight, alpha, m, b, 0.5 * tol, err_out, depth - 1);
    return sub;
}

double integrate_abs_cos(const std::function<double(double)>& weight, double alpha, double a,
                         double b, double tol, double& err_out) {
    // split at interior kinks
    std::vector<double> cuts{a};
    double k0 = std::ceil((a - 0.5 * kPi) / kPi);
    for (double k = k0;; k += 1.0) {
        double kink = 0.5 * kPi + k * kPi;
        if (kink >= b) break;
        if (kink > a) cuts.push_back(kink);
    }
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += abs_cos_piece(weight, alpha, cuts[i], cuts[i + 1],
                               tol / static_cast<double>(cuts.size()), err_out);
    return total;
}

}  // namespace

QuadratureValue char_exponent_direct(double alpha, const SpectralMeasure& mu, Vec2 u,
                                     double rel_tol) {
    require(alpha > 0.0 && alpha <= 2.0, "char_exponent: alpha in (0,2]");
    double r = u.norm();
    if (r == 0.0) return {0.0, 0.0};
    double phi_u = u.angle();
    double scale = std::pow(r, alpha);
    QuadratureValue out;
    double err = 0.0;
    double mass_scale = mu.total_mass();
    if (mu.is_arc_measure()) {
        double total = 0.0;
        for (const Arc& a : mu.arcs()) {
            // |u . eta(theta)|^alpha = r^alpha |cos(theta - phi_u)|^alpha
            double lo = a.center - a.half_width - phi_u;
            double hi = a.center + a.half_width - phi_u;
            total += a.density * integrate_abs_cos([](double) { return 1.0; }, alpha, lo, hi,
                                                   rel_tol * mass_scale / mu.arcs().size(), err);
        }
        out.value = scale * total;
        out.achieved_error = scale * err;
    } else {
        double total =
            integrate_abs_cos([&](double t) { return mu.density(t + phi_u); }, alpha, 0.0,
                              2.0 * kPi, rel_tol * mass_scale, err);
        out.value = scale * total;
        out.achieved_error = scale * err;
    }
    return out;
}

QuadratureValue char_exponent_quad(const StableModel& m, Vec2 u, double rel_tol) {
    return char_exponent_direct(m.alpha, m.measure, u, rel_tol);
}

double char_exponent(const StableModel& m, Vec2 u) { return char_exponent_quad(m, u).value; }

double levy_density(const StableModel& m, Vec2 z) {
    double r = z.norm();
    require(r > 0.0, "levy_density: z must be nonzero");
    return m.kappa * m.measure.density(z.angle()) * std::pow(r, -m.alpha - 2.0);
}

Nondegeneracy nondegeneracy_constant(const StableModel& m, int grid) {
    require(grid >= 64, "nondegeneracy_constant: grid >= 64");
    Nondegeneracy res;
    res.c = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        double t = kPi * i / grid;  // Phi is symmetric: half circle suffices
        double v = char_exponent(m, unit_vector(t));
        if (v < res.c) {
            res.c = v;
            res.theta_min = t;
        }
    }
    // golden-section refinement around the best grid angle
    double h = kPi / grid;
    double a = res.theta_min - h, b = res.theta_min + h;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = char_exponent(m, unit_vector(x1)), f2 = char_exponent(m, unit_vector(x2));
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = char_exponent(m, unit_vector(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = char_exponent(m, unit_vector(x2));
        }
    }
    double tm = 0.5 * (a + b);
    double vm = char_exponent(m, unit_vector(tm));
    if (vm < res.c) {
        res.c = vm;
        res.theta_min = tm;
    }
    return res;
}

namespace {

// Direction sampler state for arc measures: cumulative masses.
double sample_direction(const SpectralMeasure& mu, std::mt19937_64& rng) {
    if (mu.is_arc_measure()) {
        const auto& arcs = mu.arcs();
        double u = uniform01(rng) * mu.total_mass();
        double acc = 0.0;
        for (const Arc& a : arcs) {
            double mass = 2.0 * a.half_width * a.density;
            acc += mass;
            if (u <= acc || &a == &arcs.back()) {
                double v = uniform01(rng);
                return a.center + (2.0 * v - 1.0) * a.half_width;
            }
        }
    }
    // rejection against the bound
    for (;;) {
        double t = uniform01(rng) * 2.0 * kPi;
        if (uniform01(rng) * mu.bound() <= mu.density(t)) return t;
    }
}

}  // namespace

Vec2 sample_jump(const StableModel& m, double eps, std::mt19937_64& rng) {
    require(eps > 0.0, "sample_jump: eps > 0");
    require(m.measure.total_mass() > 0.0, "sample_jump: empty measure");
    double theta = sample_direction(m.measure, rng);
    double u = uniform01(rng);
    if (u <= 0.0) u = std::numeric_limits<double>::min();
    double radius = eps * std::pow(u, -1.0 / m.alpha);
    return unit_vector(theta) * radius;
}

double jump_rate(const StableModel& m, double eps) {
    require(eps > 0.0, "jump_rate: eps > 0");
    return m.kappa * m.measure.total_mass() * std::pow(eps, -m.alpha) / m.alpha;
}

namespace {

// Truncated second moment matrix Sigma(eps) = int_{|y|<=eps} y y^T nu(dy)
// = kappa eps^{2-alpha}/(2-alpha) * int f_mu(t) eta eta^T dt.
struct Chol2 {
    double l11, l21, l22;
};

Chol2 small_jump_cholesky(const StableModel& m, double eps) {
    auto q11 = [&](double t) { return m.measure.density(t) * sq(std::cos(t)); };
    auto q22 = [&](double t) { return m.measure.density(t) * sq(std::sin(t)); };
    auto q12 = [&](double t) { return m.measure.density(t) * std::cos(t) * std::sin(t); };
    double tol = 1e-10 * std::max(1.0, m.measure.total_mass());
    double a11 = integrate_adaptive(q11, 0.0, 2.0 * kPi, tol);
    double a22 = integrate_adaptive(q22, 0.0, 2.0 * kPi, tol);
    double a12 = integrate_adaptive(q12, 0.0, 2.0 * kPi, tol);
    double s = m.kappa * std::pow(eps, 2.0 - m.alpha) / (2.0 - m.alpha);
    a11 *= s;
    a22 *= s;
    a12 *= s;
    Chol2 c;
    c.l11 = std::sqrt(std::max(a11, 0.0));
    c.l21 = c.l11 > 0.0 ? a12 / c.l11 : 0.0;
    c.l22 = std::sqrt(std::max(a22 - c.l21 * c.l21, 0.0));
    return c;
}

}  // namespace

ExitRecord simulate_exit(const StableModel& m, Vec2 x0, double R, const ExitSimConfig& cfg,
                         std::mt19937_64& rng) {
    require(R > 0.0, "simulate_exit: R > 0");
    require(x0.norm() < R, "simulate_exit: x0 must start inside the ball");
    double eps = cfg.eps > 0.0 ? cfg.eps : 1e-3 * R;
    require(eps <= R / 100.0, "simulate_exit: eps must be <= R/100");
    bool compensate = cfg.gaussian_compensation;
    if (m.alpha >= 1.0)
        require(compensate,
                "simulate_exit: alpha >= 1 requires gaussian_compensation (small jumps are "
                "not negligible)");

    double lambda = jump_rate(m, eps);
    Chol2 chol{0.0, 0.0, 0.0};
    if (compensate) chol = small_jump_cholesky(m, eps);

    ExitRecord rec;
    rec.start = x0;
    Vec2 x = x0;
    double t = 0.0;
    std::uint64_t jumps = 0;
    std::normal_distribution<double> gauss(0.0, 1.0);

    while (jumps < cfg.max_jumps) {
        double u = uniform01(rng);
        if (u <= 0.0) u = std::numeric_limits<double>::min();
        double wait = -std::log(u) / lambda;
        t += wait;
        if (compensate) {
            double z1 = gauss(rng), z2 = gauss(rng);
            double s = std::sqrt(wait);
            x += Vec2(s * chol.l11 * z1, s * (chol.l21 * z1 + chol.l22 * z2));
            if (x.norm() >= R) {
                rec.exit_position = x;
                rec.exit_time = t;
                rec.jumps = jumps;
                rec.complete = true;
                rec.compensated_exit = true;
                break;
            }
        }
        x += sample_jump(m, eps, rng);
        ++jumps;
        if (x.norm() >= R) {
            rec.exit_position = x;
            rec.exit_time = t;
            rec.jumps = jumps;
            rec.complete = true;
            break;
        }
    }
    if (!rec.complete) {
        rec.exit_position = x;
        rec.exit_time = t;
        rec.jumps = jumps;
    }
    rec.small_jump_bound =
        m.alpha < 1.0 && !compensate
            ? m.kappa * m.measure.total_mass() * std::pow(eps, 1.0 - m.alpha) /
                  (1.0 - m.alpha) * rec.exit_time
            : 0.0;
    return rec;
}

std::vector<ExitRecord> simulate_exit_batch(const StableModel& m, Vec2 x0, double R,
                                            const ExitSimConfig& cfg, std::size_t n_paths,
                                            std::uint64_t seed, unsigned threads) {
    std::vector<ExitRecord> out(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        std::mt19937_64 rng = make_path_rng(seed, i);
        out[i] = simulate_exit(m, x0, R, cfg, rng);
    });
    return out;
}

// ---- External interfaces ----

std::string measure_to_json(const SpectralMeasure& mu) {
    require(mu.is_arc_measure(), "measure_to_json: only arc measures serialize");
    nlohmann::json j;
    j["kind"] = "arcs";
    j["mirrored"] = true;
    j["bound"] = mu.bound();
    j["total_mass"] = mu.total_mass();
    j["isotropic"] = mu.is_isotropic();
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < mu.base_arc_count(); ++i) {
        const Arc& a = mu.arcs()[i];
        arr.push_back({{"center", a.center},
                       {"half_width", a.half_width},
                       {"density", a.density},
                       {"chord_radius", a.chord_radius}});
    }
    j["arcs"] = arr;
    return j.dump(2);
}

SpectralMeasure measure_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    require(j.at("kind") == "arcs", "measure_from_json: unsupported kind");
    std::vector<Arc> arcs;
    for (const auto& ja : j.at("arcs")) {
        Arc a;
        a.center = ja.at("center").get<double>();
        a.half_width = ja.at("half_width").get<double>();
        a.density = ja.at("density").get<double>();
        a.chord_radius = ja.value("chord_radius", 0.0);
        arcs.push_back(a);
    }
    SpectralMeasure mu = SpectralMeasure::from_arcs(arcs);
    return mu;
}

std::string exit_records_csv(const std::vector<ExitRecord>& records) {
    std::ostringstream os;
    os << "x0_x,x0_y,exit_x,exit_y,tau,jumps,complete,compensated_exit,small_jump_bound\n";
    char buf[512];
    for (const ExitRecord& r : records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%llu,%d,%d,%.17g\n",
                      r.start.x, r.start.y, r.exit_position.x, r.exit_position.y, r.exit_time,
                      static_cast<unsigned long long>(r.jumps), r.complete ? 1 : 0,
                      r.compensated_exit ? 1 : 0, r.small_jump_bound);
        os << buf;
    }
    return os.str();
}

}  // namespace levy
