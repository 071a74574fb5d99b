#include "levyharnack/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "levyharnack/common.hpp"

namespace levy {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = simpson(a, fa, b, fb, fm);
    return adaptive_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& rule = gauss_legendre(n);
    double c = 0.5 * (b - a), d = 0.5 * (a + b), sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(c * rule.nodes[i] + d);
    return c * sum;
}

namespace {

// Series and continued-fraction halves of the regularized incomplete gamma,
// after Numerical Recipes.
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double one_minus_cos_moment(double alpha) {
    require(alpha > 0.0 && alpha < 2.0, "one_minus_cos_moment: alpha in (0,2)");
    // [0, s0] by the cosine series (the integrand ~ s^{1-alpha}/2 blows up at 0
    // for alpha > 1 but stays integrable); the remainder by quadrature.
    const double s0 = 0.1;
    double total = 0.0;
    double sign = 1.0, fact = 2.0;  // (2k)!
    for (int k = 1; k <= 5; ++k) {
        double p = 2.0 * k - alpha;
        total += sign * std::pow(s0, p) / (fact * p);
        sign = -sign;
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    auto f = [alpha](double s) { return (1.0 - std::cos(s)) / std::pow(s, 1.0 + alpha); };
    total += integrate_adaptive(f, s0, 2.0 * kPi, 1e-13);
    const int periods = 400;
    for (int k = 1; k < periods; ++k)
        total += integrate_gauss(f, 2.0 * kPi * k, 2.0 * kPi * (k + 1), 24);
    // Tail beyond T: T^-a/a - int_T^inf cos(s) s^{-1-a} ds, the oscillatory
    // part by two integrations by parts (remainder O(T^{-3-a})).
    double T = 2.0 * kPi * periods;
    double g = std::pow(T, -1.0 - alpha);
    double gp = -(1.0 + alpha) * std::pow(T, -2.0 - alpha);
    double osc = -std::sin(T) * g - std::cos(T) * gp;
    total += std::pow(T, -alpha) / alpha - osc;
    return total;
}

double one_minus_cos_moment_closed(double alpha) {
    require(alpha > 0.0 && alpha < 2.0, "alpha in (0,2)");
    if (std::abs(alpha - 1.0) < 1e-12) return 0.5 * kPi;
    return std::tgamma(2.0 - alpha) * std::cos(0.5 * kPi * alpha) / (alpha * (1.0 - alpha));
}

double halton(std::size_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

std::vector<std::pair<double, double>> halton_disk(std::size_t count, double radius) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(count);
    std::size_t i = 1;
    while (pts.size() < count) {
        double u = 2.0 * halton(i, 2) - 1.0;
        double v = 2.0 * halton(i, 3) - 1.0;
        ++i;
        if (u * u + v * v < 1.0) pts.emplace_back(radius * u, radius * v);
    }
    return pts;
}

double periodic_cubic(const std::vector<double>& table, double theta) {
    const std::size_t n = table.size();
    double t = theta / (2.0 * kPi) * n;
    t -= std::floor(t / n) * n;
    std::size_t i1 = static_cast<std::size_t>(std::floor(t)) % n;
    double u = t - std::floor(t);
    std::size_t i0 = (i1 + n - 1) % n, i2 = (i1 + 1) % n, i3 = (i1 + 2) % n;
    double p0 = table[i0], p1 = table[i1], p2 = table[i2], p3 = table[i3];
    return p1 + 0.5 * u * (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                          u * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace levy
