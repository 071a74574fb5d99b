#include "levyharnack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace levy {

template <class S>
GeometryCore<S> geometry_core(const S& t0, const S& t1, const S& t2) {
    const S one(1.0), two(2.0), half(0.5);
    GeometryCore<S> g;
    g.i = two + t1 + t2;
    g.p = t2 - t1;
    g.pp = t1 - t0;
    g.h = g.p * g.p * (one + t1) + g.pp * g.i * (one + t2);
    g.delta = g.i * (one + t0) * (one + t2) / g.h;
    g.x = two * g.delta * ((one + t1) / t1) * (g.p / g.i) + one / t1;
    g.y = (one + t0 - g.delta * g.pp) / (one + t1);
    g.c = (g.delta + g.y) * t1 + g.y;
    g.d = (g.delta - g.y) * t2 - g.y;
    g.delta_p = (g.delta * (one + t1) + g.y * g.i) / (one + t2);
    g.j = two * t1 * t2 + t1 + t2;
    g.sx = half * (g.delta + g.y) * (g.i / (one + t2));
    g.sy = half * (g.delta + g.y) * (g.j / (one + t2));
    g.r = half * (g.delta * g.p - g.y * g.i) / (one + t2);
    return g;
}

template GeometryCore<double> geometry_core<double>(const double&, const double&, const double&);
template GeometryCore<LogPos> geometry_core<LogPos>(const LogPos&, const LogPos&, const LogPos&);

namespace {

GeometryCore<double> to_logs(const GeometryCore<LogPos>& g) {
    GeometryCore<double> out;
    out.i = g.i.log();
    out.p = g.p.log();
    out.pp = g.pp.log();
    out.h = g.h.log();
    out.j = g.j.log();
    out.delta = g.delta.log();
    out.x = g.x.log();
    out.y = g.y.log();
    out.c = g.c.log();
    out.d = g.d.log();
    out.delta_p = g.delta_p.log();
    out.sx = g.sx.log();
    out.sy = g.sy.log();
    out.r = g.r.log();
    return out;
}

bool all_finite(const GeometryCore<double>& g) {
    for (double v : {g.i, g.p, g.pp, g.h, g.j, g.delta, g.x, g.y, g.c, g.d, g.delta_p, g.sx,
                     g.sy, g.r})
        if (!std::isfinite(v)) return false;
    return true;
}

GeometryRecord build_record(double t0, double t1, double t2, double lt0, double lt1, double lt2,
                            int n) {
    require(t0 > 0.0 && t1 > t0 && t2 > t1,
            "geometry_record: tangent triple must satisfy 0 < t0 < t1 < t2");
    GeometryRecord rec;
    rec.n = n;
    rec.t0 = t0;
    rec.t1 = t1;
    rec.t2 = t2;
    rec.log_t0 = lt0;
    rec.log_t1 = lt1;
    rec.log_t2 = lt2;

    try {
        GeometryCore<LogPos> gl = geometry_core(LogPos::from_log(lt0), LogPos::from_log(lt1),
                                                LogPos::from_log(lt2));
        rec.lg = to_logs(gl);
    } catch (const std::domain_error&) {
        // A non-positive difference in the formulas: delta*P <= y*I (r_n <= 0)
        // or a broken triple. Report, never clamp.
        throw std::domain_error(
            "geometry_record: non-positive quantity (r_n <= 0?) at n = " + std::to_string(n));
    }

    rec.v = geometry_core(t0, t1, t2);
    rec.double_path_valid = all_finite(rec.v);
    if (!rec.double_path_valid) {
        // Intermediates overflowed; export the log-path values where they fit.
        GeometryCore<double> v;
        v.i = std::exp(rec.lg.i);
        v.p = std::exp(rec.lg.p);
        v.pp = std::exp(rec.lg.pp);
        v.h = std::exp(rec.lg.h);
        v.j = std::exp(rec.lg.j);
        v.delta = std::exp(rec.lg.delta);
        v.x = std::exp(rec.lg.x);
        v.y = std::exp(rec.lg.y);
        v.c = std::exp(rec.lg.c);
        v.d = std::exp(rec.lg.d);
        v.delta_p = std::exp(rec.lg.delta_p);
        v.sx = std::exp(rec.lg.sx);
        v.sy = std::exp(rec.lg.sy);
        v.r = std::exp(rec.lg.r);
        rec.v = v;
    }
    rec.domain_ok = rec.lg.delta < 0.0 && rec.lg.delta_p < rec.lg.delta &&
                    rec.lg.y < std::log(0.5);
    return rec;
}

}  // namespace

GeometryRecord geometry_record(const SequencePair& seq, int n) {
    const SequenceEntry& e = seq.at(n);
    require(e.angle_valid && e.t0 > 0.0, "geometry_record: entry has no valid tangent triple");
    return build_record(e.t0, e.t1, e.t2, e.log_t0, e.log_t1, e.log_t2, n);
}

GeometryRecord geometry_record_from_tangents(double t0, double t1, double t2, int n) {
    return build_record(t0, t1, t2, std::log(t0), std::log(t1), std::log(t2), n);
}

bool GeometryReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const IdentityCheck& GeometryReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("GeometryReport: no check named " + name);
}

namespace {

// Sample points for the eps-interval (delta', delta): endpoints plus interior.
std::vector<double> eps_samples(double lo, double hi) {
    std::vector<double> eps;
    eps.push_back(lo);
    eps.push_back(0.5 * (lo + hi));
    eps.push_back(hi * (1.0 - 1e-12));
    for (int k = 1; k <= 8; ++k) eps.push_back(lo + (hi - lo) * k / 9.0);
    return eps;
}

}  // namespace

GeometryReport verify_geometry(const GeometryRecord& rec) {
    GeometryReport rep;
    rep.log_space = rec.log_t2 >= 30.0;
    rep.tolerance = rep.log_space ? 1e-6 : 1e-9;
    const double tol = rep.tolerance;

    auto add_eq = [&](const std::string& name, double lhs, double rhs) {
        double res = rep.log_space ? std::abs(lhs - rhs) : rel_residual(lhs, rhs);
        rep.checks.push_back({name, res, res <= tol});
    };
    // Inequality lhs <= rhs, margin reported as a signed residual.
    auto add_le = [&](const std::string& name, double lhs, double rhs) {
        double res = rep.log_space ? lhs - rhs : (lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        rep.checks.push_back({name, res, res <= tol});
    };

    if (!rep.log_space) {
        const GeometryCore<double>& g = rec.v;
        add_eq("d_identity", g.d, (g.delta + g.x) * rec.t1 - 1.0);
        add_eq("c_identity", g.c, (g.delta + 1.0) * rec.t0 + 1.0);
        add_eq("box_left", g.sx - g.r, g.delta_p);
        add_eq("box_right", g.sx + g.r, g.delta);
        add_eq("box_bottom", g.sy - g.r, g.c);
        add_eq("box_top", g.sy + g.r, g.c + (g.delta - g.delta_p));
        bool strip_ok = true, cone_ok = true;
        double strip_worst = -std::numeric_limits<double>::infinity();
        double cone_worst = -std::numeric_limits<double>::infinity();
        for (double eps : eps_samples(g.delta_p, g.delta)) {
            double lo_req = (eps + 1.0) * rec.t0 + 1.0;          // must be <= c
            double hi_req = (eps + g.x) * rec.t1 - 1.0;          // must be >= c + (delta-delta')
            double top = g.c + (g.delta - g.delta_p);
            double m1 = (lo_req - g.c) / std::max(std::abs(g.c), 1.0);
            double m2 = (top - hi_req) / std::max(std::abs(top), 1.0);
            strip_worst = std::max(strip_worst, std::max(m1, m2));
            if (m1 > tol || m2 > tol) strip_ok = false;
            double yp1 = (eps + g.y) * rec.t1 + g.y;
            double yp2 = (eps - g.y) * rec.t2 - g.y;
            double m3 = (yp1 - g.c) / std::max(std::abs(g.c), 1.0);
            double m4 = (top - yp2) / std::max(std::abs(top), 1.0);
            cone_worst = std::max(cone_worst, std::max(m3, m4));
            if (m3 > tol || m4 > tol) cone_ok = false;
        }
        rep.checks.push_back({"strip_containment", strip_worst, strip_ok});
        rep.checks.push_back({"cone_boundaries", cone_worst, cone_ok});
        add_le("delta_order", g.delta_p, g.delta);
        add_le("cd_order", g.c, g.d);
    } else {
        const GeometryCore<double>& g = rec.lg;  // natural logs
        LogPos one(1.0);
        LogPos t0 = LogPos::from_log(rec.log_t0), t1 = LogPos::from_log(rec.log_t1),
               t2 = LogPos::from_log(rec.log_t2);
        LogPos delta = LogPos::from_log(g.delta), x = LogPos::from_log(g.x),
               y = LogPos::from_log(g.y), c = LogPos::from_log(g.c),
               dp = LogPos::from_log(g.delta_p), sx = LogPos::from_log(g.sx),
               sy = LogPos::from_log(g.sy), r = LogPos::from_log(g.r);
        auto safe_sub_log = [](LogPos a, LogPos b) {
            return (a > b) ? (a - b).log() : std::numeric_limits<double>::infinity();
        };
        add_eq("d_identity", g.d, safe_sub_log((delta + x) * t1, one));
        add_eq("c_identity", g.c, ((delta + one) * t0 + one).log());
        add_eq("box_left", safe_sub_log(sx, r), g.delta_p);
        add_eq("box_right", (sx + r).log(), g.delta);
        add_eq("box_bottom", safe_sub_log(sy, r), g.c);
        add_eq("box_top", (sy + r).log(), (c + (delta - dp)).log());
        bool strip_ok = true, cone_ok = true;
        double strip_worst = -std::numeric_limits<double>::infinity();
        double cone_worst = -std::numeric_limits<double>::infinity();
        LogPos top = c + (delta - dp);
        for (double le : eps_samples(g.delta_p, g.delta)) {
            LogPos eps = LogPos::from_log(le);
            double lo_req = ((eps + one) * t0 + one).log();
            double hi_req = safe_sub_log((eps + x) * t1, one);
            double m1 = lo_req - c.log();
            double m2 = top.log() - hi_req;
            strip_worst = std::max(strip_worst, std::max(m1, m2));
            if (m1 > tol || m2 > tol) strip_ok = false;
            double yp1 = ((eps + y) * t1 + y).log();
            double yp2 = (eps > y) ? safe_sub_log((eps - y) * t2, y)
                                   : -std::numeric_limits<double>::infinity();
            double m3 = yp1 - c.log();
            double m4 = top.log() - yp2;
            cone_worst = std::max(cone_worst, std::max(m3, m4));
            if (m3 > tol || m4 > tol) cone_ok = false;
        }
        rep.checks.push_back({"strip_containment", strip_worst, strip_ok});
        rep.checks.push_back({"cone_boundaries", cone_worst, cone_ok});
        add_le("delta_order", g.delta_p, g.delta);
        add_le("cd_order", g.c, g.d);
    }
    return rep;
}

ConeInterval cone_interval(Vec2 w, double delta, int n, const SequencePair& seq) {
    require(delta > 0.0, "cone_interval: delta > 0");
    ConeInterval iv;
    iv.abscissa = delta;
    iv.low = (w.x + delta) * seq.lower_edge_tan(n) + w.y;
    iv.high = (1.0 + delta) * seq.at(n).t0 + w.y;
    return iv;
}

int disjointness_index(const SequencePair& seq, double delta, double x) {
    require(delta > 0.0 && delta < 1.0 && x > 0.0 && x < 1.0,
            "disjointness_index: delta, x in (0,1)");
    int last_fail = 0;
    for (int n = 1; n <= seq.max_n(); ++n) {
        const SequenceEntry& e = seq.at(n);
        bool disjoint = e.angle_valid && (1.0 + delta) * e.t0 <= (x + delta) * e.t1;
        if (!disjoint) last_fail = n;
    }
    if (last_fail == seq.max_n())
        throw std::runtime_error("disjointness_index: stored range exhausted (length " +
                                 std::to_string(seq.max_n()) + ") without finding n0");
    return last_fail + 1;
}

HarnackTerms harnack_terms(const GeometryRecord& rec, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "harnack_terms: alpha in (0,1)");
    HarnackTerms t;
    if (!(rec.lg.y < std::log(0.5)))
        throw std::domain_error("harnack_terms: y_n >= 1/2 at n = " + std::to_string(rec.n) +
                                " (b_n formula invalid)");
    if (rec.log_t2 < 300.0 && rec.double_path_valid) {
        const GeometryCore<double>& g = rec.v;
        t.a = std::pow((2.0 * g.delta - g.delta_p + 2.0 * g.y + 1.0) / ((g.delta + 1.0) * rec.t0) +
                           1.0,
                       alpha + 2.0);
        t.b = (g.delta + g.x) / (std::pow(g.y, alpha) * std::pow(1.0 - 2.0 * g.y, alpha));
        t.r1 = 2.0 * ((1.0 + rec.t1) / rec.t1) * ((1.0 + rec.t2) / g.p);
        t.r2 = (1.0 + rec.t1) / ((1.0 + rec.t0) * rec.t1);
        t.r3 = (g.i * (1.0 + rec.t2) / (g.p * g.p)) * (g.pp / rec.t1) / (1.0 + rec.t0);
        t.delta_over_y = g.i * (1.0 + rec.t2) / (g.p * g.p);
    } else {
        // Tangent products overflow doubles here; assemble from logs.
        LogPos one(1.0), two(2.0);
        LogPos t0 = LogPos::from_log(rec.log_t0), t1 = LogPos::from_log(rec.log_t1),
               t2 = LogPos::from_log(rec.log_t2);
        LogPos delta = LogPos::from_log(rec.lg.delta), x = LogPos::from_log(rec.lg.x),
               y = LogPos::from_log(rec.lg.y), dp = LogPos::from_log(rec.lg.delta_p),
               i = LogPos::from_log(rec.lg.i), p = LogPos::from_log(rec.lg.p),
               pp = LogPos::from_log(rec.lg.pp);
        LogPos numer = two * delta + two * y + one - dp;  // 2 delta - delta' + 2y + 1 > 0
        double base_log = (numer / ((delta + one) * t0)).log();
        t.a = std::pow(std::exp(base_log) + 1.0, alpha + 2.0);
        double one_minus_2y = 1.0 - 2.0 * std::exp(rec.lg.y);
        t.b = std::exp((delta + x).log() - alpha * rec.lg.y) / std::pow(one_minus_2y, alpha);
        t.r1 = std::exp((two * ((one + t1) / t1) * ((one + t2) / p)).log());
        t.r2 = std::exp(((one + t1) / ((one + t0) * t1)).log());
        t.r3 = std::exp(((i * (one + t2) / (p * p)) * (pp / t1) / (one + t0)).log());
        t.delta_over_y = std::exp((i * (one + t2) / (p * p)).log());
    }
    return t;
}

std::string geometry_table_csv(const SequencePair& seq, double alpha) {
    std::ostringstream os;
    os << "n,delta,x,y,c,d,delta_prime,r,a,b,max_identity_residual,domain_ok\n";
    char buf[1024];
    for (int n = 1; n <= seq.max_n(); ++n) {
        GeometryRecord rec = geometry_record(seq, n);
        GeometryReport rep = verify_geometry(rec);
        double worst = 0.0;
        for (const auto& c : rep.checks) worst = std::max(worst, std::abs(c.residual));
        HarnackTerms t = harnack_terms(rec, alpha);
        std::snprintf(buf, sizeof(buf),
                      "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", n,
                      rec.v.delta, rec.v.x, rec.v.y, rec.v.c, rec.v.d, rec.v.delta_p, rec.v.r,
                      t.a, t.b, worst, rec.domain_ok ? 1 : 0);
        os << buf;
    }
    return os.str();
}

std::string geometry_records_json(const SequencePair& seq, double alpha) {
    nlohmann::json arr = nlohmann::json::array();
    for (int n = 1; n <= seq.max_n(); ++n) {
        GeometryRecord rec = geometry_record(seq, n);
        HarnackTerms t = harnack_terms(rec, alpha);
        nlohmann::json j;
        j["n"] = n;
        j["t0"] = rec.t0;
        j["t1"] = rec.t1;
        j["t2"] = rec.t2;
        j["log_t2"] = rec.log_t2;
        j["I"] = rec.v.i;
        j["P"] = rec.v.p;
        j["P_prime"] = rec.v.pp;
        j["H"] = rec.v.h;
        j["J"] = rec.v.j;
        j["delta"] = rec.v.delta;
        j["x"] = rec.v.x;
        j["y"] = rec.v.y;
        j["c"] = rec.v.c;
        j["d"] = rec.v.d;
        j["delta_prime"] = rec.v.delta_p;
        j["S"] = {rec.v.sx, rec.v.sy};
        j["r"] = rec.v.r;
        j["a"] = t.a;
        j["b"] = t.b;
        j["domain_ok"] = rec.domain_ok;
        arr.push_back(j);
    }
    nlohmann::json root;
    root["alpha"] = alpha;
    root["records"] = arr;
    return root.dump(2);
}

}  // namespace levy
