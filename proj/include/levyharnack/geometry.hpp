#pragma once

#include <string>
#include <vector>

#include "levyharnack/common.hpp"
#include "levyharnack/logspace.hpp"
#include "levyharnack/sequences.hpp"

namespace levy {

// Per-n quantities of the two ball-construction propositions. Everything is a
// function of the tangent triple (t0, t1, t2) alone.
template <class S>
struct GeometryCore {
    S i, p, pp, h, j;             // I_n, P_n, P_n', H_n, J_n
    S delta, x, y, c, d, delta_p; // delta_n, x_n, y_n, c_n, d_n, delta_n'
    S sx, sy, r;                  // ball center S_n and radius r_n
};

template <class S>
GeometryCore<S> geometry_core(const S& t0, const S& t1, const S& t2);

struct GeometryRecord {
    int n = 0;
    double t0 = 0.0, t1 = 0.0, t2 = 0.0;
    double log_t0 = 0.0, log_t1 = 0.0, log_t2 = 0.0;
    GeometryCore<double> v;    // plain 64-bit values (intermediates can overflow at huge n)
    GeometryCore<double> lg;   // natural logs of the same fields; always finite
    bool double_path_valid = false;
    // Paper-domain constraints: 0 < delta' < delta < 1 and y < 1/2. Violations
    // are reported, never clamped (x_n > 1 is harmless and not flagged).
    bool domain_ok = false;

    Vec2 ball_center() const { return {v.sx, v.sy}; }
    double ball_radius() const { return v.r; }
};

// Computes the record; throws std::domain_error if delta*P <= y*I (r_n <= 0:
// the sequence does not grow fast enough at this n).
GeometryRecord geometry_record(const SequencePair& seq, int n);
GeometryRecord geometry_record_from_tangents(double t0, double t1, double t2, int n = 0);

struct IdentityCheck {
    std::string name;
    double residual = 0.0;  // relative (double path) or |log lhs - log rhs| (log path)
    bool pass = false;
};

struct GeometryReport {
    std::vector<IdentityCheck> checks;
    bool log_space = false;  // log t2 >= 30: verified in log space at 1e-6
    double tolerance = 0.0;
    bool all_pass() const;
    const IdentityCheck& check(const std::string& name) const;
};

// Identity and containment checks, each reported with its residual:
// d_n and c_n closed forms, the four ball-box equalities, the Delta-strip
// containment inequalities and the cone boundary inequalities sampled over
// eps in {delta', midpoint, delta*(1-1e-12)} plus 8 interior points.
GeometryReport verify_geometry(const GeometryRecord& rec);

struct ConeInterval {
    double abscissa = 0.0;
    double low = 0.0, high = 0.0;
    bool empty() const { return !(low < high); }
};

// Interval of ordinates of the shifted cone trace at abscissa delta:
// ((w1+delta) tan(A_{n-1}+B_n) + w2, (1+delta) tan(A_n+B_n) + w2).
ConeInterval cone_interval(Vec2 w, double delta, int n, const SequencePair& seq);

// Smallest n0 with (1+delta) tan(A_n+B_n) <= (x+delta) tan(A_n+B_{n+1}) for
// every stored n >= n0. Throws std::runtime_error when the stored range is
// exhausted without finding one.
int disjointness_index(const SequencePair& seq, double delta, double x);

struct HarnackTerms {
    double a = 0.0;   // ((2 delta - delta' + 2y + 1)/((delta+1) t0) + 1)^(alpha+2)
    double b = 0.0;   // (delta + x) / (y^alpha (1-2y)^alpha)
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;  // x/y = r1 + r2 + r3
    double delta_over_y = 0.0;            // = I (1+t2) / P^2
};

// Bound factors of the Harnack-failure theorem; throws std::domain_error when
// y_n >= 1/2 (the b_n formula is invalid there), naming the offending n.
HarnackTerms harnack_terms(const GeometryRecord& rec, double alpha);

// External interfaces.
std::string geometry_table_csv(const SequencePair& seq, double alpha);
std::string geometry_records_json(const SequencePair& seq, double alpha);

}  // namespace levy
