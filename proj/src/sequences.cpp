#include "levyharnack/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "levyharnack/numerics.hpp"

namespace levy {

namespace {

// atan(hi) - atan(lo) for 0 < lo < hi, via atan((hi-lo)/(1+hi*lo)); the
// product is taken in log space when it would overflow.
double angle_gap(double lo, double hi, double log_lo, double log_hi) {
    if (log_lo + log_hi < 700.0) return std::atan2(hi - lo, 1.0 + hi * lo);
    // 1/lo - 1/hi, both tiny; atan(x) = x to double precision here.
    return std::exp(-log_lo) - std::exp(-log_hi);
}

// Midpoint of the admissible angle interval (atan(T), pi/2) in tangent
// coordinates: tan((atan(T)+pi/2)/2) = (1+s+T)/(1+1/(s+T)), s = sqrt(1+T^2).
double tangent_angle_midpoint(double T) {
    if (T > 1e150) return 2.0 * T;  // asymptote 2T + 1/(2T), exact in doubles
    double s = std::hypot(1.0, T);
    return (1.0 + s + T) / (1.0 + 1.0 / (s + T));
}

}  // namespace

const SequenceEntry& SequencePair::at(int n) const {
    require(n >= 1 && n <= max_n(), "SequencePair::at: index out of range");
    return entries[static_cast<std::size_t>(n - 1)];
}

double SequencePair::lower_edge_tan(int n) const {
    require(n >= 1 && n <= max_n(), "lower_edge_tan: index out of range");
    return n == 1 ? tan_b1 : entries[static_cast<std::size_t>(n - 2)].t1;
}

double SequencePair::lower_edge_log_tan(int n) const {
    require(n >= 1 && n <= max_n(), "lower_edge_log_tan: index out of range");
    return n == 1 ? log_tan_b1 : entries[static_cast<std::size_t>(n - 2)].log_t1;
}

SequencePair construct_sequences(double c, int n_max, FillRule rule, double log_ceiling) {
    require(c > 1.0, "construct_sequences: c must be > 1");
    require(n_max >= 1, "construct_sequences: n_max must be >= 1");

    SequencePair seq;
    seq.c = c;
    seq.K = (c + 2.0) / (c - 1.0);
    seq.rule = rule;
    seq.alpha1 = kPi / 8.0;
    seq.beta1 = kPi / 8.0;
    seq.tan_b1 = std::tan(seq.beta1);
    seq.log_tan_b1 = std::log(seq.tan_b1);
    seq.entries.reserve(static_cast<std::size_t>(n_max));

    double t0 = std::tan(seq.alpha1 + seq.beta1);  // = 1
    double log_t0 = std::log(t0);

    for (int n = 1; n <= n_max; ++n) {
        double rho = (rule == FillRule::midpoint) ? std::max<double>(n + 1, 2.0 * seq.K)
                                                  : std::max<double>(n + 1, 3.0);
        double t1 = rho * t0;
        double log_t1 = std::log(rho) + log_t0;
        double t2, log_t2;
        if (rule == FillRule::midpoint) {
            double T = seq.K * t1;
            t2 = tangent_angle_midpoint(T);
            log_t2 = (T > 1e150) ? std::log(2.0) + std::log(seq.K) + log_t1 : std::log(t2);
        } else {
            t2 = 1.1 * seq.K * t1;
            log_t2 = std::log(1.1 * seq.K) + log_t1;
        }
        if (log_t2 > log_ceiling) {
            seq.truncated = true;
            std::ostringstream os;
            os << "precision ceiling: log t2 = " << log_t2 << " > " << log_ceiling
               << " at n = " << n << "; last valid n = " << (n - 1);
            seq.warning = os.str();
            break;
        }

        SequenceEntry e;
        e.n = n;
        if (n == 1) {
            e.alpha = seq.alpha1;
            e.beta = seq.beta1;
        } else {
            // alpha_n = (A_n+B_n) - (A_{n-1}+B_n), beta_n = (A_{n-1}+B_n) - (A_{n-1}+B_{n-1}),
            // both from the previous entry's tangent triple.
            const SequenceEntry& prev = seq.entries.back();
            e.alpha = angle_gap(prev.t1, prev.t2, prev.log_t1, prev.log_t2);
            e.beta = angle_gap(prev.t0, prev.t1, prev.log_t0, prev.log_t1);
        }
        e.t0 = t0;
        e.t1 = t1;
        e.t2 = t2;
        e.log_t0 = log_t0;
        e.log_t1 = log_t1;
        e.log_t2 = log_t2;
        seq.entries.push_back(e);
        t0 = t2;
        log_t0 = log_t2;
    }
    return seq;
}

ConditionReport verify_lemma_conditions(const SequencePair& seq, int n) {
    const SequenceEntry& e = seq.at(n);
    ConditionReport rep;
    const double inf = std::numeric_limits<double>::infinity();

    rep.angle_below_half_pi =
        e.angle_valid && std::isfinite(e.t0) && std::isfinite(e.t2) && e.t0 > 0.0 && e.t1 > 0.0 && e.t2 > 0.0;
    rep.margin_cot = e.t0 > 0.0 ? 1.0 / e.t0 : -1.0;

    if (n == 1) {
        rep.sum_increasing = true;
        rep.margin_increase = inf;
    } else {
        const SequenceEntry& p = seq.at(n - 1);
        rep.sum_increasing = e.t0 > p.t0 && p.t0 > 0.0;
        rep.margin_increase = p.t0 != 0.0 ? e.t0 / p.t0 : inf;
    }

    // (3): compared as products so "ratio exactly n+1" passes bit-for-bit.
    rep.ratio_condition = e.t1 >= (n + 1.0) * e.t0 && e.t0 > 0.0;
    rep.margin_ratio = (e.t1 / e.t0) / (n + 1.0);

    rep.tan_inequality = (seq.c + 2.0) * e.t1 <= (seq.c - 1.0) * e.t2 && e.t1 > 0.0;
    rep.margin_tan = e.t2 / (seq.K * e.t1);
    return rep;
}

// ---- Candidate families ----

CandidateFamily CandidateFamily::power2_harmonic() {
    CandidateFamily f;
    f.id = FamilyId::power2_harmonic;
    return f;
}

CandidateFamily CandidateFamily::geometric(double a, double b) {
    require(b > 1.0 && a >= b, "geometric family requires 1 < b <= a");
    CandidateFamily f;
    f.id = FamilyId::geometric;
    f.a = a;
    f.b = b;
    return f;
}

CandidateFamily CandidateFamily::harmonic_polylog(double delta_val) {
    require(delta_val > 0.0, "harmonic_polylog requires delta > 0");
    CandidateFamily f;
    f.id = FamilyId::harmonic_polylog;
    f.delta = delta_val;
    return f;
}

CandidateFamily CandidateFamily::gaussian_exp(double a, double b) {
    require(a > 1.0 && b > 1.0, "gaussian_exp requires a, b > 1");
    CandidateFamily f;
    f.id = FamilyId::gaussian_exp;
    f.a = a;
    f.b = b;
    return f;
}

std::string CandidateFamily::name() const {
    switch (id) {
        case FamilyId::power2_harmonic: return "power2_harmonic";
        case FamilyId::geometric: return "geometric";
        case FamilyId::harmonic_polylog: return "harmonic_polylog";
        case FamilyId::gaussian_exp: return "gaussian_exp";
    }
    return "?";
}

double CandidateFamily::alpha_term(int k) const {
    switch (id) {
        case FamilyId::power2_harmonic: return std::pow(2.0, -k);
        case FamilyId::geometric: return std::pow(a, -k);
        case FamilyId::harmonic_polylog: return 1.0 / (static_cast<double>(k) * (k + 1.0));
        case FamilyId::gaussian_exp: return std::pow(a, -std::pow(static_cast<double>(k), 3.0));
    }
    return 0.0;
}

double CandidateFamily::beta_term(int k) const {
    switch (id) {
        case FamilyId::power2_harmonic: return 1.0 / (static_cast<double>(k) * (k + 1.0));
        case FamilyId::geometric: return std::pow(b, -k);
        case FamilyId::harmonic_polylog: return std::pow(static_cast<double>(k), -1.0 - delta);
        case FamilyId::gaussian_exp: return std::pow(b, -static_cast<double>(k) * k);
    }
    return 0.0;
}

namespace {

double summed_tail(const std::function<double(int)>& term, int n) {
    double s = 0.0;
    for (int k = n + 1; k < n + 4000; ++k) {
        double t = term(k);
        s += t;
        if (t < 1e-18 * (s + 1e-300) || t == 0.0) break;
    }
    return s;
}

// sum_{k>n} k^{-1-delta}: partial sum plus a midpoint-rule remainder.
double polylog_tail(double delta, int n) {
    const int M = n + 256;
    double s = 0.0;
    for (int k = n + 1; k <= M; ++k) s += std::pow(static_cast<double>(k), -1.0 - delta);
    return s + std::pow(M + 0.5, -delta) / delta;
}

}  // namespace

double CandidateFamily::alpha_partial(int n) const {
    switch (id) {
        case FamilyId::power2_harmonic: return 1.0 - std::pow(2.0, -n);
        case FamilyId::geometric: return (1.0 - std::pow(a, -n)) / (a - 1.0);
        case FamilyId::harmonic_polylog: return static_cast<double>(n) / (n + 1.0);
        case FamilyId::gaussian_exp: {
            double s = 0.0;
            for (int k = 1; k <= n; ++k) s += alpha_term(k);
            return s;
        }
    }
    return 0.0;
}

double CandidateFamily::beta_partial(int n) const {
    switch (id) {
        case FamilyId::power2_harmonic: return static_cast<double>(n) / (n + 1.0);
        case FamilyId::geometric: return (1.0 - std::pow(b, -n)) / (b - 1.0);
        case FamilyId::harmonic_polylog:
        case FamilyId::gaussian_exp: {
            double s = 0.0;
            for (int k = 1; k <= n; ++k) s += beta_term(k);
            return s;
        }
    }
    return 0.0;
}

double CandidateFamily::alpha_tail(int n) const {
    switch (id) {
        case FamilyId::power2_harmonic: return std::pow(2.0, -n);
        case FamilyId::geometric: return std::pow(a, -n) / (a - 1.0);
        case FamilyId::harmonic_polylog: return 1.0 / (n + 1.0);
        case FamilyId::gaussian_exp: return summed_tail([this](int k) { return alpha_term(k); }, n);
    }
    return 0.0;
}

double CandidateFamily::beta_tail(int n) const {
    switch (id) {
        case FamilyId::power2_harmonic: return 1.0 / (n + 1.0);
        case FamilyId::geometric: return std::pow(b, -n) / (b - 1.0);
        case FamilyId::harmonic_polylog: return polylog_tail(delta, n);
        case FamilyId::gaussian_exp: return summed_tail([this](int k) { return beta_term(k); }, n);
    }
    return 0.0;
}

TailBracket tail_bounds(const CandidateFamily& fam, int n, WhichSequence which) {
    require(n >= 1, "tail_bounds: n >= 1");
    bool alpha_side = which == WhichSequence::alpha_seq;
    double first = alpha_side ? fam.alpha_term(n + 1) : fam.beta_term(n + 1);
    double next = alpha_side ? fam.alpha_term(n + 2) : fam.beta_term(n + 2);
    require(next <= first, "tail_bounds: terms must be monotone decreasing beyond n");

    double x0 = n + 1.0;
    double integral = 0.0;
    switch (fam.id) {
        case FamilyId::power2_harmonic:
            integral = alpha_side ? std::pow(2.0, -x0) / std::log(2.0)
                                  : std::log((x0 + 1.0) / x0);
            break;
        case FamilyId::geometric: {
            double base = alpha_side ? fam.a : fam.b;
            integral = std::pow(base, -x0) / std::log(base);
            break;
        }
        case FamilyId::harmonic_polylog:
            integral = alpha_side ? std::log((x0 + 1.0) / x0)
                                  : std::pow(x0, -fam.delta) / fam.delta;
            break;
        case FamilyId::gaussian_exp:
            if (alpha_side) {
                // int_{x0}^inf a^{-x^3} dx: decay length 1/(3 x0^2 ln a)
                double la = std::log(fam.a);
                double len = 1.0 / (3.0 * x0 * x0 * la);
                double scale = std::exp(-x0 * x0 * x0 * la) * len;
                integral = integrate_adaptive(
                    [&](double x) { return std::exp(-std::pow(x, 3.0) * la); }, x0,
                    x0 + 60.0 * len, std::max(1e-13 * scale, 1e-280), 24);
            } else {
                double lb = std::log(fam.b);
                integral = 0.5 * std::sqrt(kPi / lb) * std::erfc(x0 * std::sqrt(lb));
            }
            break;
    }
    return TailBracket{integral, first + integral};
}

double candidate_ratio(const CandidateFamily& fam, int n) {
    require(n >= 1, "candidate_ratio: n >= 1");
    double denom = fam.alpha_tail(n) + fam.beta_tail(n);
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw std::domain_error("candidate_ratio: residual sums underflow at n = " +
                                std::to_string(n));
    return 1.0 - fam.beta_term(n + 1) / denom;
}

SequencePair embed_candidate(const CandidateFamily& fam, int n_max, double c) {
    require(n_max >= 1, "embed_candidate: n_max >= 1");
    require(c > 1.0, "embed_candidate: c > 1");
    SequencePair seq;
    seq.c = c;
    seq.K = (c + 2.0) / (c - 1.0);
    seq.alpha1 = fam.alpha_term(1);
    seq.beta1 = fam.beta_term(1);
    seq.tan_b1 = std::tan(seq.beta1);
    seq.log_tan_b1 = seq.tan_b1 > 0.0 ? std::log(seq.tan_b1)
                                      : std::numeric_limits<double>::quiet_NaN();
    const double half_pi = 0.5 * kPi;
    for (int n = 1; n <= n_max; ++n) {
        double an = fam.alpha_partial(n), bn = fam.beta_partial(n);
        double an1 = fam.alpha_partial(n + 1), bn1 = fam.beta_partial(n + 1);
        SequenceEntry e;
        e.n = n;
        e.alpha = fam.alpha_term(n);
        e.beta = fam.beta_term(n);
        e.t0 = std::tan(an + bn);
        e.t1 = std::tan(an + bn1);
        e.t2 = std::tan(an1 + bn1);
        e.angle_valid = (an + bn) < half_pi && (an + bn1) < half_pi && (an1 + bn1) < half_pi;
        auto safe_log = [](double v) {
            return v > 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN();
        };
        e.log_t0 = safe_log(e.t0);
        e.log_t1 = safe_log(e.t1);
        e.log_t2 = safe_log(e.t2);
        seq.entries.push_back(e);
    }
    return seq;
}

CandidateVerdict reject_candidate(const CandidateFamily& fam, int horizon) {
    require(horizon >= 21, "reject_candidate: horizon must cover a 20-index window");
    CandidateVerdict v;
    v.horizon = horizon;
    double min_ratio = std::numeric_limits<double>::infinity();
    bool ratio_available = true;
    try {
        for (int n = horizon - 19; n <= horizon; ++n)
            min_ratio = std::min(min_ratio, candidate_ratio(fam, n));
    } catch (const std::domain_error&) {
        // Residual sums underflow (gaussian-type families); the direct
        // tangent-ratio route below still decides the verdict.
        ratio_available = false;
        min_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    v.trailing_min_gap_ratio = min_ratio;

    SequencePair emb = embed_candidate(fam, horizon);
    const SequenceEntry& e = emb.at(horizon);
    v.final_tan_ratio = e.t1 / e.t0;
    bool ratio_bounded =
        !(e.angle_valid && e.t0 > 0.0) || v.final_tan_ratio < horizon + 1.0;
    v.fails_condition3 = (ratio_available && min_ratio > 0.1) || ratio_bounded;
    return v;
}

// ---- External interfaces ----

std::string sequence_to_json(const SequencePair& seq) {
    nlohmann::json j;
    j["c"] = seq.c;
    j["K"] = seq.K;
    j["rule"] = seq.rule == FillRule::midpoint ? "midpoint" : "slow";
    j["alpha1"] = seq.alpha1;
    j["beta1"] = seq.beta1;
    j["tan_b1"] = seq.tan_b1;
    j["truncated"] = seq.truncated;
    if (!seq.warning.empty()) j["warning"] = seq.warning;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : seq.entries) {
        arr.push_back({{"n", e.n},
                       {"alpha", e.alpha},
                       {"beta", e.beta},
                       {"t0", e.t0},
                       {"t1", e.t1},
                       {"t2", e.t2},
                       {"log_t0", e.log_t0},
                       {"log_t1", e.log_t1},
                       {"log_t2", e.log_t2}});
    }
    j["entries"] = arr;
    return j.dump(2);
}

SequencePair sequence_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SequencePair seq;
    seq.c = j.at("c").get<double>();
    seq.K = j.at("K").get<double>();
    seq.rule = j.value("rule", "midpoint") == std::string("slow") ? FillRule::slow
                                                                  : FillRule::midpoint;
    seq.alpha1 = j.at("alpha1").get<double>();
    seq.beta1 = j.at("beta1").get<double>();
    seq.tan_b1 = j.at("tan_b1").get<double>();
    seq.log_tan_b1 = std::log(seq.tan_b1);
    seq.truncated = j.value("truncated", false);
    seq.warning = j.value("warning", std::string());
    for (const auto& je : j.at("entries")) {
        SequenceEntry e;
        e.n = je.at("n").get<int>();
        e.alpha = je.at("alpha").get<double>();
        e.beta = je.at("beta").get<double>();
        e.t0 = je.at("t0").get<double>();
        e.t1 = je.at("t1").get<double>();
        e.t2 = je.at("t2").get<double>();
        e.log_t0 = je.at("log_t0").get<double>();
        e.log_t1 = je.at("log_t1").get<double>();
        e.log_t2 = je.at("log_t2").get<double>();
        seq.entries.push_back(e);
    }
    return seq;
}

std::string condition_table_csv(const SequencePair& seq) {
    std::ostringstream os;
    os << "n,ratio,margin_cot,margin_increase,margin_ratio,margin_tan,all_hold\n";
    char buf[512];
    for (int n = 1; n <= seq.max_n(); ++n) {
        ConditionReport r = verify_lemma_conditions(seq, n);
        const SequenceEntry& e = seq.at(n);
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", n, e.t1 / e.t0,
                      r.margin_cot, r.margin_increase, r.margin_ratio, r.margin_tan,
                      r.all_hold() ? 1 : 0);
        os << buf;
    }
    return os.str();
}

}  // namespace levy
