#pragma once

#include <string>
#include <vector>

#include "levyharnack/common.hpp"

namespace levy {

// Interval-selection policy for the inductive construction. Both policies pick
// values strictly inside the admissible open intervals:
//  - midpoint: tangent ratio exactly max(n+1, 2K); T2 at the midpoint of the
//    admissible angle interval, evaluated in tangent coordinates (about 2K*T1).
//  - slow: tangent ratio exactly max(n+1, 3); T2 = 1.1*K*T1. Minimal growth,
//    keeps the B_n targets close enough for desk-scale Monte Carlo rows.
enum class FillRule { midpoint, slow };

struct SequenceEntry {
    int n = 0;
    double alpha = 0.0;  // alpha_n (radians)
    double beta = 0.0;   // beta_n
    // Tangent coordinates: t0 = tan(A_n+B_n), t1 = tan(A_n+B_{n+1}),
    // t2 = tan(A_{n+1}+B_{n+1}). Angles cluster at pi/2 and are useless past
    // n ~ 17 in doubles; the tangents (and their logs) are the primary state.
    double t0 = 0.0, t1 = 0.0, t2 = 0.0;
    double log_t0 = 0.0, log_t1 = 0.0, log_t2 = 0.0;
    bool angle_valid = true;  // all three sums strictly below pi/2
};

struct SequencePair {
    double c = 0.0;
    double K = 0.0;  // (c+2)/(c-1)
    FillRule rule = FillRule::midpoint;
    double alpha1 = 0.0, beta1 = 0.0;
    double tan_b1 = 0.0;      // tan(B_1): lower cone edge for n = 1
    double log_tan_b1 = 0.0;
    bool truncated = false;   // stopped at the precision ceiling before n_max
    std::string warning;
    std::vector<SequenceEntry> entries;

    int max_n() const { return static_cast<int>(entries.size()); }
    const SequenceEntry& at(int n) const;  // 1-based
    // tan(A_{n-1}+B_n): t1 of entry n-1, or tan_b1 for n = 1.
    double lower_edge_tan(int n) const;
    double lower_edge_log_tan(int n) const;
};

// Inductive construction of Lemma-2.1 sequences in tangent coordinates.
// Stops early (truncated flag + warning) once log t2 would exceed log_ceiling.
// Throws std::invalid_argument for c <= 1 or n_max < 1.
SequencePair construct_sequences(double c, int n_max, FillRule rule = FillRule::midpoint,
                                 double log_ceiling = 700.0);

struct ConditionReport {
    bool angle_below_half_pi = false;  // partial sums stay below pi/2
    bool sum_increasing = false;       // A_n+B_n > A_{n-1}+B_{n-1}
    bool ratio_condition = false;      // tan(A_n+B_{n+1}) >= (n+1) tan(A_n+B_n)
    bool tan_inequality = false;       // (c+2) tan(A_n+B_{n+1}) <= (c-1) tan(A_{n+1}+B_{n+1})
    // Margins are ratios (never angle differences; pi/2 cancels catastrophically).
    double margin_cot = 0.0;       // 1/t0, tangent of the gap to pi/2
    double margin_increase = 0.0;  // t0_n / t0_{n-1}
    double margin_ratio = 0.0;     // (t1/t0) / (n+1)
    double margin_tan = 0.0;       // t2 / (K t1)
    bool all_hold() const {
        return angle_below_half_pi && sum_increasing && ratio_condition && tan_inequality;
    }
};

ConditionReport verify_lemma_conditions(const SequencePair& seq, int n);

// ---- Candidate families of the appendix rejection lemma ----

enum class FamilyId { power2_harmonic, geometric, harmonic_polylog, gaussian_exp };

struct CandidateFamily {
    FamilyId id = FamilyId::power2_harmonic;
    double a = 2.0, b = 2.0, delta = 1.0;

    static CandidateFamily power2_harmonic();
    static CandidateFamily geometric(double a, double b);       // 1 < b <= a
    static CandidateFamily harmonic_polylog(double delta_val);  // delta > 0
    static CandidateFamily gaussian_exp(double a, double b);    // a, b > 1

    double alpha_term(int k) const;
    double beta_term(int k) const;
    double alpha_partial(int n) const;  // A_n
    double beta_partial(int n) const;   // B_n
    double alpha_tail(int n) const;     // sum_{k > n} alpha_k (best point value)
    double beta_tail(int n) const;
    std::string name() const;
};

enum class WhichSequence { alpha_seq, beta_seq };

struct TailBracket {
    double lower = 0.0;  // integral test: int_{n+1}^inf
    double upper = 0.0;  // term + integral
};

// Integral-test bracket of sum_{k>n}. Rejects non-monotone parameters.
TailBracket tail_bounds(const CandidateFamily& fam, int n, WhichSequence which);

// Ratio of successive residual sums,
//   1 - beta_{n+1} / (sum_{k>n} alpha_k + sum_{k>n} beta_k),
// the small-angle surrogate for cos(A_n+B_{n+1})/cos(A_n+B_n) whose limits the
// rejection lemma computes (1, (a+1)/(2a), 1/b). Exact tails where available.
double candidate_ratio(const CandidateFamily& fam, int n);

// Candidate family materialized as a SequencePair (raw angle sums; tangents
// may be negative once the sums pass pi/2). For condition checks only.
SequencePair embed_candidate(const CandidateFamily& fam, int n_max, double c = 2.0);

struct CandidateVerdict {
    bool fails_condition3 = false;
    double trailing_min_gap_ratio = 0.0;  // min candidate_ratio over the last 20 indices
    double final_tan_ratio = 0.0;         // direct t1/t0 at the horizon
    int horizon = 0;
};

// Verdict per the fixed floor rule: condition (3) is declared failed when the
// trailing-window gap ratio stays above 0.1, or when the direct tangent ratio
// at the horizon is bounded (< horizon + 1).
CandidateVerdict reject_candidate(const CandidateFamily& fam, int horizon = 60);

// ---- External interfaces ----
std::string sequence_to_json(const SequencePair& seq);
SequencePair sequence_from_json(const std::string& text);
// CSV rows (n, ratio, margins) for plotting.
std::string condition_table_csv(const SequencePair& seq);

}  // namespace levy
