#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levyharnack/sequences.hpp"

using namespace levy;

TEST_CASE("construction basics, c = 2") {
    SequencePair seq = construct_sequences(2.0, 12);
    CHECK(seq.K == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(seq.alpha1 == doctest::Approx(kPi / 8.0));
    CHECK(seq.beta1 == doctest::Approx(kPi / 8.0));
    CHECK(seq.at(1).t0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(seq.max_n() == 12);
    CHECK_FALSE(seq.truncated);
}

TEST_CASE("all four lemma conditions hold at every stored n") {
    for (double c : {2.0, 5.0}) {
        SequencePair seq = construct_sequences(c, 12);
        for (int n = 1; n <= seq.max_n(); ++n) {
            ConditionReport r = verify_lemma_conditions(seq, n);
            INFO("c = " << c << ", n = " << n);
            CHECK(r.angle_below_half_pi);
            CHECK(r.sum_increasing);
            CHECK(r.ratio_condition);
            CHECK(r.tan_inequality);
            CHECK(r.margin_ratio >= 1.0 - 1e-12);
            CHECK(r.margin_tan >= 1.0);
        }
    }
}

TEST_CASE("slow fill rule also satisfies the conditions, with margin 1.1") {
    SequencePair seq = construct_sequences(10.0, 8, FillRule::slow);
    for (int n = 1; n <= seq.max_n(); ++n) {
        ConditionReport r = verify_lemma_conditions(seq, n);
        CHECK(r.all_hold());
        CHECK(r.margin_tan == doctest::Approx(1.1).epsilon(1e-12));
    }
}

TEST_CASE("tangent ratio is exactly max(n+1, 2K)") {
    SequencePair seq = construct_sequences(2.0, 12);
    for (int n = 1; n <= seq.max_n(); ++n) {
        const SequenceEntry& e = seq.at(n);
        double rho = std::max<double>(n + 1, 8.0);
        CHECK(e.t1 == rho * e.t0);  // single product, bit-exact
    }
}

// Independent oracle: re-sum the emitted angles in extended precision and
// compare the tangent ratio. Angle-space recomputation loses all precision
// once the tangents pass ~1e12, so the sweep stops there.
TEST_CASE("tangent ratio from direct angle summation") {
    SequencePair seq = construct_sequences(2.0, 10);
    long double A = 0.0L, B = 0.0L;
    for (int n = 1; n <= seq.max_n() - 1; ++n) {
        A += static_cast<long double>(seq.at(n).alpha);
        B += static_cast<long double>(seq.at(n).beta);
        if (seq.at(n).t1 > 1e12) break;
        long double Bnext = B + static_cast<long double>(seq.at(n + 1).beta);
        double t0 = static_cast<double>(std::tan(A + B));
        double t1 = static_cast<double>(std::tan(A + Bnext));
        double ratio = t1 / t0;
        INFO("n = " << n);
        CHECK(ratio == doctest::Approx(seq.at(n).t1 / seq.at(n).t0).epsilon(1e-4));
        CHECK(ratio >= (n + 1) * (1.0 - 1e-4));
    }
}

TEST_CASE("partial sums strictly increase (tangent coordinates)") {
    SequencePair seq = construct_sequences(2.0, 12);
    for (int n = 2; n <= seq.max_n(); ++n) CHECK(seq.at(n).t0 > seq.at(n - 1).t0);
}

TEST_CASE("precision ceiling truncates with a warning, not an error") {
    SequencePair seq = construct_sequences(2.0, 500, FillRule::midpoint, 100.0);
    CHECK(seq.truncated);
    CHECK(!seq.warning.empty());
    CHECK(seq.max_n() < 500);
    CHECK(seq.max_n() >= 10);
    for (int n = 1; n <= seq.max_n(); ++n) CHECK(verify_lemma_conditions(seq, n).all_hold());
}

TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(construct_sequences(1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(construct_sequences(0.5, 5), std::invalid_argument);
    CHECK_THROWS_AS(construct_sequences(2.0, 0), std::invalid_argument);
}

TEST_CASE("candidate gap ratios reach the rejection lemma's closed forms") {
    // power-2 / harmonic: limit 1
    CHECK(candidate_ratio(CandidateFamily::power2_harmonic(), 50) ==
          doctest::Approx(1.0).epsilon(0.05));
    // geometric a = b: (a+1)/(2a) at every n, here exactly 3/4
    for (int n : {5, 20, 50})
        CHECK(candidate_ratio(CandidateFamily::geometric(2.0, 2.0), n) ==
              doctest::Approx(0.75).epsilon(1e-12));
    // geometric a > b: 1/b
    CHECK(candidate_ratio(CandidateFamily::geometric(3.0, 2.0), 50) ==
          doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gap ratio stays above the 0.1 floor for families 1-3") {
    for (const CandidateFamily& fam :
         {CandidateFamily::power2_harmonic(), CandidateFamily::geometric(2.0, 2.0),
          CandidateFamily::geometric(3.0, 2.0), CandidateFamily::harmonic_polylog(1.0)}) {
        for (int n = 30; n <= 50; ++n) {
            INFO(fam.name() << " n=" << n);
            CHECK(candidate_ratio(fam, n) > 0.1);
        }
    }
}

TEST_CASE("all four families are rejected") {
    for (const CandidateFamily& fam :
         {CandidateFamily::power2_harmonic(), CandidateFamily::geometric(2.0, 2.0),
          CandidateFamily::geometric(3.0, 2.0), CandidateFamily::harmonic_polylog(0.5),
          CandidateFamily::gaussian_exp(2.0, 2.0)}) {
        CandidateVerdict v = reject_candidate(fam);
        INFO(fam.name());
        CHECK(v.fails_condition3);
    }
    // Constructed sequences must NOT be rejected by the direct ratio route:
    SequencePair seq = construct_sequences(2.0, 30);
    for (int n = 1; n <= seq.max_n(); ++n)
        CHECK(seq.at(n).t1 >= (n + 1.0) * seq.at(n).t0);
}

TEST_CASE("embedded candidate fails condition (3): tangent ratio tends to 1") {
    SequencePair emb = embed_candidate(CandidateFamily::power2_harmonic(), 45);
    const SequenceEntry& e = emb.at(40);
    ConditionReport r = verify_lemma_conditions(emb, 40);
    CHECK_FALSE(r.ratio_condition);
    CHECK(e.t1 / e.t0 == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("tail brackets: closed forms sit inside, width equals the first term") {
    // beta_k = 1/(k(k+1)), tail = 1/(n+1)
    CandidateFamily f1 = CandidateFamily::power2_harmonic();
    for (int n : {1, 4, 10, 30}) {
        TailBracket tb = tail_bounds(f1, n, WhichSequence::beta_seq);
        double closed = 1.0 / (n + 1.0);
        CHECK(tb.lower <= closed);
        CHECK(closed <= tb.upper);
        CHECK(tb.upper - tb.lower == doctest::Approx(f1.beta_term(n + 1)).epsilon(1e-12));
    }
    // geometric: tail = a^{-n}/(a-1)
    CandidateFamily f2 = CandidateFamily::geometric(3.0, 2.0);
    for (int n : {2, 6}) {
        TailBracket ta = tail_bounds(f2, n, WhichSequence::alpha_seq);
        double closed = std::pow(3.0, -n) / 2.0;
        CHECK(ta.lower <= closed);
        CHECK(closed <= ta.upper);
    }
}

TEST_CASE("gaussian-family beta tail: direct summation oracle inside the bracket") {
    CandidateFamily f = CandidateFamily::gaussian_exp(2.0, 2.0);
    int n = 5;
    double oracle = 0.0;  // sum_{k >= 6} 2^{-k^2} to machine convergence
    for (int k = n + 1; k < 40; ++k) oracle += std::pow(2.0, -static_cast<double>(k) * k);
    CHECK(oracle == doctest::Approx(1.455369163941677e-11).epsilon(1e-12));
    TailBracket tb = tail_bounds(f, n, WhichSequence::beta_seq);
    CHECK(tb.lower <= oracle);
    CHECK(oracle <= tb.upper);
    // The rejection lemma's closed-form value is only an upper-bound-style
    // estimate; it must dominate the bracket, not equal it.
    double estimate = 0.5 * std::sqrt(kPi / std::log(2.0)) * std::pow(2.0, -0.5 * 36.0);
    CHECK(estimate > tb.upper);
}

TEST_CASE("alpha^3 tail bracket via quadrature") {
    CandidateFamily f = CandidateFamily::gaussian_exp(2.0, 2.0);
    int n = 2;
    double oracle = 0.0;
    for (int k = n + 1; k < 12; ++k) oracle += std::pow(2.0, -std::pow(double(k), 3.0));
    TailBracket ta = tail_bounds(f, n, WhichSequence::alpha_seq);
    CHECK(ta.lower <= oracle);
    CHECK(oracle <= ta.upper);
}

TEST_CASE("family parameter validation") {
    CHECK_THROWS_AS(CandidateFamily::geometric(2.0, 3.0), std::invalid_argument);  // b > a
    CHECK_THROWS_AS(CandidateFamily::geometric(0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(CandidateFamily::harmonic_polylog(0.0), std::invalid_argument);
    CHECK_THROWS_AS(CandidateFamily::gaussian_exp(1.0, 2.0), std::invalid_argument);
}

TEST_CASE("json round trip preserves the tangent state bit-for-bit") {
    SequencePair seq = construct_sequences(2.0, 10);
    SequencePair back = sequence_from_json(sequence_to_json(seq));
    REQUIRE(back.max_n() == seq.max_n());
    CHECK(back.c == seq.c);
    CHECK(back.K == seq.K);
    CHECK(back.rule == seq.rule);
    for (int n = 1; n <= seq.max_n(); ++n) {
        CHECK(back.at(n).t0 == seq.at(n).t0);
        CHECK(back.at(n).t1 == seq.at(n).t1);
        CHECK(back.at(n).t2 == seq.at(n).t2);
        CHECK(back.at(n).log_t2 == seq.at(n).log_t2);
        CHECK(back.at(n).alpha == seq.at(n).alpha);
    }
}

TEST_CASE("condition csv has one row per n") {
    SequencePair seq = construct_sequences(2.0, 6);
    std::string csv = condition_table_csv(seq);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 7);  // header + 6
}
