#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace levy {

// Strictly positive real stored as its natural log. Tangent products in the
// geometry formulas overflow doubles long before the construction's precision
// ceiling (log tan > 700), so the per-n records are evaluated in this type as
// well as in plain doubles.
class LogPos {
  public:
    LogPos() : lg_(0.0) {}
    explicit LogPos(double value) {
        if (!(value > 0.0)) throw std::domain_error("LogPos: value must be > 0");
        lg_ = std::log(value);
    }
    static LogPos from_log(double lg) {
        LogPos v;
        v.lg_ = lg;
        return v;
    }

    double log() const { return lg_; }
    double value() const { return std::exp(lg_); }  // may overflow to inf

    friend LogPos operator*(LogPos a, LogPos b) { return from_log(a.lg_ + b.lg_); }
    friend LogPos operator/(LogPos a, LogPos b) { return from_log(a.lg_ - b.lg_); }

    friend LogPos operator+(LogPos a, LogPos b) {
        double hi = a.lg_, lo = b.lg_;
        if (hi < lo) std::swap(hi, lo);
        return from_log(hi + std::log1p(std::exp(lo - hi)));
    }

    // a - b with a > b required; the geometry identities only subtract
    // provably-positive differences, so a violation is a reportable defect.
    friend LogPos operator-(LogPos a, LogPos b) {
        if (!(a.lg_ > b.lg_)) throw std::domain_error("LogPos: subtraction would be <= 0");
        return from_log(a.lg_ + std::log1p(-std::exp(b.lg_ - a.lg_)));
    }

    friend bool operator<(LogPos a, LogPos b) { return a.lg_ < b.lg_; }
    friend bool operator>(LogPos a, LogPos b) { return a.lg_ > b.lg_; }

  private:
    double lg_;
};

// |log(a/b)|, the scale-free residual of an identity checked in log space.
inline double log_rel_residual(LogPos a, LogPos b) { return std::abs(a.log() - b.log()); }

}  // namespace levy
