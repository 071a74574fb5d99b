#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace levy {

inline constexpr const char* kToolkitVersion = "levy-harnack 0.1.0";

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double angle() const { return std::atan2(y, x); }
};

inline Vec2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline double sq(double v) { return v * v; }

// Relative residual |a-b| / max(|a|,|b|,floor); floor guards 0==0.
inline double rel_residual(double a, double b, double floor_ = 1e-300) {
    double s = std::max({std::abs(a), std::abs(b), floor_});
    return std::abs(a - b) / s;
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace levy
