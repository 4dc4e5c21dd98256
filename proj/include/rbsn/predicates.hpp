#pragma once

#include <cmath>

namespace rbsn {

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
    friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend Vec2 operator/(Vec2 a, double s) { return a *= 1.0 / s; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Rotation by +90 degrees.
inline Vec2 perp(Vec2 r) { return {-r.y, r.x}; }

/// Sign of the orientation determinant of (a, b, c): +1 counter-clockwise,
/// -1 clockwise, 0 collinear. Exact for all finite double inputs.
int orient2d(Vec2 a, Vec2 b, Vec2 c);

/// +1 if d lies strictly inside the circle through the counter-clockwise
/// triangle (a, b, c), -1 outside, 0 on it. Exact.
int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

}  // namespace rbsn
