#include "rbsn/predicates.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <limits>

namespace rbsn {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr double eps = std::numeric_limits<double>::epsilon() / 2;
constexpr double ccw_bound = (3.0 + 16.0 * eps) * eps;
constexpr double icc_bound = (10.0 + 96.0 * eps) * eps;

template <typename T>
int sign(const T& v)
{
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

int orient_exact(Vec2 a, Vec2 b, Vec2 c)
{
    const Rational acx = Rational(a.x) - c.x, acy = Rational(a.y) - c.y;
    const Rational bcx = Rational(b.x) - c.x, bcy = Rational(b.y) - c.y;
    return sign(Rational(acx * bcy - acy * bcx));
}

int incircle_exact(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const Rational adx = Rational(a.x) - d.x, ady = Rational(a.y) - d.y;
    const Rational bdx = Rational(b.x) - d.x, bdy = Rational(b.y) - d.y;
    const Rational cdx = Rational(c.x) - d.x, cdy = Rational(c.y) - d.y;
    const Rational alift = adx * adx + ady * ady;
    const Rational blift = bdx * bdx + bdy * bdy;
    const Rational clift = cdx * cdx + cdy * cdy;
    const Rational det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy)
                         + clift * (adx * bdy - bdx * ady);
    return sign(det);
}

}  // namespace

int orient2d(Vec2 a, Vec2 b, Vec2 c)
{
    const double left = (a.x - c.x) * (b.y - c.y);
    const double right = (a.y - c.y) * (b.x - c.x);
    const double det = left - right;
    const double bound = ccw_bound * (std::fabs(left) + std::fabs(right));
    if (det > bound || -det > bound)
        return det > 0 ? 1 : -1;
    return orient_exact(a, b, c);
}

int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift
                             + (std::fabs(cdxady) + std::fabs(adxcdy)) * blift
                             + (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    const double bound = icc_bound * permanent;
    if (det > bound || -det > bound)
        return det > 0 ? 1 : -1;
    return incircle_exact(a, b, c, d);
}

}  // namespace rbsn
