#include "rbsn/tensor.hpp"

namespace rbsn {

namespace {

void require_same(int a, int b)
{
    if (a != b)
        throw std::invalid_argument("tensor dimension mismatch");
}

double kron(int i, int j) { return i == j ? 1.0 : 0.0; }

}  // namespace

double max_abs_diff(const Tensor4& a, const Tensor4& b) { return (a - b).max_abs(); }
double max_abs_diff(const Tensor2& a, const Tensor2& b) { return (a - b).max_abs(); }

Vector make_vector(double x, double y)
{
    Vector v(2);
    v(0) = x;
    v(1) = y;
    return v;
}

Vector make_vector(double x, double y, double z)
{
    Vector v(3);
    v(0) = x;
    v(1) = y;
    v(2) = z;
    return v;
}

Tensor2 identity2(int dim)
{
    Tensor2 t(dim);
    for (int i = 0; i < dim; ++i)
        t(i, i) = 1.0;
    return t;
}

Tensor4 identity_sym(int dim)
{
    Tensor4 t(dim);
    t.for_each_index([&](const std::array<int, 4>& x) {
        t.at(x) = 0.5 * (kron(x[0], x[2]) * kron(x[1], x[3]) + kron(x[0], x[3]) * kron(x[1], x[2]));
    });
    return t;
}

Tensor4 identity_vol(int dim)
{
    Tensor4 t(dim);
    t.for_each_index([&](const std::array<int, 4>& x) { t.at(x) = kron(x[0], x[1]) * kron(x[2], x[3]) / 3.0; });
    return t;
}

Tensor4 symmetrize_minor(const Tensor4& d) { return (d + transpose(d, 3, 4)) * 0.5; }

Tensor2 symmetrize(const Tensor2& t) { return (t + transpose(t)) * 0.5; }

Tensor2 outer(const Vector& a, const Vector& b)
{
    require_same(a.dim(), b.dim());
    Tensor2 t(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            t(i, j) = a(i) * b(j);
    return t;
}

Tensor3 outer(const Tensor2& a, const Vector& b)
{
    require_same(a.dim(), b.dim());
    Tensor3 t(a.dim());
    t.for_each_index([&](const std::array<int, 3>& x) { t.at(x) = a(x[0], x[1]) * b(x[2]); });
    return t;
}

Tensor4 outer(const Tensor2& a, const Tensor2& b)
{
    require_same(a.dim(), b.dim());
    Tensor4 t(a.dim());
    t.for_each_index([&](const std::array<int, 4>& x) { t.at(x) = a(x[0], x[1]) * b(x[2], x[3]); });
    return t;
}

double dot(const Vector& a, const Vector& b)
{
    require_same(a.dim(), b.dim());
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        s += a(i) * b(i);
    return s;
}

Vector dot(const Tensor2& a, const Vector& v)
{
    require_same(a.dim(), v.dim());
    Vector out(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int m = 0; m < a.dim(); ++m)
            out(i) += a(i, m) * v(m);
    return out;
}

Vector dot(const Vector& v, const Tensor2& a)
{
    require_same(a.dim(), v.dim());
    Vector out(a.dim());
    for (int j = 0; j < a.dim(); ++j)
        for (int m = 0; m < a.dim(); ++m)
            out(j) += v(m) * a(m, j);
    return out;
}

Tensor2 dot(const Tensor2& a, const Tensor2& b)
{
    require_same(a.dim(), b.dim());
    const int n = a.dim();
    Tensor2 out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int m = 0; m < n; ++m)
                out(i, j) += a(i, m) * b(m, j);
    return out;
}

Tensor2 dot(const Vector& v, const Tensor3& x)
{
    require_same(v.dim(), x.dim());
    const int n = v.dim();
    Tensor2 out(n);
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                out(j, k) += v(m) * x(m, j, k);
    return out;
}

Tensor3 dot(const Vector& v, const Tensor4& x)
{
    require_same(v.dim(), x.dim());
    Tensor3 out(v.dim());
    out.for_each_index([&](const std::array<int, 3>& o) {
        double s = 0.0;
        for (int m = 0; m < v.dim(); ++m)
            s += v(m) * x(m, o[0], o[1], o[2]);
        out.at(o) = s;
    });
    return out;
}

Tensor3 dot(const Tensor3& t, const Tensor2& a)
{
    require_same(t.dim(), a.dim());
    Tensor3 out(t.dim());
    out.for_each_index([&](const std::array<int, 3>& o) {
        double s = 0.0;
        for (int m = 0; m < t.dim(); ++m)
            s += t(o[0], o[1], m) * a(m, o[2]);
        out.at(o) = s;
    });
    return out;
}

Tensor3 dot(const Tensor2& a, const Tensor3& t)
{
    require_same(t.dim(), a.dim());
    Tensor3 out(t.dim());
    out.for_each_index([&](const std::array<int, 3>& o) {
        double s = 0.0;
        for (int m = 0; m < t.dim(); ++m)
            s += a(o[0], m) * t(m, o[1], o[2]);
        out.at(o) = s;
    });
    return out;
}

Tensor4 dot(const Tensor3& a, const Tensor3& b)
{
    require_same(a.dim(), b.dim());
    Tensor4 out(a.dim());
    out.for_each_index([&](const std::array<int, 4>& o) {
        double s = 0.0;
        for (int m = 0; m < a.dim(); ++m)
            s += a(o[0], o[1], m) * b(m, o[2], o[3]);
        out.at(o) = s;
    });
    return out;
}

Tensor4 dot(const Tensor2& a, const Tensor4& x)
{
    require_same(a.dim(), x.dim());
    Tensor4 out(a.dim());
    out.for_each_index([&](const std::array<int, 4>& o) {
        double s = 0.0;
        for (int m = 0; m < a.dim(); ++m)
            s += a(o[0], m) * x(m, o[1], o[2], o[3]);
        out.at(o) = s;
    });
    return out;
}

Tensor4 dot(const Tensor4& x, const Tensor2& a)
{
    require_same(a.dim(), x.dim());
    Tensor4 out(a.dim());
    out.for_each_index([&](const std::array<int, 4>& o) {
        double s = 0.0;
        for (int m = 0; m < a.dim(); ++m)
            s += x(o[0], o[1], o[2], m) * a(m, o[3]);
        out.at(o) = s;
    });
    return out;
}

double ddot(const Tensor2& a, const Tensor2& b)
{
    require_same(a.dim(), b.dim());
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j)
            s += a(i, j) * b(i, j);
    return s;
}

Tensor2 ddot(const Tensor4& x, const Tensor2& e)
{
    require_same(x.dim(), e.dim());
    const int n = x.dim();
    Tensor2 out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    out(i, j) += x(i, j, k, l) * e(k, l);
    return out;
}

Tensor2 ddot(const Tensor2& e, const Tensor4& x)
{
    require_same(x.dim(), e.dim());
    const int n = x.dim();
    Tensor2 out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    out(k, l) += e(i, j) * x(i, j, k, l);
    return out;
}

Vector ddot(const Tensor3& t, const Tensor2& e)
{
    require_same(t.dim(), e.dim());
    const int n = t.dim();
    Vector out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                out(i) += t(i, j, k) * e(j, k);
    return out;
}

Tensor4 ddot(const Tensor4& a, const Tensor4& b)
{
    require_same(a.dim(), b.dim());
    const int n = a.dim();
    Tensor4 out(n);
    out.for_each_index([&](const std::array<int, 4>& o) {
        double s = 0.0;
        for (int m = 0; m < n; ++m)
            for (int p = 0; p < n; ++p)
                s += a(o[0], o[1], m, p) * b(m, p, o[2], o[3]);
        out.at(o) = s;
    });
    return out;
}

double trace(const Tensor2& t)
{
    double s = 0.0;
    for (int i = 0; i < t.dim(); ++i)
        s += t(i, i);
    return s;
}

double determinant(const Tensor2& t)
{
    if (t.dim() == 2)
        return t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0);
    return t(0, 0) * (t(1, 1) * t(2, 2) - t(1, 2) * t(2, 1)) - t(0, 1) * (t(1, 0) * t(2, 2) - t(1, 2) * t(2, 0))
           + t(0, 2) * (t(1, 0) * t(2, 1) - t(1, 1) * t(2, 0));
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

IsotropicCoefficients isotropic_coefficients(const Tensor4& d)
{
    const Tensor4 is = identity_sym(d.dim());
    const Tensor4 iv = identity_vol(d.dim());
    double ss = 0, sv = 0, vv = 0, ds = 0, dv = 0;
    d.for_each_index([&](const std::array<int, 4>& x) {
        ss += is.at(x) * is.at(x);
        sv += is.at(x) * iv.at(x);
        vv += iv.at(x) * iv.at(x);
        ds += d.at(x) * is.at(x);
        dv += d.at(x) * iv.at(x);
    });
    const double det = ss * vv - sv * sv;
    return {(ds * vv - dv * sv) / det, (dv * ss - ds * sv) / det};
}

}  // namespace rbsn
