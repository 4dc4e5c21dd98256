#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace rbsn {

/// Dense tensor of fixed order over a 2D or 3D Cartesian space.
///
/// Storage always uses a stride of 3 per index so that 2D and 3D tensors
/// share one layout; entries with an index >= dim() are kept at zero.
template <int Order>
class Tensor
{
public:
    static constexpr int order = Order;
    static constexpr std::size_t capacity = [] {
        std::size_t n = 1;
        for (int i = 0; i < Order; ++i)
            n *= 3;
        return n;
    }();

    explicit Tensor(int dim = 2) : dim_(dim)
    {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("tensor dimension must be 2 or 3");
        data_.fill(0.0);
    }

    int dim() const { return dim_; }

    template <typename... I>
    double& operator()(I... idx)
    {
        static_assert(sizeof...(I) == Order, "wrong number of indices");
        return data_[flat(static_cast<int>(idx)...)];
    }

    template <typename... I>
    double operator()(I... idx) const
    {
        static_assert(sizeof...(I) == Order, "wrong number of indices");
        return data_[flat(static_cast<int>(idx)...)];
    }

    double& at(const std::array<int, Order>& idx) { return data_[flat_array(idx)]; }
    double at(const std::array<int, Order>& idx) const { return data_[flat_array(idx)]; }

    const std::array<double, capacity>& raw() const { return data_; }

    /// Calls f(idx) for every multi-index with components below dim().
    template <typename F>
    void for_each_index(F&& f) const
    {
        std::array<int, Order> idx{};
        for_each_impl(f, idx, 0);
    }

    Tensor& operator+=(const Tensor& o)
    {
        check_dim(o);
        for (std::size_t i = 0; i < capacity; ++i)
            data_[i] += o.data_[i];
        return *this;
    }

    Tensor& operator-=(const Tensor& o)
    {
        check_dim(o);
        for (std::size_t i = 0; i < capacity; ++i)
            data_[i] -= o.data_[i];
        return *this;
    }

    Tensor& operator*=(double s)
    {
        for (auto& v : data_)
            v *= s;
        return *this;
    }

    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator*(Tensor a, double s) { return a *= s; }
    friend Tensor operator*(double s, Tensor a) { return a *= s; }
    friend Tensor operator/(Tensor a, double s) { return a *= 1.0 / s; }

    bool operator==(const Tensor& o) const { return dim_ == o.dim_ && data_ == o.data_; }

    double max_abs() const
    {
        double m = 0.0;
        for (double v : data_)
            m = std::fmax(m, std::fabs(v));
        return m;
    }

    bool all_finite() const
    {
        for (double v : data_)
            if (!std::isfinite(v))
                return false;
        return true;
    }

private:
    template <typename... I>
    static std::size_t flat(I... idx)
    {
        std::size_t f = 0;
        ((f = f * 3 + static_cast<std::size_t>(idx)), ...);
        return f;
    }

    static std::size_t flat_array(const std::array<int, Order>& idx)
    {
        std::size_t f = 0;
        for (int i : idx)
            f = f * 3 + static_cast<std::size_t>(i);
        return f;
    }

    template <typename F>
    void for_each_impl(F& f, std::array<int, Order>& idx, int level) const
    {
        if (level == Order) {
            f(static_cast<const std::array<int, Order>&>(idx));
            return;
        }
        for (int i = 0; i < dim_; ++i) {
            idx[level] = i;
            for_each_impl(f, idx, level + 1);
        }
    }

    void check_dim(const Tensor& o) const
    {
        if (o.dim_ != dim_)
            throw std::invalid_argument("tensor dimension mismatch");
    }

    int dim_;
    std::array<double, capacity> data_;
};

using Vector = Tensor<1>;
using Tensor2 = Tensor<2>;
using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;

/// Swaps indices i and j (1-based, i < j) of any tensor of order >= 2.
template <int Order>
Tensor<Order> transpose(const Tensor<Order>& t, int i, int j)
{
    if (i < 1 || j > Order || i >= j)
        throw std::out_of_range("transpose indices must satisfy 1 <= i < j <= order");
    Tensor<Order> out(t.dim());
    t.for_each_index([&](const std::array<int, Order>& idx) {
        auto swapped = idx;
        std::swap(swapped[i - 1], swapped[j - 1]);
        out.at(swapped) = t.at(idx);
    });
    return out;
}

inline Tensor2 transpose(const Tensor2& t) { return transpose(t, 1, 2); }

double max_abs_diff(const Tensor4& a, const Tensor4& b);
double max_abs_diff(const Tensor2& a, const Tensor2& b);

Vector make_vector(double x, double y);
Vector make_vector(double x, double y, double z);

Tensor2 identity2(int dim);
/// Symmetric fourth-order identity, (d_ik d_jl + d_il d_jk) / 2.
Tensor4 identity_sym(int dim);
/// Volumetric projector (1 x 1) / 3. The divisor is 3 in 2D as well.
Tensor4 identity_vol(int dim);

/// (D + D^T34) / 2
Tensor4 symmetrize_minor(const Tensor4& d);
Tensor2 symmetrize(const Tensor2& t);

Tensor2 outer(const Vector& a, const Vector& b);
Tensor3 outer(const Tensor2& a, const Vector& b);
Tensor4 outer(const Tensor2& a, const Tensor2& b);

double dot(const Vector& a, const Vector& b);
Vector dot(const Tensor2& a, const Vector& v);
Vector dot(const Vector& v, const Tensor2& a);
Tensor2 dot(const Tensor2& a, const Tensor2& b);
/// v_m X_mjk
Tensor2 dot(const Vector& v, const Tensor3& x);
/// v_m X_mjkl
Tensor3 dot(const Vector& v, const Tensor4& x);
/// T_ijm A_mk
Tensor3 dot(const Tensor3& t, const Tensor2& a);
/// A_im T_mjk
Tensor3 dot(const Tensor2& a, const Tensor3& t);
/// A_ijm B_mkl
Tensor4 dot(const Tensor3& a, const Tensor3& b);
/// A_im X_mjkl
Tensor4 dot(const Tensor2& a, const Tensor4& x);
/// X_ijkm A_ml
Tensor4 dot(const Tensor4& x, const Tensor2& a);

double ddot(const Tensor2& a, const Tensor2& b);
/// X_ijkl e_kl
Tensor2 ddot(const Tensor4& x, const Tensor2& e);
/// e_ij X_ijkl
Tensor2 ddot(const Tensor2& e, const Tensor4& x);
/// T_ijk e_jk
Vector ddot(const Tensor3& t, const Tensor2& e);
/// A_ijmn B_mnkl
Tensor4 ddot(const Tensor4& a, const Tensor4& b);

double trace(const Tensor2& t);
double determinant(const Tensor2& t);
double norm(const Vector& v);

/// Coefficients (a, b) of the best fit D ~ a I + b Ivol (least squares over entries).
struct IsotropicCoefficients
{
    double sym = 0.0;
    double vol = 0.0;
};
IsotropicCoefficients isotropic_coefficients(const Tensor4& d);

}  // namespace rbsn
