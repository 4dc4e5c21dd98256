#include "rbsn/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "rbsn/parallel.hpp"

namespace rbsn {

namespace {

constexpr double pi = std::numbers::pi;

void require_alpha(double alpha)
{
    if (!(alpha >= 0.0))
        throw std::invalid_argument("alpha must be non-negative");
}

/// c0 + c1 a + c2 a^2, evaluated at finite a or as a -> inf.
struct Quadratic
{
    double c0 = 0, c1 = 0, c2 = 0;

    double eval(double a) const { return c0 + a * (c1 + a * c2); }
    int degree() const { return c2 != 0.0 ? 2 : (c1 != 0.0 ? 1 : 0); }
    double lead() const { return c2 != 0.0 ? c2 : (c1 != 0.0 ? c1 : c0); }
};

double rational(const Quadratic& num, const Quadratic& den, double alpha, const char* what)
{
    if (std::isinf(alpha)) {
        const int dn = num.degree(), dd = den.degree();
        if (den.lead() == 0.0)
            throw std::domain_error(std::string("vanishing denominator in ") + what);
        if (dn < dd)
            return 0.0;
        if (dn == dd)
            return num.lead() / den.lead();
        return std::copysign(std::numeric_limits<double>::infinity(), num.lead() / den.lead());
    }
    const double d = den.eval(alpha);
    if (std::fabs(d) < 1e-14 * (std::fabs(den.c0) + std::fabs(den.c1 * alpha) + std::fabs(den.c2 * alpha * alpha)))
        throw std::domain_error(std::string("vanishing denominator in ") + what);
    return num.eval(alpha) / d;
}

Tensor2 rot_z(double a)
{
    Tensor2 r(3);
    const double c = std::cos(a), s = std::sin(a);
    r(0, 0) = c;
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 1) = c;
    r(2, 2) = 1.0;
    return r;
}

Tensor2 rot_y(double a)
{
    Tensor2 r(3);
    const double c = std::cos(a), s = std::sin(a);
    r(0, 0) = c;
    r(0, 2) = s;
    r(1, 1) = 1.0;
    r(2, 0) = -s;
    r(2, 2) = c;
    return r;
}

double simpson(const std::vector<double>& f, double h)
{
    const std::size_t n = f.size();
    double s = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
}

}  // namespace

int dimension_of(AnalysisMode mode) { return mode == AnalysisMode::ThreeD ? 3 : 2; }

std::string to_string(AnalysisMode mode)
{
    switch (mode) {
    case AnalysisMode::PlaneStress: return "ps";
    case AnalysisMode::PlaneStrain: return "pe";
    case AnalysisMode::ThreeD: return "3d";
    }
    return "?";
}

AnalysisMode analysis_mode_from_string(const std::string& s)
{
    if (s == "ps" || s == "plane-stress")
        return AnalysisMode::PlaneStress;
    if (s == "pe" || s == "plane-strain")
        return AnalysisMode::PlaneStrain;
    if (s == "3d" || s == "3D")
        return AnalysisMode::ThreeD;
    throw std::invalid_argument("unknown analysis mode '" + s + "' (expected ps, pe or 3d)");
}

void MaterialParams::validate() const
{
    if (!(e0 > 0.0))
        throw std::invalid_argument("E0 must be positive");
    require_alpha(alpha);
}

// ---------------------------------------------------------------------------

OrientationDistribution::OrientationDistribution(Variant v, int dim) : variant_(std::move(v)), dim_(dim)
{
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("distribution dimension must be 2 or 3");
}

OrientationDistribution OrientationDistribution::cone(double gamma, int dim)
{
    if (!(gamma >= 0.0 && gamma <= pi))
        throw std::invalid_argument("cone angle must lie in [0, pi]");
    return {ConeDistribution{gamma}, dim};
}

OrientationDistribution OrientationDistribution::tabulated(std::vector<double> density, int dim)
{
    if (density.size() < 3 || density.size() % 2 == 0)
        throw std::invalid_argument("tabulated density needs an odd number (>= 3) of grid points");
    for (double d : density)
        if (!(d >= 0.0) || !std::isfinite(d))
            throw std::invalid_argument("tabulated density must be finite and non-negative");
    const double lo = dim == 2 ? -pi : 0.0;
    const double h = (pi - lo) / static_cast<double>(density.size() - 1);
    const double total = simpson(density, h);
    if (!(total > 0.0))
        throw std::invalid_argument("tabulated density integrates to zero");
    TabulatedDistribution tab;
    tab.chi.resize(density.size());
    for (std::size_t i = 0; i < density.size(); ++i) {
        tab.chi[i] = lo + h * static_cast<double>(i);
        density[i] /= total;
    }
    tab.density = std::move(density);

    OrientationDistribution out(tab, dim);
    // CDF of the piecewise-linear density, renormalized for sampling.
    auto& t = std::get<TabulatedDistribution>(out.variant_);
    out.cdf_.assign(t.chi.size(), 0.0);
    for (std::size_t i = 1; i < t.chi.size(); ++i)
        out.cdf_[i] = out.cdf_[i - 1] + 0.5 * h * (t.density[i - 1] + t.density[i]);
    const double last = out.cdf_.back();
    for (auto& c : out.cdf_)
        c /= last;
    return out;
}

OrientationDistribution OrientationDistribution::parallel(int dim) { return {DiracParallel{}, dim}; }

OrientationDistribution OrientationDistribution::perpendicular(int dim) { return {DiracPerpendicular{}, dim}; }

double OrientationDistribution::sample_chi(double u) const
{
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConeDistribution>) {
                if (dim_ == 2)
                    return v.gamma * (2.0 * u - 1.0);
                return std::acos(1.0 - u * (1.0 - std::cos(v.gamma)));
            } else if constexpr (std::is_same_v<T, TabulatedDistribution>) {
                auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
                std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf_.begin(), 1,
                                                                                  static_cast<std::ptrdiff_t>(cdf_.size() - 1)));
                const double x0 = v.chi[i - 1], h = v.chi[i] - v.chi[i - 1];
                // Solve the quadratic CDF segment for the local coordinate.
                const double scale = cdf_[i] - cdf_[i - 1];
                if (scale <= 0.0)
                    return x0;
                const double f0 = v.density[i - 1], f1 = v.density[i];
                const double target = (u - cdf_[i - 1]) / scale * 0.5 * (f0 + f1);
                const double slope = f1 - f0;
                double s;
                if (std::fabs(slope) < 1e-14 * (f0 + f1))
                    s = target / (0.5 * (f0 + f1));
                else
                    s = (-f0 + std::sqrt(std::max(0.0, f0 * f0 + 2.0 * slope * target))) / slope;
                return x0 + h * std::clamp(s, 0.0, 1.0);
            } else if constexpr (std::is_same_v<T, DiracParallel>) {
                return 0.0;
            } else {
                if (dim_ == 3)
                    return pi / 2;
                return u < 0.5 ? -pi / 2 : pi / 2;
            }
        },
        variant_);
}

std::pair<double, double> OrientationDistribution::support() const
{
    if (const auto* c = std::get_if<ConeDistribution>(&variant_))
        return dim_ == 2 ? std::pair{-c->gamma, c->gamma} : std::pair{0.0, c->gamma};
    return dim_ == 2 ? std::pair{-pi, pi} : std::pair{0.0, pi};
}

double OrientationDistribution::density(double chi) const
{
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConeDistribution>) {
                if (v.gamma == 0.0)
                    return chi == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
                if (dim_ == 2)
                    return std::fabs(chi) <= v.gamma ? 1.0 / (2.0 * v.gamma) : 0.0;
                return chi >= 0.0 && chi <= v.gamma ? std::sin(chi) / (1.0 - std::cos(v.gamma)) : 0.0;
            } else if constexpr (std::is_same_v<T, TabulatedDistribution>) {
                if (chi < v.chi.front() || chi > v.chi.back())
                    return 0.0;
                const double h = v.chi[1] - v.chi[0];
                std::size_t i = std::min(static_cast<std::size_t>((chi - v.chi.front()) / h), v.chi.size() - 2);
                const double s = (chi - v.chi[i]) / h;
                return (1 - s) * v.density[i] + s * v.density[i + 1];
            } else {
                return 0.0;  // singular measure
            }
        },
        variant_);
}

ChiMoments cone_moments(double gamma, int dim)
{
    if (dim == 2) {
        if (gamma == 0.0)
            return {1.0, 1.0};
        return {std::sin(gamma) / gamma, std::sin(2 * gamma) / (2 * gamma)};
    }
    const double c = std::cos(gamma);
    return {0.5 * (1.0 + c), (2 * c * c + 2 * c - 1.0) / 3.0};
}

ChiMoments chi_moments(const OrientationDistribution& dist)
{
    return std::visit(
        [&](const auto& v) -> ChiMoments {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConeDistribution>) {
                return cone_moments(v.gamma, dist.dim());
            } else if constexpr (std::is_same_v<T, TabulatedDistribution>) {
                std::vector<double> f1(v.chi.size()), f2(v.chi.size());
                for (std::size_t i = 0; i < v.chi.size(); ++i) {
                    f1[i] = std::cos(v.chi[i]) * v.density[i];
                    f2[i] = std::cos(2 * v.chi[i]) * v.density[i];
                }
                const double h = v.chi[1] - v.chi[0];
                return {simpson(f1, h), simpson(f2, h)};
            } else if constexpr (std::is_same_v<T, DiracParallel>) {
                return {1.0, 1.0};
            } else {
                return {0.0, -1.0};
            }
        },
        dist.variant());
}

ChiMoments chi_moments_quadrature(const OrientationDistribution& dist, int intervals)
{
    if (std::holds_alternative<DiracParallel>(dist.variant())
        || std::holds_alternative<DiracPerpendicular>(dist.variant()))
        return chi_moments(dist);
    if (const auto* c = std::get_if<ConeDistribution>(&dist.variant()); c && c->gamma == 0.0)
        return {1.0, 1.0};
    intervals += intervals % 2;
    const auto [lo, hi] = dist.support();
    const double h = (hi - lo) / intervals;
    std::vector<double> f1(intervals + 1), f2(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
        const double x = i == intervals ? hi : lo + h * i;
        const double f = dist.density(x);
        f1[i] = std::cos(x) * f;
        f2[i] = std::cos(2 * x) * f;
    }
    return {simpson(f1, h), simpson(f2, h)};
}

// ---------------------------------------------------------------------------

Tensor2 rotation_2d(double chi)
{
    Tensor2 r(2);
    const double c = std::cos(chi), s = std::sin(chi);
    r(0, 0) = c;
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 1) = c;
    return r;
}

Tensor2 rotation_3d(double xi, double zeta, double theta, double chi)
{
    const Tensor2 zx = rot_z(xi), yz = rot_y(zeta);
    return dot(dot(dot(zx, yz), dot(rot_z(theta), rot_y(chi))), dot(transpose(yz), transpose(zx)));
}

Vector normal_from_angles(int dim, double xi, double zeta)
{
    if (dim == 2)
        return make_vector(std::cos(xi), std::sin(xi));
    return make_vector(std::cos(xi) * std::sin(zeta), std::sin(xi) * std::sin(zeta), std::cos(zeta));
}

Tensor3 tangential_projector(const Vector& n)
{
    const int dim = n.dim();
    const Tensor4 ivol = identity_vol(dim);
    const Tensor2 nu = outer(n, n);
    return dot(n, transpose(ivol, 1, 3)) * 3.0 - outer(nu, n);
}

ScriptTensors script_tensors(const Vector& n, const Tensor2& rho)
{
    const Tensor2 nu = outer(n, n);
    const Tensor2 rho_t = transpose(rho);
    const Tensor3 t = tangential_projector(n);
    ScriptTensors out{transpose(dot(dot(rho, outer(nu, nu)), rho_t), 1, 2),
                      dot(dot(rho, dot(transpose(t, 1, 3), t)), rho_t)};
    return out;
}

namespace {

/// Running sums of the symmetrized per-sample quantities. Uses the reduced
/// forms N_ijkl = n_i t_j n_k t_l and T_ijkl = t_i (d_jk - n_j n_k) t_l.
struct OracleAccumulator
{
    int dim;
    double vol = 0, vol2 = 0;
    std::array<double, 81> n{}, n2{}, t{}, t2{};

    explicit OracleAccumulator(int d) : dim(d) {}

    void add(const double* nv, const double* tv)
    {
        double v = 0;
        for (int i = 0; i < dim; ++i)
            v += nv[i] * tv[i];
        vol += v;
        vol2 += v * v;
        double proj[3][3];
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                proj[j][k] = (j == k ? 1.0 : 0.0) - nv[j] * nv[k];
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const double nt = nv[i] * tv[j];
                for (int k = 0; k < dim; ++k)
                    for (int l = 0; l < dim; ++l) {
                        const int f = ((i * 3 + j) * 3 + k) * 3 + l;
                        const double ns = 0.5 * nt * (nv[k] * tv[l] + nv[l] * tv[k]);
                        const double ts = 0.5 * tv[i] * (proj[j][k] * tv[l] + proj[j][l] * tv[k]);
                        n[f] += ns;
                        n2[f] += ns * ns;
                        t[f] += ts;
                        t2[f] += ts * ts;
                    }
            }
    }

    void merge(const OracleAccumulator& o)
    {
        vol += o.vol;
        vol2 += o.vol2;
        for (std::size_t f = 0; f < 81; ++f) {
            n[f] += o.n[f];
            n2[f] += o.n2[f];
            t[f] += o.t[f];
            t2[f] += o.t2[f];
        }
    }
};

constexpr int oracle_chunks = 64;

}  // namespace

OracleEstimate expectation_oracle(const OrientationDistribution& dist, std::int64_t samples, std::uint64_t seed,
                                  int threads)
{
    if (samples < 1)
        throw std::invalid_argument("sample count must be at least 1");
    const int dim = dist.dim();
    std::vector<OracleAccumulator> partial(oracle_chunks, OracleAccumulator(dim));

    parallel_for(oracle_chunks, threads, [&](std::size_t c) {
        const std::int64_t count = samples / oracle_chunks + (static_cast<std::int64_t>(c) < samples % oracle_chunks);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(c)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        auto& acc = partial[c];
        double nv[3], tv[3];
        for (std::int64_t s = 0; s < count; ++s) {
            const double xi = 2 * pi * uni(rng);
            if (dim == 2) {
                const double chi = dist.sample_chi(uni(rng));
                nv[0] = std::cos(xi);
                nv[1] = std::sin(xi);
                tv[0] = std::cos(xi + chi);
                tv[1] = std::sin(xi + chi);
            } else {
                const double zeta = std::acos(1.0 - 2.0 * uni(rng));
                const double theta = 2 * pi * uni(rng);
                const double chi = dist.sample_chi(uni(rng));
                const Tensor2 rho = rotation_3d(xi, zeta, theta, chi);
                const Vector n = normal_from_angles(3, xi, zeta);
                const Vector t = dot(rho, n);
                for (int i = 0; i < 3; ++i) {
                    nv[i] = n(i);
                    tv[i] = t(i);
                }
            }
            acc.add(nv, tv);
        }
    });

    OracleAccumulator total(dim);
    for (const auto& p : partial)
        total.merge(p);

    const double n = static_cast<double>(samples);
    auto mean_se = [n](double s, double s2) {
        const double m = s / n;
        const double var = n > 1 ? std::max(0.0, (s2 - s * m) / (n - 1)) : 0.0;
        return std::pair{m, std::sqrt(var / n)};
    };

    OracleEstimate est(dim);
    est.samples = samples;
    std::tie(est.mean.volume, est.volume_se) = mean_se(total.vol, total.vol2);
    est.mean.normal_sym.for_each_index([&](const std::array<int, 4>& x) {
        const std::size_t f = ((x[0] * 3 + x[1]) * 3 + x[2]) * 3 + x[3];
        std::tie(est.mean.normal_sym.at(x), est.normal_se.at(x)) = mean_se(total.n[f], total.n2[f]);
        std::tie(est.mean.tangential_sym.at(x), est.tangential_se.at(x)) = mean_se(total.t[f], total.t2[f]);
    });
    return est;
}

ExpectationCheck check_expectations(double gamma, int dim, std::int64_t samples, std::uint64_t seed,
                                    double max_sigma, double volume_tol, int threads)
{
    const auto est = expectation_oracle(OrientationDistribution::cone(gamma, dim), samples, seed, threads);
    const auto exact = closed_expectations(gamma, dim);
    ExpectationCheck c;
    c.gamma = gamma;
    c.volume_diff = std::fabs(est.mean.volume - exact.volume);
    auto scan = [&](const Tensor4& mean, const Tensor4& se, const Tensor4& ref) {
        mean.for_each_index([&](const std::array<int, 4>& i) {
            const double diff = std::fabs(mean.at(i) - ref.at(i));
            const double z = se.at(i) > 0.0 ? diff / se.at(i) : (diff <= 1e-12 ? 0.0 : INFINITY);
            c.max_z = std::max(c.max_z, z);
        });
    };
    scan(est.mean.normal_sym, est.normal_se, exact.normal_sym);
    scan(est.mean.tangential_sym, est.tangential_se, exact.tangential_sym);
    c.pass = c.max_z <= max_sigma && c.volume_diff <= volume_tol;
    return c;
}

Expectations closed_expectations(double gamma, int dim)
{
    if (!(gamma >= 0.0 && gamma <= pi))
        throw std::invalid_argument("cone angle must lie in [0, pi]");
    Expectations ex(dim);
    const Tensor4 is = identity_sym(dim), iv = identity_vol(dim);
    if (dim == 2) {
        const double k = gamma == 0.0 ? 3.0 / 8.0 : 3.0 * std::sin(2 * gamma) / (16.0 * gamma);
        ex.volume = gamma == 0.0 ? 1.0 : std::sin(gamma) / gamma;
        ex.normal_sym = is * 0.25 + iv * k;
        ex.tangential_sym = is * 0.25 - iv * k;
    } else {
        const double c = std::cos(gamma), c2 = std::cos(2 * gamma);
        const double k = (2 * c + c2 + 1) / 20.0;
        const double h = std::cos(gamma / 2);
        ex.volume = h * h;
        ex.normal_sym = is * ((2 * c + c2 + 21) / 180.0) + iv * k;
        ex.tangential_sym = is * ((39 - 2 * c - c2) / 180.0) - iv * k;
    }
    return ex;
}

Expectations general_expectations(const ChiMoments& m, int dim)
{
    Expectations ex(dim);
    const Tensor4 is = identity_sym(dim), iv = identity_vol(dim);
    ex.volume = m.i1;
    if (dim == 2) {
        ex.normal_sym = is * 0.25 + iv * (3.0 * m.i2 / 8.0);
        ex.tangential_sym = is * 0.25 - iv * (3.0 * m.i2 / 8.0);
    } else {
        ex.normal_sym = is * ((m.i2 + 7.0) / 60.0) + iv * ((3.0 * m.i2 + 1.0) / 20.0);
        ex.tangential_sym = is * ((13.0 - m.i2) / 60.0) - iv * ((3.0 * m.i2 + 1.0) / 20.0);
    }
    return ex;
}

Tensor4 elastic_tensor_meso(const MaterialParams& params, const Expectations& ex)
{
    params.validate();
    if (std::fabs(ex.volume) < 1e-12)
        throw std::domain_error("degenerate volume expectation");
    const int dim = ex.normal_sym.dim();
    const double scale = dim * params.e0 / ex.volume;
    return symmetrize_minor((ex.normal_sym + ex.tangential_sym * params.alpha) * scale);
}

Tensor4 macro_tensor(const ElasticConstants& ec)
{
    const double nu = ec.nu, e = ec.e;
    double vol;
    if (ec.mode == AnalysisMode::PlaneStress) {
        if (std::fabs(1.0 - nu * nu) < 1e-14)
            throw std::domain_error("singular Poisson's ratio for plane stress");
        vol = 3.0 * e * nu / (1.0 - nu * nu);
    } else {
        if (std::fabs((1.0 + nu) * (1.0 - 2.0 * nu)) < 1e-14)
            throw std::domain_error("singular Poisson's ratio");
        vol = 3.0 * e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    }
    const int dim = dimension_of(ec.mode);
    return identity_sym(dim) * (e / (1.0 + nu)) + identity_vol(dim) * vol;
}

ElasticConstants constants_from_tensor(const Tensor4& d, AnalysisMode mode)
{
    if (d.dim() != dimension_of(mode))
        throw std::invalid_argument("tensor dimension does not match analysis mode");
    const auto [a, b] = isotropic_coefficients(d);
    const double den = mode == AnalysisMode::PlaneStress ? 3 * a + b : 3 * a + 2 * b;
    if (std::fabs(den) < 1e-300)
        throw std::domain_error("tensor has no finite Poisson's ratio");
    ElasticConstants ec;
    ec.mode = mode;
    ec.nu = b / den;
    ec.e = a * (1.0 + ec.nu);
    return ec;
}

ElasticConstants predict_general(double alpha, double i1, double i2, AnalysisMode mode, double e0)
{
    require_alpha(alpha);
    if (!(i2 >= -1.0 && i2 <= 1.0))
        throw std::invalid_argument("I2 must lie in [-1, 1]");
    if (!(i1 > 0.0))
        throw std::invalid_argument("I1 must be positive");
    Quadratic nu_num{i2, -i2, 0}, nu_den, e_num, e_den;
    switch (mode) {
    case AnalysisMode::PlaneStress:
        nu_den = {2 + i2, 2 - i2, 0};
        e_num = {1 + i2, 2, 1 - i2};
        e_den = {(2 + i2) * i1, (2 - i2) * i1, 0};
        break;
    case AnalysisMode::PlaneStrain:
        nu_den = {2 * (1 + i2), 2 * (1 - i2), 0};
        e_num = {2 + 3 * i2, 4, 2 - 3 * i2};
        e_den = {4 * (1 + i2) * i1, 4 * (1 - i2) * i1, 0};
        break;
    case AnalysisMode::ThreeD: {
        nu_num = {3 * i2 + 1, -(3 * i2 + 1), 0};
        nu_den = {7 * i2 + 9, 11 - 7 * i2, 0};
        // ((I2 + 7) + (13 - I2) a) ((1 + I2) + (1 - I2) a)
        const double p0 = i2 + 7, p1 = 13 - i2, q0 = 1 + i2, q1 = 1 - i2;
        e_num = {p0 * q0, p0 * q1 + p1 * q0, p1 * q1};
        e_den = {2 * (7 * i2 + 9) * i1, 2 * (11 - 7 * i2) * i1, 0};
        break;
    }
    }
    ElasticConstants ec;
    ec.mode = mode;
    ec.nu = rational(nu_num, nu_den, alpha, "Poisson's ratio");
    ec.e = e0 * rational(e_num, e_den, alpha, "elastic modulus");
    return ec;
}

ElasticConstants predict_limit(double alpha, AnalysisMode mode, double e0)
{
    require_alpha(alpha);
    ElasticConstants ec;
    ec.mode = mode;
    const double inf = std::numeric_limits<double>::infinity();
    if (std::isinf(alpha)) {
        switch (mode) {
        case AnalysisMode::PlaneStress: ec.nu = -1.0; ec.e = 2.0 * e0; break;
        case AnalysisMode::PlaneStrain: ec.nu = -inf; ec.e = -inf; break;
        case AnalysisMode::ThreeD: ec.nu = -1.0; ec.e = 3.0 * e0; break;
        }
        return ec;
    }
    switch (mode) {
    case AnalysisMode::PlaneStress:
        ec.nu = (1 - alpha) / (3 + alpha);
        ec.e = e0 * (2 + 2 * alpha) / (3 + alpha);
        break;
    case AnalysisMode::PlaneStrain:
        ec.nu = (1 - alpha) / 4;
        ec.e = e0 * (1 + alpha) * (5 - alpha) / 8;
        break;
    case AnalysisMode::ThreeD:
        ec.nu = (1 - alpha) / (4 + alpha);
        ec.e = e0 * (2 + 3 * alpha) / (4 + alpha);
        break;
    }
    return ec;
}

ElasticConstants predict_cone(double alpha, double gamma, AnalysisMode mode, double e0)
{
    require_alpha(alpha);
    if (!(gamma >= 0.0 && gamma <= pi))
        throw std::invalid_argument("cone angle must lie in [0, pi]");
    if (gamma == 0.0)
        return predict_limit(alpha, mode, e0);
    if (std::isinf(alpha)) {
        const auto m = cone_moments(gamma, dimension_of(mode));
        return predict_general(alpha, m.i1, m.i2, mode, e0);
    }
    ElasticConstants ec;
    ec.mode = mode;
    const double ap = 1 + alpha, am = 1 - alpha;
    if (mode == AnalysisMode::ThreeD) {
        const double c = std::cos(gamma);
        const double cc = c + c * c;
        if (1.0 + c < 1e-12)
            throw std::domain_error("degenerate volume expectation (gamma = pi in 3D)");
        const double den = am * (7 * cc - 20) + 30;
        ec.nu = 3 * am * cc / den;
        ec.e = e0 * 2 * (am * (cc - 20) + 30) * (am * (cc - 2) + 3) / (3 * (1 + c) * den);
        return ec;
    }
    const double s1 = std::sin(gamma), s2 = std::sin(2 * gamma);
    if (std::fabs(s1) < 1e-12)
        throw std::domain_error("degenerate volume expectation (gamma = pi in 2D)");
    if (mode == AnalysisMode::PlaneStress) {
        const double den = 4 * ap * gamma + am * s2;
        ec.nu = am * s2 / den;
        ec.e = e0 * (2 * ap * ap * gamma * gamma + am * ap * gamma * s2) / (s1 * den);
    } else {
        const double den = 4 * ap * gamma + 2 * am * s2;
        ec.nu = am * s2 / den;
        ec.e = e0 * (4 * ap * ap * gamma * gamma + 3 * am * ap * gamma * s2) / (s1 * (8 * ap * gamma + 4 * am * s2));
    }
    return ec;
}

std::vector<double> stationary_gammas(int dim)
{
    if (dim == 3)
        return {0.0, std::acos(-0.5), pi};
    // Root of 2g = tan 2g in (pi/2, pi), bracketed through the pole-free
    // form sin 2g - 2g cos 2g, which decreases monotonically there.
    auto g = [](double x) { return std::sin(2 * x) - 2 * x * std::cos(2 * x); };
    double lo = pi / 2 + 1e-6, hi = pi - 1e-6;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? lo : hi) = mid;
    }
    return {0.0, 0.5 * (lo + hi)};
}

NuInterval nu_interval(AnalysisMode mode, double i2)
{
    if (!(i2 >= -1.0 && i2 <= 1.0))
        throw std::invalid_argument("I2 must lie in [-1, 1]");
    const auto at0 = predict_general(0.0, 1.0, i2, mode);
    const auto atinf = predict_general(std::numeric_limits<double>::infinity(), 1.0, i2, mode);
    return {std::min(at0.nu, atinf.nu), std::max(at0.nu, atinf.nu)};
}

NuInterval nu_interval_cone(AnalysisMode mode, double gamma)
{
    return nu_interval(mode, cone_moments(gamma, dimension_of(mode)).i2);
}

}  // namespace rbsn
