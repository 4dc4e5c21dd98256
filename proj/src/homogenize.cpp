#include "rbsn/homogenize.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

#include "rbsn/errors.hpp"
#include "rbsn/parallel.hpp"

namespace rbsn {

MacroState bagi_stress(const Tessellation& t, const std::vector<ContactState>& states, double margin)
{
    if (margin < 0.0)
        throw std::invalid_argument("stress window margin must be non-negative");
    if (states.size() != t.contacts.size())
        throw std::invalid_argument("one contact state per element expected");
    MacroState m;
    m.margin = margin;
    const double w = t.domain.width() - 2 * margin, h = t.domain.height() - 2 * margin;
    if (!(w > 0.0 && h > 0.0))
        throw std::invalid_argument("stress window margin leaves no interior");
    m.v_inner = w * h;
    Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < t.contacts.size(); ++i) {
        const auto& e = t.contacts[i];
        if (!(t.domain.distance_to_boundary(e.centroid) > margin))
            continue;
        const Vec2 branch = t.nodes[e.b] - t.nodes[e.a];
        const Vec2 f = states[i].force;
        sum += Eigen::Vector2d(f.x, f.y) * Eigen::RowVector2d(branch.x, branch.y);
        ++m.contacts;
    }
    if (m.contacts == 0)
        throw std::invalid_argument("no contacts inside the stress window");
    m.sigma = 0.5 * (sum + sum.transpose()) / m.v_inner;
    return m;
}

Eigen::Matrix2d strain_from_regression(const Tessellation& t, const DofVector& d, const std::vector<char>& excluded)
{
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        if (excluded.empty() || !excluded[i])
            rows.push_back(i);
    Eigen::MatrixXd a(rows.size(), 3);
    Eigen::MatrixXd b(rows.size(), 2);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Vec2 x = t.nodes[rows[r]];
        a.row(r) << x.x, x.y, 1.0;
        b.row(r) = d.segment<2>(dofs_per_node * static_cast<Eigen::Index>(rows[r])).transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (rows.size() < 3 || qr.rank() < 3)
        throw std::domain_error("strain regression is rank deficient: nodes are collinear or too few");
    const Eigen::MatrixXd coef = qr.solve(b);  // rows: d/dx, d/dy, offset
    Eigen::Matrix2d grad = coef.topRows<2>().transpose();
    return 0.5 * (grad + grad.transpose());
}

ElasticConstants extract_constants(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& eps, AnalysisMode mode)
{
    const double s11 = sigma(0, 0), s22 = sigma(1, 1), e11 = eps(0, 0), e22 = eps(1, 1);
    const double scale = std::max(std::abs(e11), std::abs(e22));
    if (!(scale > 0.0))
        throw std::invalid_argument("strain is zero; choose a non-zero (p, q)");
    if (std::abs(eps(0, 1)) > 1e-12 * scale || std::abs(eps(1, 0)) > 1e-12 * scale)
        throw std::invalid_argument("constant extraction requires eps12 = 0");
    if (std::abs(e11 - e22) <= 1e-12 * scale || std::abs(e11 + e22) <= 1e-12 * scale)
        throw std::invalid_argument("eps11 = +-eps22 makes the constants undetermined; choose p != +-q");
    ElasticConstants c;
    c.mode = mode;
    switch (mode) {
    case AnalysisMode::PlaneStress: {
        const double den = s11 * e11 - s22 * e22;
        if (den == 0.0)
            throw std::domain_error("vanishing denominator in plane-stress extraction; choose a different (p, q)");
        c.nu = (s22 * e11 - s11 * e22) / den;
        c.e = (s11 * s11 - s22 * s22) / den;
        break;
    }
    case AnalysisMode::PlaneStrain: {
        const double sum = s11 + s22, de = e11 - e22;
        if (sum == 0.0)
            throw std::domain_error("vanishing denominator in plane-strain extraction; choose a different (p, q)");
        c.nu = (s22 * e11 - s11 * e22) / (sum * de);
        c.e = (s11 - s22) * (e11 * (s11 + 2 * s22) - e22 * (2 * s11 + s22)) / (de * de * sum);
        break;
    }
    case AnalysisMode::ThreeD:
        throw std::invalid_argument("constant extraction is two-dimensional only");
    }
    return c;
}

std::vector<SweepRow> alpha_sweep(const Tessellation& t, const std::vector<double>& alphas, const SweepOptions& options)
{
    if (alphas.empty())
        throw std::invalid_argument("alpha list is empty");
    const auto stats = chi_statistics(t.contacts);
    const auto load = StrainLoad::uniaxial(options.p, options.q);
    std::vector<SweepRow> rows(alphas.size());
    // Rows run in parallel; each solve stays single-threaded.
    parallel_for(alphas.size(), options.threads, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.alpha = alphas[i];
        row.kind = t.kind;
        row.seed = t.seed;
        row.i1 = stats.i1;
        row.i2 = stats.i2;
        row.nu_numeric = row.e_numeric = row.nu_predicted = row.e_predicted = std::nan("");
        try {
            const MaterialParams params{options.e0, alphas[i]};
            const auto pred = predict_general(alphas[i], stats.i1, stats.i2, options.mode, options.e0);
            row.nu_predicted = pred.nu;
            row.e_predicted = pred.e;
            const auto sim = simulate(t, params, load, options.solver, 1);
            const auto macro = bagi_stress(t, sim.states, options.margin * t.l_min);
            const auto c = extract_constants(macro.sigma, load.eps, options.mode);
            row.nu_numeric = c.nu;
            row.e_numeric = c.e;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

StructureTensors structure_tensor_check(const std::vector<ContactElement>& elements, const MaterialParams& params,
                                        double volume)
{
    params.validate();
    if (!(std::abs(volume) > 0.0))
        throw std::invalid_argument("structure volume must be non-zero");
    StructureTensors out;
    Tensor4 sum(2);
    double weight = 0.0, c1 = 0.0, c2 = 0.0;
    for (const auto& e : elements) {
        const auto st = script_tensors(make_vector(e.normal.x, e.normal.y), rotation_2d(e.chi));
        const double w = e.area * e.length;
        sum += (st.normal + st.tangential * params.alpha) * (w * params.e0);
        weight += w;
        c1 += w * std::cos(e.chi);
        c2 += w * std::cos(2.0 * e.chi);
    }
    if (!(weight > 0.0))
        throw std::invalid_argument("structure has no contacts");
    out.structure = symmetrize_minor(sum / volume);
    out.i1 = c1 / weight;
    out.i2 = c2 / weight;
    out.analytic = elastic_tensor_meso(params, general_expectations({out.i1, out.i2}, 2));
    return out;
}

}  // namespace rbsn
