#include "rbsn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace rbsn {

namespace {

constexpr double panel_w = 440, panel_h = 330;
constexpr double left = 62, right = 16, top = 34, bottom = 48;
constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string fmt(double v, int prec = 2)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    std::string s = buf;
    if (s == "-0" || s == "-0.0" || s == "-0.00")
        s.erase(0, 1);
    return s;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range
{
    double lo = INFINITY, hi = -INFINITY;
    void add(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void settle()
    {
        if (!(lo <= hi))
            lo = 0, hi = 1;
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

double nice_step(double span)
{
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

int decimals(double step)
{
    return std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
}

void render_panel(std::string& out, const Panel& p, int index)
{
    if (p.series.empty())
        throw std::invalid_argument("panel '" + p.title + "' has no series");
    Range xr, yr;
    for (const auto& s : p.series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw std::invalid_argument("series '" + s.label + "' is empty or has mismatched x/y lengths");
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                xr.add(s.x[i]);
                yr.add(s.y[i]);
            }
    }
    if (std::isfinite(p.y_min))
        yr.lo = p.y_min;
    if (std::isfinite(p.y_max))
        yr.hi = p.y_max;
    xr.settle();
    yr.settle();
    const double ox = index * panel_w;
    const double pw = panel_w - left - right, ph = panel_h - top - bottom;
    auto sx = [&](double x) { return ox + left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto sy = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    const std::string clip = "clip" + std::to_string(index);
    out += "<clipPath id=\"" + clip + "\"><rect x=\"" + fmt(ox + left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw)
           + "\" height=\"" + fmt(ph) + "\"/></clipPath>\n";
    out += "<rect x=\"" + fmt(ox + left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph)
           + "\" fill=\"none\" stroke=\"#000\"/>\n";
    out += "<text x=\"" + fmt(ox + left + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
           + escape(p.title) + "</text>\n";

    for (int axis = 0; axis < 2; ++axis) {
        const Range& r = axis == 0 ? xr : yr;
        const double step = nice_step(r.hi - r.lo);
        const int prec = decimals(step);
        for (double v = std::ceil(r.lo / step - 1e-9) * step; v <= r.hi + 1e-9 * step; v += step) {
            if (axis == 0) {
                const double x = sx(v);
                out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(top + ph) + "\" x2=\"" + fmt(x) + "\" y2=\""
                       + fmt(top + ph + 5) + "\" stroke=\"#000\"/>";
                out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(top + ph + 18)
                       + "\" text-anchor=\"middle\" font-size=\"11\">" + fmt(v, prec) + "</text>\n";
            } else {
                const double y = sy(v);
                out += "<line x1=\"" + fmt(ox + left - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(ox + left)
                       + "\" y2=\"" + fmt(y) + "\" stroke=\"#000\"/>";
                out += "<text x=\"" + fmt(ox + left - 8) + "\" y=\"" + fmt(y + 4)
                       + "\" text-anchor=\"end\" font-size=\"11\">" + fmt(v, prec) + "</text>\n";
            }
        }
    }
    out += "<text x=\"" + fmt(ox + left + pw / 2) + "\" y=\"" + fmt(panel_h - 10)
           + "\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.x_label) + "</text>\n";
    out += "<text transform=\"translate(" + fmt(ox + 16) + "," + fmt(top + ph / 2)
           + ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.y_label) + "</text>\n";

    out += "<g clip-path=\"url(#" + clip + ")\" fill=\"none\" stroke-width=\"1.5\">\n";
    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const auto& s = p.series[k];
        const char* color = palette[k % std::size(palette)];
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                    out += "<circle cx=\"" + fmt(sx(s.x[i])) + "\" cy=\"" + fmt(sy(s.y[i])) + "\" r=\"3\" stroke=\""
                           + color + "\"/>\n";
            continue;
        }
        std::string d;
        bool pen = false;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                pen = false;
                continue;
            }
            d += (pen ? " L" : (d.empty() ? "M" : " M")) + fmt(sx(s.x[i])) + "," + fmt(sy(s.y[i]));
            pen = true;
        }
        out += "<path d=\"" + d + "\" stroke=\"" + color + "\"/>\n";
    }
    out += "</g>\n";

    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const double y = top + 14 + 15 * static_cast<double>(k);
        const double x = ox + left + pw - 150;
        const char* color = palette[k % std::size(palette)];
        if (p.series[k].markers)
            out += "<circle cx=\"" + fmt(x + 10) + "\" cy=\"" + fmt(y - 4) + "\" r=\"3\" fill=\"none\" stroke=\""
                   + color + "\"/>";
        else
            out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y - 4) + "\" x2=\"" + fmt(x + 20) + "\" y2=\""
                   + fmt(y - 4) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>";
        out += "<text x=\"" + fmt(x + 26) + "\" y=\"" + fmt(y) + "\" font-size=\"11\">" + escape(p.series[k].label)
               + "</text>\n";
    }
}

std::string mode_label(AnalysisMode m)
{
    switch (m) {
    case AnalysisMode::PlaneStress: return "2D plane stress";
    case AnalysisMode::PlaneStrain: return "2D plane strain";
    case AnalysisMode::ThreeD: return "3D";
    }
    return "";
}

constexpr AnalysisMode all_modes[] = {AnalysisMode::PlaneStress, AnalysisMode::PlaneStrain, AnalysisMode::ThreeD};

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

template <typename F>
double guarded(F&& f)
{
    try {
        return f();
    } catch (const std::exception&) {
        return std::nan("");
    }
}

}  // namespace

std::string emit_svg(const std::vector<Panel>& panels)
{
    if (panels.empty())
        throw std::invalid_argument("nothing to plot");
    const double w = panel_w * static_cast<double>(panels.size());
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w, 0) + "\" height=\"" + fmt(panel_h, 0)
           + "\" viewBox=\"0 0 " + fmt(w, 0) + " " + fmt(panel_h, 0) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        render_panel(out, panels[i], static_cast<int>(i));
    out += "</svg>\n";
    return out;
}

CsvTable panels_csv(const std::vector<Panel>& panels)
{
    CsvTable t({"panel", "series", "x", "y"});
    for (const auto& p : panels)
        for (const auto& s : p.series)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                t.add_row({'"' + p.title + '"', '"' + s.label + '"', format_double(s.x[i]), format_double(s.y[i])});
    return t;
}

std::vector<Panel> figure_alpha_curves(const std::vector<double>& gammas, int points)
{
    Panel nu{"Poisson's ratio", "alpha [-]", "nu [-]", {}};
    Panel e{"Elastic modulus", "alpha [-]", "E / E0 [-]", {}};
    const auto alphas = linspace(0.0, 3.0, points);
    for (double g : gammas)
        for (auto m : all_modes) {
            const std::string label = mode_label(m) + (gammas.size() > 1 ? ", gamma=" + fmt(g, 3) : "");
            Series sn{label, alphas, {}}, se{label, alphas, {}};
            for (double a : alphas) {
                const auto c = [&] {
                    try {
                        return predict_cone(a, g, m);
                    } catch (const std::exception&) {
                        return ElasticConstants{std::nan(""), std::nan(""), m};
                    }
                }();
                sn.y.push_back(c.nu);
                se.y.push_back(c.e);
            }
            nu.series.push_back(std::move(sn));
            e.series.push_back(std::move(se));
        }
    return {nu, e};
}

std::vector<Panel> figure_gamma_curves(const std::vector<double>& alphas, int points)
{
    std::vector<Panel> out;
    const auto gammas = linspace(0.0, 3.141592653589793, points);
    for (auto m : all_modes) {
        Panel p{mode_label(m), "gamma [rad]", "nu [-]", {}};
        for (double a : alphas) {
            Series s{"alpha=" + fmt(a, 2), gammas, {}};
            for (double g : gammas)
                s.y.push_back(guarded([&] { return predict_cone(a, g, m).nu; }));
            p.series.push_back(std::move(s));
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Panel> figure_i2_curves(const std::vector<double>& alphas, int points)
{
    std::vector<Panel> out;
    const auto i2s = linspace(-1.0, 1.0, points);
    for (auto m : all_modes) {
        Panel p{mode_label(m), "I2 [-]", "nu [-]", {}};
        p.y_min = -1.0;
        p.y_max = 0.5;
        for (double a : alphas) {
            Series s{"alpha=" + fmt(a, 2), i2s, {}};
            for (double i2 : i2s)
                s.y.push_back(guarded([&] { return predict_general(a, 1.0, i2, m).nu; }));
            p.series.push_back(std::move(s));
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Panel> sweep_panels(const std::vector<SweepRow>& rows)
{
    Panel nu{"Poisson's ratio", "alpha [-]", "nu [-]", {}};
    Panel e{"Elastic modulus", "alpha [-]", "E / E0 [-]", {}};
    std::map<TessellationKind, std::vector<const SweepRow*>> by_kind;
    for (const auto& r : rows)
        by_kind[r.kind].push_back(&r);
    for (const auto& [kind, list] : by_kind) {
        const std::string name = to_string(kind);
        Series nn{name + " numeric", {}, {}, true}, np{name + " predicted", {}, {}};
        Series en{name + " numeric", {}, {}, true}, ep{name + " predicted", {}, {}};
        for (const auto* r : list) {
            for (Series* s : {&nn, &np, &en, &ep})
                s->x.push_back(r->alpha);
            nn.y.push_back(r->nu_numeric);
            np.y.push_back(r->nu_predicted);
            en.y.push_back(r->e_numeric);
            ep.y.push_back(r->e_predicted);
        }
        nu.series.push_back(std::move(nn));
        nu.series.push_back(std::move(np));
        e.series.push_back(std::move(en));
        e.series.push_back(std::move(ep));
    }
    return {nu, e};
}

CsvTable sweep_csv(const std::vector<SweepRow>& rows)
{
    CsvTable t({"kind", "seed", "alpha", "nu_num", "E_num", "nu_pred", "E_pred", "I1", "I2"});
    for (const auto& r : rows)
        t.add_row({to_string(r.kind), std::to_string(r.seed), format_double(r.alpha), format_double(r.nu_numeric),
                   format_double(r.e_numeric), format_double(r.nu_predicted), format_double(r.e_predicted),
                   format_double(r.i1), format_double(r.i2)});
    return t;
}

}  // namespace rbsn
