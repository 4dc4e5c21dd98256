#include <mutex>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rbsn/errors.hpp"
#include "rbsn/homogenize.hpp"
#include "rbsn/io.hpp"
#include "rbsn/log.hpp"
#include "rbsn/report.hpp"

namespace py = pybind11;
using namespace rbsn;

namespace {

// Runs f without the GIL, then replays collected library warnings through
// the Python warnings module.
template <typename F>
auto call_with_warnings(F&& f)
{
    std::vector<std::string> messages;
    std::mutex mutex;
    const auto previous = set_warning_handler([&](const std::string& m) {
        std::lock_guard lock(mutex);
        messages.push_back(m);
    });
    struct Restore
    {
        WarningHandler handler;
        ~Restore() { set_warning_handler(std::move(handler)); }
    } restore{previous};
    auto result = [&] {
        py::gil_scoped_release release;
        return f();
    }();
    auto warn = py::module_::import("warnings").attr("warn");
    for (const auto& m : messages)
        warn(m, py::module_::import("builtins").attr("RuntimeWarning"), 2);
    return result;
}

py::dict constants_dict(const ElasticConstants& c)
{
    py::dict d;
    d["nu"] = c.nu;
    d["E"] = c.e;
    d["mode"] = to_string(c.mode);
    return d;
}

py::array_t<double> tensor4_array(const Tensor4& t)
{
    const int n = t.dim();
    py::array_t<double> a({n, n, n, n});
    auto r = a.mutable_unchecked<4>();
    t.for_each_index([&](const std::array<int, 4>& i) { r(i[0], i[1], i[2], i[3]) = t.at(i); });
    return a;
}

py::array_t<double> matrix_array(const Eigen::Matrix2d& m)
{
    py::array_t<double> a({2, 2});
    auto r = a.mutable_unchecked<2>();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = m(i, j);
    return a;
}

py::array_t<double> points_array(const std::vector<Vec2>& points)
{
    py::array_t<double> a({static_cast<py::ssize_t>(points.size()), py::ssize_t{2}});
    auto r = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < points.size(); ++i) {
        r(i, 0) = points[i].x;
        r(i, 1) = points[i].y;
    }
    return a;
}

py::dict row_dict(const SweepRow& r)
{
    py::dict d;
    d["kind"] = to_string(r.kind);
    d["seed"] = r.seed;
    d["alpha"] = r.alpha;
    d["nu"] = r.nu_numeric;
    d["E"] = r.e_numeric;
    d["nu_predicted"] = r.nu_predicted;
    d["E_predicted"] = r.e_predicted;
    d["I1"] = r.i1;
    d["I2"] = r.i2;
    d["error"] = r.error.empty() ? py::object(py::none()) : py::object(py::str(r.error));
    return d;
}

}  // namespace

PYBIND11_MODULE(_rbsn, m)
{
    m.doc() = "Rigid-body-spring networks: elastic predictions, tessellations and homogenization";

    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    // Theory -----------------------------------------------------------------

    m.def(
        "predict_limit",
        [](double alpha, const std::string& mode, double e0) {
            return constants_dict(predict_limit(alpha, analysis_mode_from_string(mode), e0));
        },
        py::arg("alpha"), py::arg("mode") = "ps", py::arg("e0") = 1.0,
        "Constants for perfectly aligned contacts (gamma -> 0). E is in units of e0.");
    m.def(
        "predict_cone",
        [](double alpha, double gamma, const std::string& mode, double e0) {
            return constants_dict(predict_cone(alpha, gamma, analysis_mode_from_string(mode), e0));
        },
        py::arg("alpha"), py::arg("gamma"), py::arg("mode") = "ps", py::arg("e0") = 1.0,
        "Constants for a uniform cone of half-angle gamma [rad].");
    m.def(
        "predict_general",
        [](double alpha, double i1, double i2, const std::string& mode, double e0) {
            return constants_dict(predict_general(alpha, i1, i2, analysis_mode_from_string(mode), e0));
        },
        py::arg("alpha"), py::arg("i1"), py::arg("i2"), py::arg("mode") = "ps", py::arg("e0") = 1.0);
    m.def(
        "cone_moments",
        [](double gamma, int dim) {
            const auto c = cone_moments(gamma, dim);
            return py::make_tuple(c.i1, c.i2);
        },
        py::arg("gamma"), py::arg("dim") = 2, "(I1, I2) of the uniform cone.");
    m.def("stationary_gammas", &stationary_gammas, py::arg("dim") = 2);
    m.def(
        "nu_interval",
        [](const std::string& mode, double i2) {
            const auto iv = nu_interval(analysis_mode_from_string(mode), i2);
            return py::make_tuple(iv.lo, iv.hi);
        },
        py::arg("mode"), py::arg("i2"), "Range of nu over alpha in [0, inf).");
    m.def(
        "nu_interval_cone",
        [](const std::string& mode, double gamma) {
            const auto iv = nu_interval_cone(analysis_mode_from_string(mode), gamma);
            return py::make_tuple(iv.lo, iv.hi);
        },
        py::arg("mode"), py::arg("gamma"));
    m.def(
        "closed_expectations",
        [](double gamma, int dim) {
            const auto e = closed_expectations(gamma, dim);
            py::dict d;
            d["volume"] = e.volume;
            d["normal"] = tensor4_array(e.normal_sym);
            d["tangential"] = tensor4_array(e.tangential_sym);
            return d;
        },
        py::arg("gamma"), py::arg("dim") = 2);
    m.def(
        "check_expectations",
        [](double gamma, int dim, std::int64_t samples, std::uint64_t seed, double max_sigma, double volume_tol,
           int threads) {
            const auto c = call_with_warnings(
                [&] { return check_expectations(gamma, dim, samples, seed, max_sigma, volume_tol, threads); });
            py::dict d;
            d["gamma"] = c.gamma;
            d["max_z"] = c.max_z;
            d["volume_diff"] = c.volume_diff;
            d["pass"] = c.pass;
            return d;
        },
        py::arg("gamma"), py::arg("dim") = 2, py::arg("samples") = 1000000, py::arg("seed") = 1,
        py::arg("max_sigma") = 3.0, py::arg("volume_tol") = 5e-3, py::arg("threads") = 1,
        "Monte Carlo check of the closed-form expectations for one cone angle.");

    // Geometry ---------------------------------------------------------------

    py::class_<Tessellation>(m, "Tessellation")
        .def_property_readonly("kind", [](const Tessellation& t) { return to_string(t.kind); })
        .def_readonly("seed", &Tessellation::seed)
        .def_readonly("l_min", &Tessellation::l_min)
        .def_property_readonly("domain",
                               [](const Tessellation& t) {
                                   return py::make_tuple(t.domain.min.x, t.domain.min.y, t.domain.max.x, t.domain.max.y);
                               })
        .def_property_readonly("nodes", [](const Tessellation& t) { return points_array(t.nodes); })
        .def_property_readonly("vertices", [](const Tessellation& t) { return points_array(t.vertices); })
        .def_property_readonly("contact_count", [](const Tessellation& t) { return t.contacts.size(); })
        .def_property_readonly("chi",
                               [](const Tessellation& t) {
                                   py::array_t<double> a(static_cast<py::ssize_t>(t.contacts.size()));
                                   auto r = a.mutable_unchecked<1>();
                                   for (std::size_t i = 0; i < t.contacts.size(); ++i)
                                       r(i) = t.contacts[i].chi;
                                   return a;
                               })
        .def("to_json", &tessellation_to_json)
        .def_static("from_json", &tessellation_from_json, py::arg("text"))
        .def("save", [](const Tessellation& t, const std::filesystem::path& p) { save_tessellation(t, p); })
        .def_static("load", &load_tessellation, py::arg("path"))
        .def("__len__", [](const Tessellation& t) { return t.nodes.size(); })
        .def("__repr__", [](const Tessellation& t) {
            return "<Tessellation kind=" + to_string(t.kind) + " nodes=" + std::to_string(t.nodes.size())
                   + " contacts=" + std::to_string(t.contacts.size()) + ">";
        });

    m.def(
        "generate",
        [](const std::string& kind, double width, double height, double l_min, std::uint64_t seed) {
            const auto k = tessellation_kind_from_string(kind);
            return call_with_warnings([&] { return generate(k, width, height, l_min, seed); });
        },
        py::arg("kind"), py::arg("width"), py::arg("height"), py::arg("l_min") = 1.0, py::arg("seed") = 0,
        "Tessellation of [0, width] x [0, height] (in units of l_min). Kinds: voronoi, rand-voronoi, random, "
        "centered.");
    m.def(
        "chi_statistics",
        [](const Tessellation& t, int bins) {
            const auto s = chi_statistics(t.contacts, bins);
            py::dict d;
            d["I1"] = s.i1;
            d["I2"] = s.i2;
            d["count"] = s.sample_count;
            d["bin_edges"] = s.bin_edges;
            d["density"] = s.density;
            return d;
        },
        py::arg("tessellation"), py::arg("bins") = 80);
    m.def(
        "structure_tensor_check",
        [](const Tessellation& t, double alpha, double e0) {
            const auto st = structure_tensor_check(t.contacts, {e0, alpha}, element_volume_sum(t.contacts));
            py::dict d;
            d["structure"] = tensor4_array(st.structure);
            d["analytic"] = tensor4_array(st.analytic);
            d["I1"] = st.i1;
            d["I2"] = st.i2;
            return d;
        },
        py::arg("tessellation"), py::arg("alpha"), py::arg("e0") = 1.0,
        "Per-structure elastic tensor next to the tensor predicted from the structure's angle moments.");

    // Simulation -------------------------------------------------------------

    m.def(
        "homogenize",
        [](const Tessellation& t, double alpha, double e0, const std::string& mode, double p, double q, double margin,
           int threads) {
            const auto am = analysis_mode_from_string(mode);
            const MaterialParams params{e0, alpha};
            const auto load = StrainLoad::uniaxial(p, q);
            struct Out
            {
                Simulation sim;
                MacroState macro;
                ElasticConstants constants;
            };
            const auto out = call_with_warnings([&] {
                Out o;
                o.sim = simulate(t, params, load, {}, threads);
                o.macro = bagi_stress(t, o.sim.states, margin * t.l_min);
                o.constants = extract_constants(o.macro.sigma, load.eps, am);
                return o;
            });
            const auto stats = chi_statistics(t.contacts);
            py::dict d = constants_dict(out.constants);
            d["sigma"] = matrix_array(out.macro.sigma);
            d["eps"] = matrix_array(load.eps);
            d["residual_force"] = out.sim.residual.force;
            d["residual_moment"] = out.sim.residual.moment;
            d["predicted"] = constants_dict(predict_general(alpha, stats.i1, stats.i2, am, e0));
            d["I1"] = stats.i1;
            d["I2"] = stats.i2;
            return d;
        },
        py::arg("tessellation"), py::arg("alpha"), py::arg("e0") = 1.0, py::arg("mode") = "ps", py::arg("p") = 1e-3,
        py::arg("q") = 0.0, py::arg("margin") = 3.0, py::arg("threads") = 1,
        "Solve under boundary strain diag(p, q) and return effective constants. margin is in units of l_min.");
    m.def(
        "alpha_sweep",
        [](const Tessellation& t, const std::vector<double>& alphas, double e0, const std::string& mode, double p,
           double q, double margin, int threads) {
            SweepOptions o;
            o.e0 = e0;
            o.mode = analysis_mode_from_string(mode);
            o.p = p;
            o.q = q;
            o.margin = margin;
            o.threads = threads;
            const auto rows = call_with_warnings([&] { return alpha_sweep(t, alphas, o); });
            py::list out;
            for (const auto& r : rows)
                out.append(row_dict(r));
            return out;
        },
        py::arg("tessellation"), py::arg("alphas"), py::arg("e0") = 1.0, py::arg("mode") = "ps", py::arg("p") = 1e-3,
        py::arg("q") = 0.0, py::arg("margin") = 3.0, py::arg("threads") = 1);

    // Reports ----------------------------------------------------------------

    m.def(
        "alpha_curves_svg", [](const std::vector<double>& gammas) { return emit_svg(figure_alpha_curves(gammas)); },
        py::arg("gammas"));
    m.def(
        "gamma_curves_svg", [](const std::vector<double>& alphas) { return emit_svg(figure_gamma_curves(alphas)); },
        py::arg("alphas"));
    m.def(
        "i2_curves_svg", [](const std::vector<double>& alphas) { return emit_svg(figure_i2_curves(alphas)); },
        py::arg("alphas"));
}
