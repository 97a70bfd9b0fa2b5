// Python bindings for the qlane core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qlane/calibration.hpp"
#include "qlane/errors.hpp"
#include "qlane/parallel.hpp"
#include "qlane/scenarios.hpp"
#include "qlane/table_io.hpp"

namespace py = pybind11;
using namespace qlane;

namespace {

py::dict ratios_dict(const CooperationRatios& c) {
  py::dict d;
  d["av"] = c.av;
  d["hdv"] = c.hdv;
  d["all"] = c.all;
  return d;
}

py::dict stat_dict(const SeriesStat& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["ci"] = s.ci;
  d["n"] = s.n;
  return d;
}

StrategyOperator parse_strategy(const std::string& s) {
  if (s == "C" || s == "I") return kCooperate;
  if (s == "D" || s == "X") return kDefect;
  throw ConfigError("strategy must be 'C' or 'D'");
}

}  // namespace

PYBIND11_MODULE(_qlane, m) {
  m.doc() = "Quantum lane-change evolutionary game core";
  m.attr("__version__") = QLANE_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<CompletenessError>(m, "CompletenessError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NoCrossingError>(m, "NoCrossingError", PyExc_ValueError);

  // --- quantum ------------------------------------------------------------
  py::class_<PayoffQuad>(m, "PayoffQuad")
      .def(py::init<double, double, double, double>(), py::arg("r"), py::arg("s"), py::arg("t"), py::arg("p"))
      .def_readwrite("r", &PayoffQuad::r)
      .def_readwrite("s", &PayoffQuad::s)
      .def_readwrite("t", &PayoffQuad::t)
      .def_readwrite("p", &PayoffQuad::p)
      .def("__eq__", [](const PayoffQuad& a, const PayoffQuad& b) { return a == b; })
      .def("__repr__", [](const PayoffQuad& q) {
        return "PayoffQuad(" + format_double(q.r) + ", " + format_double(q.s) + ", " + format_double(q.t) + ", " +
               format_double(q.p) + ")";
      });

  py::class_<QuantumPayoffQuad>(m, "QuantumPayoffQuad")
      .def_readonly("rq", &QuantumPayoffQuad::rq)
      .def_readonly("sq", &QuantumPayoffQuad::sq)
      .def_readonly("tq", &QuantumPayoffQuad::tq)
      .def_readonly("pq", &QuantumPayoffQuad::pq)
      .def("as_tuple", [](const QuantumPayoffQuad& q) { return py::make_tuple(q.rq, q.sq, q.tq, q.pq); });

  m.def(
      "quantum_payoffs",
      [](const PayoffQuad& q, double b2) { return quantum_payoffs(q, EntanglementParam(b2)); },
      py::arg("quad"), py::arg("b2"));

  m.def(
      "expected_payoffs",
      [](const PayoffQuad& q, double b2, const std::string& active, const std::string& passive) {
        const auto psi = apply_strategies(make_initial_state(b2), parse_strategy(active), parse_strategy(passive));
        return py::make_tuple(expected_payoff(psi, active_payoff_operator(q)),
                              expected_payoff(psi, passive_payoff_operator(q)));
      },
      py::arg("quad"), py::arg("b2"), py::arg("active"), py::arg("passive"),
      "State-vector payoffs (active, passive) for strategies 'C'/'D'.");

  m.def(
      "ess_regime",
      [](const PayoffQuad& q, double b2) {
        const EssRegime r = ess_regime(q, EntanglementParam(b2));
        py::dict d;
        d["kind"] = std::string(to_string(r.kind));
        d["p_star"] = r.p_star ? py::cast(*r.p_star) : py::none();
        d["threshold"] = r.threshold ? py::cast(*r.threshold) : py::none();
        return d;
      },
      py::arg("quad"), py::arg("b2"));

  m.def(
      "mixed_entanglement",
      [](double a, double b) { return mixed_entanglement(EntanglementParam(a), EntanglementParam(b)).value(); },
      py::arg("first"), py::arg("second"));

  // --- game model -----------------------------------------------------------
  m.def(
      "classify", [](const PayoffQuad& q) { return std::string(to_string(classify(q))); }, py::arg("quad"));
  m.def(
      "quad_from_utilities",
      [](double cc, double cd, double dc, double dd, const std::string& role) {
        return quad_from_utilities(cc, cd, dc, dd, parse_role(role));
      },
      py::arg("u_cc"), py::arg("u_cd"), py::arg("u_dc"), py::arg("u_dd"), py::arg("role"));

  py::class_<PayoffTable>(m, "PayoffTable")
      .def("__len__", &PayoffTable::size)
      .def_property_readonly("state_ids", &PayoffTable::state_ids)
      .def(
          "quad",
          [](const PayoffTable& t, std::size_t state, const std::string& role, const std::string& self,
             const std::string& opp) {
            return t.quad(state, parse_role(role), parse_vehicle_type(self), parse_vehicle_type(opp));
          },
          py::arg("state"), py::arg("role"), py::arg("self_type"), py::arg("opp_type"))
      .def("digest", [](const PayoffTable& t) { return table_digest(t); })
      .def("to_csv", [](const PayoffTable& t) { return serialize_table(t); })
      .def("class_distribution", [](const PayoffTable& t) {
        const ClassCounts cc = class_distribution(t);
        py::dict d;
        for (auto [k, v] : cc.counts) d[py::str(std::string(to_string(k)))] = v;
        return d;
      });

  m.def("uniform_table", &uniform_table, py::arg("quad"), py::arg("state_id") = "s0");
  m.def(
      "synth_table", [](std::size_t n, std::uint64_t seed) { return synth_table(n, SyntheticTableSpec::defaults(), seed).table; },
      py::arg("n_states"), py::arg("seed"), "Synthetic table with the default generator settings.");
  m.def(
      "parse_table", [](const std::string& csv) { return parse_table(csv); }, py::arg("csv"));
  m.def("load_table", &load_table, py::arg("path"));
  m.def("save_table", &save_table, py::arg("table"), py::arg("path"));

  // --- lattice --------------------------------------------------------------
  py::class_<SimParams>(m, "SimParams")
      .def(py::init<>())
      .def_readwrite("side", &SimParams::side)
      .def_readwrite("mpr", &SimParams::mpr)
      .def_readwrite("d", &SimParams::d)
      .def_readwrite("K", &SimParams::K)
      .def_readwrite("s", &SimParams::s)
      .def_readwrite("t_max", &SimParams::t_max)
      .def_readwrite("b2_hdv", &SimParams::b2_hdv)
      .def_readwrite("b2_av", &SimParams::b2_av)
      .def_readwrite("init_coop_av", &SimParams::init_coop_av)
      .def_readwrite("init_coop_hdv", &SimParams::init_coop_hdv)
      .def_readwrite("seed", &SimParams::seed)
      .def("validate", &SimParams::validate);

  m.def("fermi", &fermi, py::arg("e_y"), py::arg("e_x"), py::arg("K"));
  m.def(
      "run",
      [](const SimParams& p, const PayoffTable& t) {
        RunRecord rec;
        {
          py::gil_scoped_release release;
          rec = run(p, t);
        }
        py::dict d;
        d["initial"] = ratios_dict(rec.initial);
        py::list series;
        for (const auto& c : rec.series) series.append(ratios_dict(c));
        d["series"] = series;
        d["n_av"] = rec.n_av;
        d["n_hdv"] = rec.n_hdv;
        d["state_draws"] = rec.state_draws;
        d["csv"] = serialize_run(rec);
        return d;
      },
      py::arg("params"), py::arg("table"));

  // --- calibration ------------------------------------------------------------
  m.def(
      "sweep",
      [](const std::vector<double>& grid, const SimParams& p, const PayoffTable& t, int n_replicates, int window,
         std::size_t jobs) {
        SweepOptions o;
        o.n_replicates = n_replicates;
        o.window = window;
        o.jobs = jobs;
        std::vector<SweepPoint> curve;
        {
          py::gil_scoped_release release;
          curve = sweep(grid, p, t, o);
        }
        py::list out;
        for (const auto& pt : curve) out.append(py::make_tuple(pt.b2, pt.mean_coop, pt.ci95_half_width));
        return out;
      },
      py::arg("b2_grid"), py::arg("params"), py::arg("table"), py::arg("n_replicates") = 20,
      py::arg("window") = kDefaultWindow, py::arg("jobs") = 1, "List of (b2, mean, ci95) tuples.");

  m.def(
      "find_crossing",
      [](const std::vector<std::pair<double, double>>& points, double target) {
        std::vector<SweepPoint> curve;
        for (auto [b2, mean] : points) curve.push_back({b2, mean, 0.0, 0, 0});
        const CalibrationResult r = find_crossing(curve, target);
        return py::make_tuple(r.b2_star, r.bracket_count);
      },
      py::arg("points"), py::arg("target") = kObservedHdvCooperation,
      "points: (b2, mean) pairs in ascending b2. Returns (b2_star, bracket_count).");

  // --- scenarios ----------------------------------------------------------------
  m.def(
      "run_scenario",
      [](const std::string& profile, const PayoffTable& t, std::vector<double> mprs, std::vector<double> s_values,
         int n_replicates, std::uint64_t seed, int t_max, std::size_t jobs) {
        ScenarioSpec spec;
        spec.profile = parse_profile(profile);
        spec.mprs = std::move(mprs);
        spec.s_values = std::move(s_values);
        spec.n_replicates = n_replicates;
        spec.base.seed = seed;
        spec.base.t_max = t_max;
        std::vector<ScenarioPanel> panels;
        {
          py::gil_scoped_release release;
          panels = run_scenario(spec, t, jobs);
        }
        py::list out;
        for (const auto& panel : panels) {
          py::dict d;
          d["mpr"] = panel.mpr;
          d["s"] = panel.s;
          py::list rows;
          for (const auto& r : panel.rows) {
            py::dict row;
            row["t"] = r.t;
            row["av"] = stat_dict(r.av);
            row["hdv"] = stat_dict(r.hdv);
            row["all"] = stat_dict(r.all);
            rows.append(row);
          }
          d["rows"] = rows;
          out.append(d);
        }
        return out;
      },
      py::arg("profile"), py::arg("table"), py::arg("mprs") = std::vector<double>{0.2, 0.5, 0.8},
      py::arg("s_values") = std::vector<double>{0.0, 0.04}, py::arg("n_replicates") = 20, py::arg("seed") = 0,
      py::arg("t_max") = 200, py::arg("jobs") = 1);

  m.def(
      "run_sensitivity",
      [](const std::string& axis, const PayoffTable& t, const std::string& profile, int n_replicates,
         std::uint64_t seed, std::size_t jobs) {
        SensitivitySpec spec;
        spec.axis = parse_axis(axis);
        spec.values = default_axis_values(spec.axis);
        spec.n_replicates = n_replicates;
        spec.base.seed = seed;
        std::vector<DistributionSummary> rows;
        {
          py::gil_scoped_release release;
          rows = run_sensitivity(spec, t, parse_profile(profile), jobs);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["value"] = r.value;
          d["min"] = r.min;
          d["q1"] = r.q1;
          d["median"] = r.median;
          d["q3"] = r.q3;
          d["max"] = r.max;
          d["n"] = r.n;
          out.append(d);
        }
        return out;
      },
      py::arg("axis"), py::arg("table"), py::arg("profile"), py::arg("n_replicates") = 20, py::arg("seed") = 0,
      py::arg("jobs") = 1);

  m.def("default_jobs", &default_jobs);
}
