#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stirlab/checks.hpp"
#include "stirlab/empirical.hpp"
#include "stirlab/ensembles.hpp"
#include "stirlab/girsanov.hpp"
#include "stirlab/hydro.hpp"
#include "stirlab/process.hpp"
#include "stirlab/rate.hpp"

namespace py = pybind11;
using namespace stirlab;

PYBIND11_MODULE(_stirlab, m) {
  m.doc() = "Multispecies stirring process: simulation, hydrodynamics, "
            "path weights and rate functional evaluation.";

  py::class_<Configuration>(m, "Configuration")
      .def(py::init<int, std::vector<std::uint8_t>>(), py::arg("n_species"),
           py::arg("sites"))
      .def_static("constant", &Configuration::constant)
      .def_property_readonly("n_species", &Configuration::n_species)
      .def_property_readonly("n_sites", &Configuration::n_sites)
      .def_property_readonly("sites",
                             [](const Configuration& c) { return c.sites(); })
      .def_property_readonly("counts",
                             [](const Configuration& c) { return c.counts(); })
      .def("label", &Configuration::label);

  py::class_<ProfileGrid>(m, "ProfileGrid")
      .def(py::init<int, std::size_t>(), py::arg("n_species"), py::arg("grid_points"))
      .def_static("constant", &ProfileGrid::constant)
      .def("set", &ProfileGrid::set)
      .def("value", &ProfileGrid::value)
      .def_property_readonly("n_species", &ProfileGrid::n_species)
      .def_property_readonly("grid_points", &ProfileGrid::grid_points);

  py::class_<PotentialSet>(m, "PotentialSet")
      .def_static("zero", &PotentialSet::zero, py::arg("n_species"),
                  py::arg("t_max") = 1.0)
      .def_static("sample", &PotentialSet::sample, py::arg("n_species"),
                  py::arg("space_points"), py::arg("time_points"), py::arg("t_max"),
                  py::arg("h"))
      .def("species", &PotentialSet::species)
      .def("pair", &PotentialSet::pair)
      .def_property_readonly("n_species", &PotentialSet::n_species);

  py::class_<SimParams>(m, "SimParams")
      .def(py::init<>())
      .def_readwrite("n_sites", &SimParams::n_sites)
      .def_readwrite("t_end", &SimParams::t_end)
      .def_readwrite("seed", &SimParams::seed)
      .def_readwrite("thinning_margin", &SimParams::thinning_margin)
      .def_readwrite("replica", &SimParams::replica);

  py::class_<Event>(m, "Event")
      .def_readonly("t", &Event::t)
      .def_readonly("bond", &Event::bond)
      .def_readonly("alpha", &Event::alpha)
      .def_readonly("beta", &Event::beta);

  py::class_<EventLog>(m, "EventLog")
      .def_readonly("n_sites", &EventLog::n_sites)
      .def_readonly("n_species", &EventLog::n_species)
      .def_readonly("t_end", &EventLog::t_end)
      .def_readonly("seed", &EventLog::seed)
      .def_readonly("events", &EventLog::events);

  m.def("sample_product_multinomial", &sample_product_multinomial,
        py::arg("profile"), py::arg("n_sites"), py::arg("seed"));
  m.def("exchange_rate", &exchange_rate);
  m.def("apply_exchange", &apply_exchange);
  m.def("simulate", &simulate, py::arg("initial"), py::arg("potentials"),
        py::arg("params"));
  m.def("config_at", &config_at);

  py::class_<EmpiricalField>(m, "EmpiricalField")
      .def_property_readonly("n_species", &EmpiricalField::n_species)
      .def_property_readonly("n_sites", &EmpiricalField::n_sites)
      .def("mass", &EmpiricalField::mass)
      .def("density", &EmpiricalField::density)
      .def("total_mass", &EmpiricalField::total_mass);

  py::class_<LocalObservable>(m, "LocalObservable")
      .def(py::init<int, int, std::vector<double>>(), py::arg("n_species"),
           py::arg("support"), py::arg("table"))
      .def_static("indicator", &LocalObservable::indicator)
      .def_property_readonly("support", &LocalObservable::support);

  m.def("empirical_density", &empirical_density);
  m.def("pair_field", &pair_field);
  m.def("block_average", &block_average);
  m.def("tilde_phi", &tilde_phi);
  m.def("v_statistic", &v_statistic);
  m.def("smooth", &smooth);

  py::class_<SpaceTimeField>(m, "SpaceTimeField")
      .def(py::init<int, std::size_t, std::size_t, double>(), py::arg("n_species"),
           py::arg("m"), py::arg("k_slices"), py::arg("dt"))
      .def_readonly("n_species", &SpaceTimeField::n_species)
      .def_readonly("m", &SpaceTimeField::m)
      .def_readonly("k_slices", &SpaceTimeField::k_slices)
      .def_readonly("dt", &SpaceTimeField::dt)
      .def("value",
           [](const SpaceTimeField& f, std::size_t k, int a, std::size_t j) {
             return f.value(k, a, j);
           })
      .def("set_value", [](SpaceTimeField& f, std::size_t k, int a, std::size_t j,
                           double v) { f.value(k, a, j) = v; });

  m.def("sample_field", &sample_field);

  py::class_<DensityTrajectory>(m, "DensityTrajectory")
      .def(py::init<SpaceTimeField>())
      .def_property_readonly("n_species", &DensityTrajectory::n_species)
      .def_property_readonly("m", &DensityTrajectory::m)
      .def_property_readonly("k_slices", &DensityTrajectory::k_slices)
      .def_property_readonly("dt", &DensityTrajectory::dt)
      .def("value", &DensityTrajectory::value)
      .def("spatial_mean", &DensityTrajectory::spatial_mean)
      .def("simplex_violation", &DensityTrajectory::simplex_violation);

  py::class_<SchemeParams> scheme(m, "SchemeParams");
  py::enum_<SchemeParams::Stepper>(scheme, "Stepper")
      .value("ExplicitEuler", SchemeParams::Stepper::ExplicitEuler)
      .value("Imex", SchemeParams::Stepper::Imex);
  scheme.def(py::init<>())
      .def_readwrite("space_cells", &SchemeParams::space_cells)
      .def_readwrite("time_slices", &SchemeParams::time_slices)
      .def_readwrite("t_end", &SchemeParams::t_end)
      .def_readwrite("stepper", &SchemeParams::stepper)
      .def_readwrite("cfl_safety", &SchemeParams::cfl_safety);

  m.def("mobility", &mobility);
  m.def("diffusion_matrix", &diffusion_matrix);
  m.def("free_energy", &free_energy);
  m.def("free_energy_hessian", &free_energy_hessian);
  m.def("einstein_residual", &einstein_residual);
  m.def("solve_hydro", &solve_hydro);

  py::class_<WeightBreakdown>(m, "WeightBreakdown")
      .def_readonly("log_rn_event", &WeightBreakdown::log_rn_event)
      .def_readonly("log_rn_martingale", &WeightBreakdown::log_rn_martingale)
      .def_readonly("jump_term", &WeightBreakdown::jump_term)
      .def_readonly("compensator", &WeightBreakdown::compensator)
      .def_readonly("boundary_initial", &WeightBreakdown::boundary_initial)
      .def_readonly("boundary_final", &WeightBreakdown::boundary_final)
      .def_readonly("dt_pairing", &WeightBreakdown::dt_pairing);

  m.def("girsanov_weight", &girsanov_weight);
  m.def("log_rn_event_form", &log_rn_event_form);
  m.def("log_rn_martingale_form", &log_rn_martingale_form);
  m.def("dynkin_martingale", &dynkin_martingale);
  m.def("carre_du_champ", &carre_du_champ);

  py::class_<MeanOneResult>(m, "MeanOneResult")
      .def_readonly("mean", &MeanOneResult::mean)
      .def_readonly("stddev", &MeanOneResult::stddev)
      .def_readonly("half_width", &MeanOneResult::half_width)
      .def_readonly("replicas", &MeanOneResult::replicas);

  m.def("check_mean_one", &check_mean_one, py::arg("gamma"), py::arg("potentials"),
        py::arg("base"), py::arg("replicas"), py::arg("tilted") = false,
        py::arg("threads") = 1);

  py::class_<MetricOptions>(m, "MetricOptions")
      .def(py::init<>())
      .def_readwrite("delta_clip", &MetricOptions::delta_clip);

  py::class_<RieszOptions>(m, "RieszOptions")
      .def(py::init<>())
      .def_readwrite("delta_clip", &RieszOptions::delta_clip)
      .def_readwrite("mean_tolerance", &RieszOptions::mean_tolerance)
      .def_readwrite("residual_probes", &RieszOptions::residual_probes)
      .def_readwrite("probe_seed", &RieszOptions::probe_seed);

  m.def("static_cost", &static_cost, py::arg("omega"), py::arg("gamma"),
        py::arg("has_atoms") = false);
  m.def("inner_product", &inner_product, py::arg("g"), py::arg("h"), py::arg("rho"),
        py::arg("opts") = MetricOptions{});
  m.def("linear_functional", &linear_functional);

  py::class_<RieszResult>(m, "RieszResult")
      .def_readonly("h", &RieszResult::h)
      .def_readonly("residual", &RieszResult::residual)
      .def_readonly("clip_magnitude", &RieszResult::clip_magnitude);

  m.def("riesz_solve", &riesz_solve, py::arg("rho"), py::arg("opts") = RieszOptions{});
  m.def("dynamic_cost", &dynamic_cost, py::arg("rho"), py::arg("h"),
        py::arg("opts") = MetricOptions{});
  m.def("make_trig_basis", &make_trig_basis);
  m.def("variational_lower_bound", &variational_lower_bound, py::arg("rho"),
        py::arg("basis"), py::arg("opts") = MetricOptions{});

  py::class_<LowerBoundResult>(m, "LowerBoundResult")
      .def_readonly("value", &LowerBoundResult::value)
      .def_readonly("regularized", &LowerBoundResult::regularized);

  py::class_<CollapseReport>(m, "CollapseReport")
      .def_readonly("i0_vector", &CollapseReport::i0_vector)
      .def_readonly("i0_scalar", &CollapseReport::i0_scalar)
      .def_readonly("abs_diff", &CollapseReport::abs_diff);

  m.def("collapse_check", &collapse_check, py::arg("rho"), py::arg("h_common"),
        py::arg("opts") = MetricOptions{});

  py::class_<RateEvaluation>(m, "RateEvaluation")
      .def_readonly("h", &RateEvaluation::h)
      .def_readonly("i0", &RateEvaluation::i0)
      .def_readonly("i_total", &RateEvaluation::i_total)
      .def_readonly("residual", &RateEvaluation::residual)
      .def_readonly("variational_lb", &RateEvaluation::variational_lb)
      .def_readonly("clip_magnitude", &RateEvaluation::clip_magnitude);

  m.def("evaluate_rate", &evaluate_rate, py::arg("rho"), py::arg("gamma"),
        py::arg("opts") = RieszOptions{});

  py::class_<CanonicalSpec>(m, "CanonicalSpec")
      .def(py::init([](std::size_t n, std::vector<std::int64_t> k) {
             return CanonicalSpec{n, std::move(k)};
           }),
           py::arg("n_sites"), py::arg("k"))
      .def_readonly("n_sites", &CanonicalSpec::n_sites)
      .def_readonly("k", &CanonicalSpec::k);

  m.def("canonical_probability", &canonical_probability);
  m.def("local_pattern_probability", &local_pattern_probability);
  m.def("canonical_local_expectation", &canonical_local_expectation);
  m.def("equivalence_gap", &equivalence_gap);
  m.def("dirichlet_form",
        [](std::size_t n_sites, int n_species, const std::vector<double>& f) {
          return dirichlet_form(StateDensity(n_sites, n_species, f));
        });
  m.def("feynman_kac_lambda",
        [](double a, const std::vector<double>& v, std::size_t n_sites,
           int n_species) { return feynman_kac_lambda(a, v, n_sites, n_species); });
  m.def("one_block_gap", &one_block_gap);
  m.def("two_block_gap", &two_block_gap);

  m.def("v_statistic_table",
        [](const LocalObservable& phi, std::size_t n_sites, double epsilon) {
          std::size_t states = state_count(n_sites, phi.n_species());
          std::vector<double> out(states);
          std::vector<std::uint8_t> sites;
          for (std::size_t code = 0; code < states; ++code) {
            decode_state(code, n_sites, phi.n_species(), sites);
            out[code] = v_statistic(Configuration(phi.n_species(), sites), phi, epsilon);
          }
          return out;
        });
}
