#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "forgesim/analysis.hpp"
#include "forgesim/circuit.hpp"
#include "forgesim/error.hpp"
#include "forgesim/forging.hpp"
#include "forgesim/oracle.hpp"
#include "forgesim/pipeline.hpp"
#include "forgesim/pt2.hpp"
#include "forgesim/subspace.hpp"

namespace py = pybind11;
using namespace forgesim;

namespace {

py::dict ci_dict(const CIVector& v) {
  py::dict d;
  d["n_orbitals"] = v.sector.n_orbitals();
  d["n_alpha"] = v.sector.n_alpha();
  d["n_beta"] = v.sector.n_beta();
  d["amplitudes"] = Eigen::VectorXcd(v.amplitudes);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entanglement-forging simulator core";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
  py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);
  static py::exception<IntruderStateError> intruder(m, "IntruderStateError", numerical.ptr());
  // Most-derived first: pybind11 tries translators in reverse registration order.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IntruderStateError& e) {
      PyErr_SetString(intruder.ptr(), e.what());
    } catch (const NumericalError& e) {
      PyErr_SetString(numerical.ptr(), e.what());
    }
  });

  py::class_<ActiveSpaceHamiltonian>(m, "Hamiltonian")
      .def_property_readonly("n_orbitals", &ActiveSpaceHamiltonian::n_orbitals)
      .def_property_readonly("n_alpha", &ActiveSpaceHamiltonian::n_alpha)
      .def_property_readonly("n_beta", &ActiveSpaceHamiltonian::n_beta)
      .def_property_readonly("e_core", &ActiveSpaceHamiltonian::e_core)
      .def_property_readonly("h1", &ActiveSpaceHamiltonian::h1)
      .def("two", &ActiveSpaceHamiltonian::two, py::arg("p"), py::arg("q"), py::arg("r"),
           py::arg("s"))
      .def("__repr__", [](const ActiveSpaceHamiltonian& h) {
        return "<Hamiltonian norb=" + std::to_string(h.n_orbitals()) +
               " na=" + std::to_string(h.n_alpha()) + " nb=" + std::to_string(h.n_beta()) + ">";
      });

  m.def("read_fcidump", &read_fcidump, py::arg("path"));
  m.def("active_space_hamiltonian",
        [](const ActiveSpaceHamiltonian& h, int start, int size) {
          return active_space_hamiltonian(h, {start, size});
        },
        py::arg("full"), py::arg("start"), py::arg("size"));

  m.def("fci",
        [](const ActiveSpaceHamiltonian& h) {
          FCIResult r;
          {
            py::gil_scoped_release nogil;
            r = fci_ground_state(h);
          }
          py::dict d = ci_dict(r.state);
          d["energy"] = r.energy;
          d["dimension"] = r.dimension;
          return d;
        },
        py::arg("hamiltonian"), "Exact ground state of the Hamiltonian's own sector.");

  m.def("count_resources",
        [](int n_qubits, int n_bitstrings, std::optional<int> n_hops) {
          const ResourceCount r = count_resources(
              {n_qubits, n_hops.value_or(default_hop_count(n_qubits)), 1, n_bitstrings});
          py::dict d;
          d["single_qubit_gates"] = r.single_qubit_gates;
          d["two_qubit_gates"] = r.two_qubit_gates;
          d["n_preparations"] = r.n_preparations;
          d["tomography_circuits"] = r.n_tomography_circuits;
          d["n_parameters"] = r.n_parameters;
          return d;
        },
        py::arg("n_qubits"), py::arg("n_bitstrings") = 2, py::arg("n_hops") = py::none());

  py::class_<ForgedAnsatz>(m, "ForgedAnsatz")
      .def(py::init([](int n_qubits, std::vector<Bitstring> bitstrings) {
             return make_ansatz(n_qubits, std::move(bitstrings));
           }),
           py::arg("n_qubits"), py::arg("bitstrings"))
      .def_property_readonly("n_qubits", &ForgedAnsatz::n_qubits)
      .def_readonly("bitstrings", &ForgedAnsatz::bitstrings)
      .def_property_readonly("hops", [](const ForgedAnsatz& a) { return a.layout.hops; })
      .def_readwrite("theta", &ForgedAnsatz::theta)
      .def_readwrite("schmidt", &ForgedAnsatz::schmidt)
      .def("extend", &extend_ansatz, py::arg("bitstring"));

  m.def("select_bitstrings",
        [](const ActiveSpaceHamiltonian& h, int k) {
          const FCIResult r = fci_ground_state(h);
          const BitstringSelection s = select_bitstrings(r.state, k);
          return py::make_tuple(s.bitstrings, s.weights);
        },
        py::arg("hamiltonian"), py::arg("n_bitstrings") = 2,
        "Dominant bitstrings of the leading Schmidt vectors of the FCI state.");

  m.def("forged_energy",
        [](const ForgedAnsatz& a, const ActiveSpaceHamiltonian& h) {
          return forged_energy(a, spin_factorize(h)).value;
        },
        py::arg("ansatz"), py::arg("hamiltonian"));

  m.def("vqe",
        [](ForgedAnsatz& a, const ActiveSpaceHamiltonian& h, std::uint64_t seed, int restarts,
           int max_iterations) {
          OptimizerConfig oc;
          oc.seed = seed;
          oc.restarts = restarts;
          oc.max_iterations = max_iterations;
          VqeResult r;
          {
            py::gil_scoped_release nogil;
            r = vqe_minimize(a, spin_factorize(h), oc);
          }
          a.theta = r.theta;
          a.schmidt = r.schmidt;
          py::dict d;
          d["energy"] = r.energy;
          d["initial_energy"] = r.initial_energy;
          d["evaluations"] = r.evaluations;
          d["converged"] = r.converged;
          d["trace"] = r.trace;
          return d;
        },
        py::arg("ansatz"), py::arg("hamiltonian"), py::arg("seed") = 7, py::arg("restarts") = 8,
        py::arg("max_iterations") = 20000,
        "Optimizes theta and the Schmidt coefficients in place.");

  m.def("ef_qse",
        [](const ForgedAnsatz& a, const ActiveSpaceHamiltonian& h, const std::string& source,
           int shots, std::uint64_t seed, std::optional<double> cutoff, bool project_first) {
          QseOptions o;
          if (source == "exact")
            o.source = QseSource::Exact;
          else if (source == "sampled")
            o.source = QseSource::Sampled;
          else if (source == "purified")
            o.source = QseSource::Purified;
          else
            throw ValidationError("source must be exact, sampled or purified");
          o.shots = shots;
          o.seed = seed;
          o.overlap_cutoff = cutoff;
          o.project_first = project_first;
          QseResult r;
          {
            py::gil_scoped_release nogil;
            r = ef_qse_energy(a, h, o);
          }
          py::dict d;
          d["energy"] = r.energy;
          d["reference_energy"] = r.reference_energy;
          d["retained_rank"] = r.retained_rank;
          d["basis_size"] = r.basis_size;
          d["overlap_cutoff"] = r.overlap_cutoff;
          d["purified_state"] = r.purified_state ? py::object(ci_dict(*r.purified_state))
                                                 : py::object(py::none());
          return d;
        },
        py::arg("ansatz"), py::arg("hamiltonian"), py::arg("source") = "exact",
        py::arg("shots") = 1024, py::arg("seed") = 0, py::arg("overlap_cutoff") = py::none(),
        py::arg("project_first") = true);

  m.def("pt2",
        [](const ActiveSpaceHamiltonian& full, int start, int size, double degeneracy_threshold,
           int jobs) {
          const ActiveWindow w{start, size};
          PT2Options o;
          o.degeneracy_threshold = degeneracy_threshold;
          o.jobs = jobs;
          py::gil_scoped_release nogil;
          const FCIResult ref = fci_ground_state(active_space_hamiltonian(full, w));
          const PT2Result r = pt2_correction(build_dyall(full, w, ref.state), ref.state,
                                             ref.energy, o);
          return std::make_tuple(ref.energy, r.delta_e, r.n_terms);
        },
        py::arg("full"), py::arg("start"), py::arg("size"),
        py::arg("degeneracy_threshold") = 1e-8, py::arg("jobs") = 1,
        "Dyall PT2 on top of the active-space FCI reference: (E0, dE, n_terms).");

  m.def("weighted_pearson",
        [](std::vector<double> x, std::vector<double> x_err, std::vector<double> y,
           bool symmetric) {
          return weighted_pearson({std::move(x), std::move(x_err), std::move(y)}, symmetric);
        },
        py::arg("x"), py::arg("x_err"), py::arg("y"), py::arg("symmetric") = false);

  m.def("run_pipeline",
        [](const std::filesystem::path& config, std::optional<std::filesystem::path> output) {
          RunConfig c = load_config(config);
          if (output) c.output_dir = *output;
          validate_config(c);
          RunOutcome out;
          {
            py::gil_scoped_release nogil;
            out = run_pipeline(c);
          }
          if (!c.output_dir.empty()) write_outputs(out, c.output_dir);
          return py::make_tuple(out.report.dump(), out.timings.dump());
        },
        py::arg("config"), py::arg("output") = py::none(),
        "Runs an INI config; returns (report, timings) as JSON text.");

  m.def("barrier",
        [](const std::vector<std::string>& reactants, const std::string& ts) {
          std::vector<nlohmann::json> r;
          for (const auto& s : reactants) r.push_back(nlohmann::json::parse(s));
          return barrier_report(r, nlohmann::json::parse(ts)).dump();
        },
        py::arg("reactants"), py::arg("transition_state"));

  m.attr("HARTREE_TO_KCAL_PER_MOL") = kHartreeToKcalPerMol;
}
