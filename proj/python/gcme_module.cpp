#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gcme/config.hpp"
#include "gcme/decay_lab.hpp"
#include "gcme/evolution.hpp"
#include "gcme/generator.hpp"
#include "gcme/spectral.hpp"
#include "gcme/thermo.hpp"

namespace py = pybind11;
using namespace gcme;

PYBIND11_MODULE(gcme, m) {
    m.doc() = "Spectral solver for grand-canonical detailed-balance master equations";

    static py::exception<Error> base_exc(m, "Error");
    py::register_exception<TailNotConverged>(m, "TailNotConverged",
                                             base_exc.ptr());
    py::register_exception<SpectralConditionViolated>(
        m, "SpectralConditionViolated", base_exc.ptr());
    py::register_exception<ShrinkTooSevere>(m, "ShrinkTooSevere",
                                            base_exc.ptr());
    py::register_exception<OverflowRisk>(m, "OverflowRisk", base_exc.ptr());

    py::class_<TruncationPolicy>(m, "TruncationPolicy")
        .def(py::init([](int max_index, double tail_tol) {
                 TruncationPolicy t{max_index, tail_tol};
                 t.validate();
                 return t;
             }),
             py::arg("max_index"), py::arg("tail_tol") = 1e-10)
        .def_readonly("max_index", &TruncationPolicy::max_index)
        .def_readonly("tail_tol", &TruncationPolicy::tail_tol);

    py::class_<SummabilityWitness>(m, "SummabilityWitness")
        .def_readwrite("m0", &SummabilityWitness::m0)
        .def_readwrite("growth", &SummabilityWitness::growth);

    py::class_<ModelSpec>(m, "ModelSpec")
        .def_static("harmonic", &ModelSpec::harmonic, py::arg("beta"),
                    py::arg("mu") = 0.0)
        .def_static("affine", &ModelSpec::affine, py::arg("lambda_slope"),
                    py::arg("lambda_offset"), py::arg("n_slope"),
                    py::arg("n_offset"), py::arg("beta"), py::arg("mu") = 0.0)
        .def_static("table", &ModelSpec::table, py::arg("lambda_table"),
                    py::arg("nparticles"), py::arg("beta"), py::arg("mu") = 0.0)
        .def_property_readonly("beta", &ModelSpec::beta)
        .def_property_readonly("mu", &ModelSpec::mu)
        .def_readwrite("witness", &ModelSpec::witness)
        .def("level_energy", &ModelSpec::level_energy, py::arg("m"))
        .def("particle_count", &ModelSpec::particle_count, py::arg("m"));

    py::class_<PartitionValue>(m, "PartitionValue")
        .def_readonly("value", &PartitionValue::value)
        .def_readonly("tail_bound", &PartitionValue::tail_bound);

    py::class_<WeightedVector>(m, "WeightedVector")
        .def(py::init<std::vector<double>, std::vector<double>>(),
             py::arg("coords"), py::arg("weights"))
        .def_readonly("coords", &WeightedVector::coords)
        .def_readonly("weights", &WeightedVector::weights);

    m.def("partition_function", &partition_function, py::arg("model"),
          py::arg("scale_beta"), py::arg("scale_mu"), py::arg("trunc"));
    m.def("partition_sum_closed", &partition_sum_closed, py::arg("model"),
          py::arg("scale_beta"), py::arg("scale_mu"), py::arg("max_index"));
    m.def("weight_sequence", &weight_sequence, py::arg("model"),
          py::arg("trunc"), py::arg("exponent_cap") = kDefaultExponentCap);
    m.def("equilibrium_distribution", &equilibrium_distribution,
          py::arg("model"), py::arg("trunc"));
    m.def("weighted_inner_product", &weighted_inner_product, py::arg("p"),
          py::arg("q"));
    m.def("weighted_norm", &weighted_norm, py::arg("p"));

    py::class_<GeneratorMatrix>(m, "GeneratorMatrix")
        .def_readonly("size", &GeneratorMatrix::size)
        .def_readonly("weights", &GeneratorMatrix::weights)
        .def_readonly("closed", &GeneratorMatrix::closed)
        .def("entry", &GeneratorMatrix::entry, py::arg("m"), py::arg("n"))
        .def("rate", &GeneratorMatrix::rate, py::arg("m"), py::arg("n"));

    py::class_<SymmetricGenerator>(m, "SymmetricGenerator")
        .def_readonly("size", &SymmetricGenerator::size)
        .def("entry", &SymmetricGenerator::entry, py::arg("m"), py::arg("n"));

    py::class_<BalanceReport>(m, "BalanceReport")
        .def_readonly("max_rel_violation", &BalanceReport::max_rel_violation)
        .def_readonly("pass_", &BalanceReport::pass);

    py::class_<TraceClosedForm>(m, "TraceClosedForm")
        .def_readonly("value", &TraceClosedForm::value)
        .def_readonly("tail_bound", &TraceClosedForm::tail_bound)
        .def_readonly("fp_allowance", &TraceClosedForm::fp_allowance);

    py::class_<HsBoundReport>(m, "HsBoundReport")
        .def_readonly("hs_norm_sq", &HsBoundReport::hs_norm_sq)
        .def_readonly("bound", &HsBoundReport::bound)
        .def_readonly("pass_", &HsBoundReport::pass);

    m.def("transition_rate", &transition_rate, py::arg("model"), py::arg("m"),
          py::arg("n"));
    m.def("build_generator", &build_generator, py::arg("model"),
          py::arg("trunc"));
    m.def("verify_detailed_balance", &verify_detailed_balance, py::arg("g"),
          py::arg("tol") = 1e-12);
    m.def("matrix_trace", &matrix_trace, py::arg("g"));
    m.def("closed_form_trace", &closed_form_trace, py::arg("model"),
          py::arg("trunc"));
    m.def("hs_bound_check", &hs_bound_check, py::arg("g"), py::arg("model"),
          py::arg("trunc"));
    m.def("symmetrize", &symmetrize, py::arg("g"));

    py::class_<BSequence> b_seq(m, "BSequence");
    py::enum_<BSequence::Variant>(b_seq, "Variant")
        .value("Closed", BSequence::Variant::Closed)
        .value("Open", BSequence::Variant::Open);
    b_seq.def_readonly("values", &BSequence::values)
        .def_readonly("variant", &BSequence::variant)
        .def_readonly("theta", &BSequence::theta)
        .def_readonly("theta_tail", &BSequence::theta_tail);

    py::class_<SpectralConditionReport>(m, "SpectralConditionReport")
        .def_readonly("pass_", &SpectralConditionReport::pass)
        .def_readonly("first_violation",
                      &SpectralConditionReport::first_violation);

    py::class_<SecularRoot>(m, "SecularRoot")
        .def_readonly("k", &SecularRoot::k)
        .def_readonly("nu", &SecularRoot::nu)
        .def_readonly("anchored_right", &SecularRoot::anchored_right)
        .def_readonly("offset", &SecularRoot::offset)
        .def_readonly("residual", &SecularRoot::residual);

    py::class_<SpectralDecomposition> dec(m, "SpectralDecomposition");
    py::enum_<SpectralDecomposition::Method>(dec, "Method")
        .value("Secular", SpectralDecomposition::Method::Secular)
        .value("Dense", SpectralDecomposition::Method::Dense);
    dec.def_readonly("size", &SpectralDecomposition::size)
        .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
        .def_readonly("eigenvectors", &SpectralDecomposition::eigenvectors)
        .def_readonly("weights", &SpectralDecomposition::weights)
        .def_readonly("residuals", &SpectralDecomposition::residuals)
        .def_readonly("method", &SpectralDecomposition::method)
        .def_readonly("roots", &SpectralDecomposition::roots)
        .def_readonly("warnings", &SpectralDecomposition::warnings)
        .def("vec", &SpectralDecomposition::vec, py::arg("k"));

    m.def("b_sequence", &b_sequence, py::arg("model"), py::arg("trunc"),
          py::arg("variant") = BSequence::Variant::Closed);
    m.def("verify_spectral_condition", &verify_spectral_condition,
          py::arg("model"), py::arg("trunc"));
    m.def("secular_value", &secular_value, py::arg("nu"), py::arg("model"),
          py::arg("trunc"));
    m.def("solve_eigenvalues", &solve_eigenvalues, py::arg("model"),
          py::arg("trunc"), py::arg("tol_root") = 1e-13);
    m.def("eigenvector", &eigenvector, py::arg("nu_k"), py::arg("model"),
          py::arg("trunc"));
    m.def("solve_secular", &solve_secular, py::arg("model"), py::arg("trunc"),
          py::arg("tol_root") = 1e-13);
    m.def("dense_eig_oracle", &dense_eig_oracle, py::arg("s"),
          py::arg("weights"));

    py::class_<TraceCheck>(m, "TraceCheck")
        .def_readonly("sum_eigs", &TraceCheck::sum_eigs)
        .def_readonly("matrix_trace", &TraceCheck::matrix_trace)
        .def_readonly("pass_", &TraceCheck::pass);
    m.def("spectral_trace_check", &spectral_trace_check, py::arg("dec"),
          py::arg("g"));

    py::class_<GapProfile>(m, "GapProfile")
        .def_readonly("magnitudes", &GapProfile::magnitudes)
        .def_readonly("no_spectral_gap", &GapProfile::no_spectral_gap);
    m.def("gap_profile", &gap_profile, py::arg("dec"), py::arg("b"));
    m.def("gap_vanishes_with_truncation", &gap_vanishes_with_truncation,
          py::arg("model"), py::arg("trunc"), py::arg("tol_root") = 1e-13);

    py::class_<InitialData>(m, "InitialData")
        .def(py::init([](std::vector<double> coords) {
                 InitialData d{std::move(coords)};
                 d.validate();
                 return d;
             }),
             py::arg("coords"))
        .def_readonly("coords", &InitialData::coords);
    m.def("delta_initial", &delta_initial, py::arg("m"), py::arg("size"));
    m.def("uniform_initial", &uniform_initial, py::arg("size"));

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("times", &TrajectoryRecord::times)
        .def_readonly("states", &TrajectoryRecord::states)
        .def_readonly("errors", &TrajectoryRecord::errors)
        .def_readonly("fourier", &TrajectoryRecord::fourier);

    m.def("equilibrium_from", &equilibrium_from, py::arg("dec"));
    m.def("fourier_coefficients", &fourier_coefficients, py::arg("dec"),
          py::arg("p"));
    m.def("propagate_spectral", &propagate_spectral, py::arg("dec"),
          py::arg("init"), py::arg("tau"));
    m.def("propagate_ode", &propagate_ode, py::arg("g"), py::arg("init"),
          py::arg("tau"), py::arg("step"));
    m.def("equilibrium_error", &equilibrium_error, py::arg("p"),
          py::arg("model"), py::arg("trunc"));
    m.def("fourier_error", &fourier_error, py::arg("dec"), py::arg("coeffs"),
          py::arg("tau"));

    py::class_<SubspaceInitial>(m, "SubspaceInitial")
        .def_readonly("data", &SubspaceInitial::data)
        .def_readonly("shrink", &SubspaceInitial::shrink);
    m.def("truncated_subspace_initial", &truncated_subspace_initial,
          py::arg("dec"), py::arg("n_modes"), py::arg("coeffs"));
    m.def("run_trajectory", &run_trajectory, py::arg("dec"), py::arg("init"),
          py::arg("tau_grid"));

    py::class_<DecayBoundReport>(m, "DecayBoundReport")
        .def_readonly("max_ratio", &DecayBoundReport::max_ratio)
        .def_readonly("pass_", &DecayBoundReport::pass);
    m.def("decay_bound_check", &decay_bound_check, py::arg("traj"),
          py::arg("nu_n"), py::arg("pstar_norm"));

    py::class_<DecaySpec> dspec(m, "DecaySpec");
    py::enum_<DecaySpec::Law>(dspec, "Law")
        .value("Exponential", DecaySpec::Law::Exponential)
        .value("Power", DecaySpec::Law::Power);
    dspec
        .def(py::init([](DecaySpec::Law law, double kappa, double delta,
                         double beta) {
                 DecaySpec s{law, kappa, delta, beta};
                 s.validate();
                 return s;
             }),
             py::arg("law"), py::arg("kappa"), py::arg("delta"), py::arg("beta"))
        .def_readonly("law", &DecaySpec::law)
        .def_readonly("kappa", &DecaySpec::kappa)
        .def_readonly("delta", &DecaySpec::delta)
        .def_readonly("beta", &DecaySpec::beta);

    py::class_<SynthesisResult>(m, "SynthesisResult")
        .def_readonly("data", &SynthesisResult::data)
        .def_readonly("prescribed", &SynthesisResult::prescribed)
        .def_readonly("achieved", &SynthesisResult::achieved)
        .def_readonly("shrink", &SynthesisResult::shrink);
    m.def("synthesize_initial", &synthesize_initial, py::arg("dec"),
          py::arg("spec"));

    py::class_<EnvelopeReport>(m, "EnvelopeReport")
        .def_readonly("law", &EnvelopeReport::law)
        .def_readonly("compensated", &EnvelopeReport::compensated)
        .def_readonly("sup_value", &EnvelopeReport::sup_value)
        .def_readonly("median_value", &EnvelopeReport::median_value)
        .def_readonly("slope", &EnvelopeReport::slope)
        .def_readonly("intercept", &EnvelopeReport::intercept)
        .def_readonly("slope_early", &EnvelopeReport::slope_early)
        .def_readonly("slope_late", &EnvelopeReport::slope_late)
        .def_readonly("non_power_flag", &EnvelopeReport::non_power_flag)
        .def_readonly("pass_", &EnvelopeReport::pass)
        .def_readonly("usable_points", &EnvelopeReport::usable_points);
    m.def("fit_envelope", &fit_envelope, py::arg("errors"), py::arg("times"),
          py::arg("law"), py::arg("beta"), py::arg("delta"));

    py::class_<DecayExperiment>(m, "DecayExperiment")
        .def_readonly("synthesis", &DecayExperiment::synthesis)
        .def_readonly("trajectory", &DecayExperiment::trajectory)
        .def_readonly("envelope", &DecayExperiment::envelope);
    m.def("run_decay_experiment", &run_decay_experiment, py::arg("dec"),
          py::arg("spec"), py::arg("tau_grid"));
    m.def("geometric_grid", &geometric_grid, py::arg("tau_min"),
          py::arg("tau_max"), py::arg("n"));

    m.def("load_config", &load_config, py::arg("path"));
    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("model", &RunConfig::model)
        .def_readonly("trunc", &RunConfig::trunc)
        .def_readonly("tol_algebraic", &RunConfig::tol_algebraic)
        .def_readonly("tol_spectral", &RunConfig::tol_spectral)
        .def_readonly("tol_root", &RunConfig::tol_root);
}
