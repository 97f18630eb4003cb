#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crlearn/blockwise.hpp"
#include "crlearn/csv.hpp"
#include "crlearn/mcmc.hpp"
#include "crlearn/pipeline.hpp"
#include "crlearn/simulator.hpp"
#include "crlearn/summary.hpp"

namespace py = pybind11;
using namespace crlearn;

namespace {

MomentModel custom_moment_model(Index d_y, Index d_beta, Index d_g,
                                py::function eval, const Vector& lo,
                                const Vector& hi) {
  MomentModel model;
  model.d_y = d_y;
  model.d_beta = d_beta;
  model.d_g = d_g;
  model.eval = [eval](const Vector& y, const Vector& beta) -> Vector {
    return eval(y, beta).cast<Vector>();
  };
  model.beta_bounds = Box(lo, hi);
  return model;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cressie-Read contrast probabilities, learned summary statistics "
            "and random-walk Metropolis exploration";

  py::register_exception<Error>(m, "CrlearnError");

  py::class_<Box>(m, "Box")
      .def(py::init<Vector, Vector>(), py::arg("lo"), py::arg("hi"))
      .def_readonly("lo", &Box::lo)
      .def_readonly("hi", &Box::hi)
      .def("contains", &Box::contains)
      .def("midpoint", &Box::midpoint)
      .def_static("unbounded", &Box::unbounded);

  py::class_<DataMatrix>(m, "DataMatrix")
      .def(py::init<Matrix>(), py::arg("values"))
      .def_property_readonly("rows", &DataMatrix::rows)
      .def_property_readonly("cols", &DataMatrix::cols)
      .def_property_readonly(
          "values", [](const DataMatrix& d) -> Matrix { return d.values(); });

  py::enum_<LimitBranch>(m, "LimitBranch")
      .value("General", LimitBranch::General)
      .value("EL_gamma0", LimitBranch::EL_gamma0)
      .value("ET_gammaNeg1", LimitBranch::ET_gammaNeg1);

  py::class_<CressieReadConfig>(m, "CressieReadConfig")
      .def(py::init<>())
      .def_readwrite("gamma", &CressieReadConfig::gamma)
      .def_readwrite("limit_branch", &CressieReadConfig::limit_branch)
      .def_readwrite("feasibility_margin", &CressieReadConfig::feasibility_margin)
      .def_static("general", &CressieReadConfig::general, py::arg("gamma"))
      .def_static("el", &CressieReadConfig::el)
      .def_static("et", &CressieReadConfig::et);

  py::class_<InnerSolverConfig>(m, "InnerSolverConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &InnerSolverConfig::max_iters)
      .def_readwrite("tol", &InnerSolverConfig::tol)
      .def_readwrite("backtrack_ratio", &InnerSolverConfig::backtrack_ratio);

  py::class_<NelderMeadConfig>(m, "NelderMeadConfig")
      .def(py::init<>())
      .def_readwrite("reflect", &NelderMeadConfig::reflect)
      .def_readwrite("expand", &NelderMeadConfig::expand)
      .def_readwrite("contract", &NelderMeadConfig::contract)
      .def_readwrite("shrink", &NelderMeadConfig::shrink)
      .def_readwrite("max_iters", &NelderMeadConfig::max_iters)
      .def_readwrite("f_tol", &NelderMeadConfig::f_tol)
      .def_readwrite("initial_step", &NelderMeadConfig::initial_step);

  py::class_<MomentModel>(m, "MomentModel")
      .def_readonly("d_y", &MomentModel::d_y)
      .def_readonly("d_beta", &MomentModel::d_beta)
      .def_readonly("d_g", &MomentModel::d_g)
      .def_readonly("beta_bounds", &MomentModel::beta_bounds);

  py::class_<ContrastSolution>(m, "ContrastSolution")
      .def(py::init<>())
      .def_readwrite("pi", &ContrastSolution::pi)
      .def_readwrite("lambda_", &ContrastSolution::lambda)
      .def_readwrite("beta", &ContrastSolution::beta)
      .def_readwrite("discrepancy", &ContrastSolution::discrepancy)
      .def_readwrite("converged", &ContrastSolution::converged)
      .def_readwrite("residual", &ContrastSolution::residual);

  py::enum_<SummaryVariant>(m, "SummaryVariant")
      .value("Basic", SummaryVariant::Basic)
      .value("MultiRep", SummaryVariant::MultiRep)
      .value("Conditional", SummaryVariant::Conditional)
      .value("Subset", SummaryVariant::Subset)
      .value("Blockwise", SummaryVariant::Blockwise);

  py::class_<LearnedStatistic>(m, "LearnedStatistic")
      .def(py::init<>())
      .def_readwrite("value", &LearnedStatistic::value)
      .def_readwrite("log_ratio_term", &LearnedStatistic::log_ratio_term)
      .def_readwrite("distance_term", &LearnedStatistic::distance_term)
      .def_readwrite("variant", &LearnedStatistic::variant);

  py::class_<InnerSolveResult>(m, "InnerSolveResult")
      .def_readonly("lambda_", &InnerSolveResult::lambda)
      .def_readonly("residual", &InnerSolveResult::residual)
      .def_readonly("converged", &InnerSolveResult::converged)
      .def_readonly("infeasible", &InnerSolveResult::infeasible)
      .def_readonly("iterations", &InnerSolveResult::iterations);

  py::enum_<KernelKind>(m, "KernelKind")
      .value("Gaussian", KernelKind::Gaussian)
      .value("Epanechnikov", KernelKind::Epanechnikov)
      .value("Uniform", KernelKind::Uniform);

  py::enum_<BandwidthRule>(m, "BandwidthRule")
      .value("Fixed", BandwidthRule::Fixed)
      .value("SilvermanRule", BandwidthRule::SilvermanRule);

  py::class_<KernelConfig>(m, "KernelConfig")
      .def(py::init<>())
      .def_readwrite("kernel", &KernelConfig::kernel)
      .def_readwrite("bandwidth", &KernelConfig::bandwidth)
      .def_readwrite("bandwidth_rule", &KernelConfig::bandwidth_rule);

  py::class_<KernelWeightMatrix>(m, "KernelWeightMatrix")
      .def(py::init([](Matrix w) { return KernelWeightMatrix{std::move(w)}; }),
           py::arg("w"))
      .def_readwrite("w", &KernelWeightMatrix::w)
      .def("validate", &KernelWeightMatrix::validate);

  py::class_<SubsetMask>(m, "SubsetMask")
      .def(py::init([](std::vector<bool> sel) {
             return SubsetMask{std::move(sel)};
           }),
           py::arg("selected"))
      .def_readwrite("selected", &SubsetMask::selected)
      .def("count", &SubsetMask::count)
      .def_static("all", &SubsetMask::all, py::arg("n"));

  py::class_<LocalContrastSolution>(m, "LocalContrastSolution")
      .def_readonly("pi", &LocalContrastSolution::pi)
      .def_readonly("lambdas", &LocalContrastSolution::lambdas)
      .def_readonly("beta", &LocalContrastSolution::beta)
      .def_readonly("converged", &LocalContrastSolution::converged)
      .def_readonly("failed_rows", &LocalContrastSolution::failed_rows);

  py::class_<LocalFitOptions>(m, "LocalFitOptions")
      .def(py::init<>())
      .def_readwrite("printed_form", &LocalFitOptions::printed_form)
      .def_readwrite("parallel_rows", &LocalFitOptions::parallel_rows);

  py::enum_<BlockRule>(m, "BlockRule")
      .value("Fixed", BlockRule::Fixed)
      .value("SqrtRule", BlockRule::SqrtRule);

  py::class_<BlockConfig>(m, "BlockConfig")
      .def(py::init<>())
      .def_readwrite("block_len", &BlockConfig::block_len)
      .def_readwrite("rule", &BlockConfig::rule);

  py::class_<BlockSet>(m, "BlockSet")
      .def_readonly("n", &BlockSet::n)
      .def_readonly("m", &BlockSet::m)
      .def("count", &BlockSet::count)
      .def("window", &BlockSet::window, py::arg("k"));

  py::class_<ReplicationConfig>(m, "ReplicationConfig")
      .def(py::init<>())
      .def_readwrite("n_reps", &ReplicationConfig::n_reps)
      .def_readwrite("base_seed", &ReplicationConfig::base_seed)
      .def_readwrite("parallel", &ReplicationConfig::parallel);

  py::enum_<PriorKind>(m, "PriorKind")
      .value("Flat", PriorKind::Flat)
      .value("IndependentGaussian", PriorKind::IndependentGaussian)
      .value("Uniform", PriorKind::Uniform);

  py::class_<PriorSpec>(m, "PriorSpec")
      .def(py::init<>())
      .def_readwrite("kind", &PriorSpec::kind)
      .def("log_density", &PriorSpec::log_density)
      .def_static("flat", &PriorSpec::flat)
      .def_static("independent_gaussian", &PriorSpec::independent_gaussian,
                  py::arg("mean"), py::arg("sd"))
      .def_static("uniform", &PriorSpec::uniform, py::arg("box"));

  py::class_<McmcConfig>(m, "McmcConfig")
      .def(py::init<>())
      .def_readwrite("n_iters", &McmcConfig::n_iters)
      .def_readwrite("proposal_sd", &McmcConfig::proposal_sd)
      .def_readwrite("seed", &McmcConfig::seed)
      .def_readwrite("burn_in", &McmcConfig::burn_in)
      .def_readwrite("eps_tol", &McmcConfig::eps_tol)
      .def_readwrite("paper_faithful_acceptance",
                     &McmcConfig::paper_faithful_acceptance);

  py::class_<ThetaPoint>(m, "ThetaPoint")
      .def(py::init([](Vector theta, Box bounds) {
             return ThetaPoint{std::move(theta), std::move(bounds)};
           }),
           py::arg("theta"), py::arg("bounds"))
      .def_readwrite("theta", &ThetaPoint::theta)
      .def_readwrite("bounds", &ThetaPoint::bounds)
      .def("within_bounds", &ThetaPoint::within_bounds);

  py::class_<Chain>(m, "Chain")
      .def_readonly("samples", &Chain::samples)
      .def_readonly("loglik", &Chain::loglik)
      .def_readonly("accepted", &Chain::accepted)
      .def_readonly("acceptance_rate", &Chain::acceptance_rate)
      .def_readonly("seed", &Chain::seed)
      .def_readonly("eps_first_hit", &Chain::eps_first_hit)
      .def_readonly("theta0", &Chain::theta0)
      .def_readonly("loglik0", &Chain::loglik0)
      .def("posterior_mean", &Chain::posterior_mean, py::arg("burn_in"))
      .def("posterior_sd", &Chain::posterior_sd, py::arg("burn_in"));

  py::enum_<SimulatorKind>(m, "SimulatorKind")
      .value("GaussianLocationScale", SimulatorKind::GaussianLocationScale)
      .value("LinearModel", SimulatorKind::LinearModel)
      .value("AR1", SimulatorKind::AR1)
      .value("External", SimulatorKind::External);

  py::class_<SimulatorSpec>(m, "SimulatorSpec")
      .def(py::init<>())
      .def_readwrite("kind", &SimulatorSpec::kind)
      .def_readwrite("design", &SimulatorSpec::design)
      .def_readwrite("command", &SimulatorSpec::command)
      .def_readwrite("args", &SimulatorSpec::args)
      .def_readwrite("timeout_sec", &SimulatorSpec::timeout_sec)
      .def("theta_dim", &SimulatorSpec::theta_dim);

  // --- operations ---------------------------------------------------------

  m.def("cr_objective",
        py::overload_cast<const Vector&, double>(&cr_objective),
        py::arg("pi"), py::arg("gamma"));
  m.def("cr_objective",
        py::overload_cast<const Vector&, const CressieReadConfig&>(&cr_objective),
        py::arg("pi"), py::arg("config"));

  m.def("make_moment_model",
        [](const std::string& name, Index d_y) {
          return make_moment_model(MomentModelSpec{name, std::nullopt}, d_y);
        },
        py::arg("name"), py::arg("d_y"),
        "Built-in moment restrictions: Mean, MeanVariance, LinearScore");
  m.def("custom_moment_model", &custom_moment_model, py::arg("d_y"),
        py::arg("d_beta"), py::arg("d_g"), py::arg("eval"), py::arg("lo"),
        py::arg("hi"),
        "Moment restriction from a python callable (y, beta) -> g");

  m.def("contrast_probabilities", &contrast_probabilities, py::arg("data"),
        py::arg("beta"), py::arg("model"), py::arg("lambda_"), py::arg("config"));
  m.def("solve_lambda", &solve_lambda, py::arg("data"), py::arg("beta"),
        py::arg("model"), py::arg("config"),
        py::arg("inner") = InnerSolverConfig{});
  m.def("fit", &fit, py::arg("data"), py::arg("model"), py::arg("config"),
        py::arg("inner") = InnerSolverConfig{},
        py::arg("nelder_mead") = NelderMeadConfig{}, py::arg("beta_init"));

  m.def("learned_basic", &learned_basic, py::arg("obs"), py::arg("sim"));
  m.def("learned_multirep", &learned_multirep, py::arg("obs"), py::arg("sims"));
  m.def("learned_conditional", &learned_conditional, py::arg("obs"),
        py::arg("local"));
  m.def("learned_subset", &learned_subset, py::arg("obs"), py::arg("local"),
        py::arg("mask"));
  m.def("learned_blockwise", &learned_blockwise, py::arg("obs_blocks"),
        py::arg("sim_blocks"));

  m.def("silverman_bandwidth", &silverman_bandwidth, py::arg("obs"));
  m.def("kernel_weights", &kernel_weights, py::arg("obs"), py::arg("config"));
  m.def("fit_local", &fit_local, py::arg("obs"), py::arg("sim"),
        py::arg("model"), py::arg("config"), py::arg("kernel"),
        py::arg("mask") = std::nullopt,
        py::arg("inner") = InnerSolverConfig{},
        py::arg("nelder_mead") = NelderMeadConfig{}, py::arg("beta_init"),
        py::arg("options") = LocalFitOptions{});
  m.def("fit_local_weighted", &fit_local_weighted, py::arg("weights"),
        py::arg("sim"), py::arg("model"), py::arg("config"),
        py::arg("mask") = std::nullopt,
        py::arg("inner") = InnerSolverConfig{},
        py::arg("nelder_mead") = NelderMeadConfig{}, py::arg("beta_init"),
        py::arg("options") = LocalFitOptions{});

  m.def("make_blocks", &make_blocks, py::arg("data"), py::arg("config"));
  m.def("smoothed_moments", &smoothed_moments, py::arg("data"),
        py::arg("blocks"), py::arg("beta"), py::arg("model"));
  m.def("fit_blocks", &fit_blocks, py::arg("data"), py::arg("model"),
        py::arg("config"), py::arg("blocks") = BlockConfig{},
        py::arg("inner") = InnerSolverConfig{},
        py::arg("nelder_mead") = NelderMeadConfig{}, py::arg("beta_init"));

  m.def("simulate", &simulate, py::arg("spec"), py::arg("theta"), py::arg("n"),
        py::arg("seed"));
  m.def("run_replications", &run_replications, py::arg("spec"),
        py::arg("theta"), py::arg("n"), py::arg("config"));
  m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("index"));

  m.def("accept_prob", &accept_prob, py::arg("l_prop"), py::arg("l_prev"),
        py::arg("logprior_prop"), py::arg("logprior_prev"), py::arg("config"));
  m.def("run_chain",
        [](const py::function& ell, const PriorSpec& prior,
           const ThetaPoint& theta0, const McmcConfig& cfg) {
          const LogLikFn fn = [&ell](const Vector& theta,
                                     std::uint64_t iteration) {
            return ell(theta, iteration).cast<LearnedStatistic>();
          };
          return run_chain(fn, prior, theta0, cfg);
        },
        py::arg("ell"), py::arg("prior"), py::arg("theta0"), py::arg("config"),
        "Random-walk Metropolis; ell(theta, iteration) -> LearnedStatistic");

  m.def("load_observations", &load_observations, py::arg("path"));
}
