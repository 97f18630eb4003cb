#include "crlearn/config.hpp"

#include <fstream>

namespace crlearn {

using json = nlohmann::json;

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Fit: return "fit";
    case RunMode::Summarize: return "summarize";
    case RunMode::Mcmc: return "mcmc";
    case RunMode::Simulate: return "simulate";
  }
  return "unknown";
}

RunMode parse_run_mode(const std::string& name) {
  if (name == "fit") return RunMode::Fit;
  if (name == "summarize") return RunMode::Summarize;
  if (name == "mcmc") return RunMode::Mcmc;
  if (name == "simulate") return RunMode::Simulate;
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + name + "'");
}

namespace {

SummaryVariant parse_variant(const std::string& name) {
  if (name == "basic") return SummaryVariant::Basic;
  if (name == "multirep") return SummaryVariant::MultiRep;
  if (name == "conditional") return SummaryVariant::Conditional;
  if (name == "subset") return SummaryVariant::Subset;
  if (name == "blockwise") return SummaryVariant::Blockwise;
  throw Error(ErrorCode::InvalidConfig, "unknown variant '" + name + "'");
}

Vector vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array())
    throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be an array");
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw Error(ErrorCode::InvalidConfig,
                  std::string(what) + " must contain numbers");
    v[static_cast<Index>(i)] = arr[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Box box_from_json(const json& obj, const char* what) {
  if (!obj.is_object() || !obj.contains("lo") || !obj.contains("hi"))
    throw Error(ErrorCode::InvalidConfig,
                std::string(what) + " must be {\"lo\": [...], \"hi\": [...]}");
  return Box(vector_from_json(obj["lo"], what), vector_from_json(obj["hi"], what));
}

json box_to_json(const Box& box) {
  return json{{"lo", vector_to_json(box.lo)}, {"hi", vector_to_json(box.hi)}};
}

Matrix matrix_from_json(const json& arr, const char* what) {
  if (!arr.is_array() || arr.empty())
    throw Error(ErrorCode::InvalidConfig,
                std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = arr[0].size();
  Matrix m(arr.size(), cols);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_array() || arr[i].size() != cols)
      throw Error(ErrorCode::InvalidConfig, std::string(what) + " is ragged");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = arr[i][j].get<double>();
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

SimulatorSpec simulator_from_json(const json& obj) {
  SimulatorSpec spec;
  const std::string kind = obj.value("kind", "gaussian_location_scale");
  if (kind == "gaussian_location_scale")
    spec.kind = SimulatorKind::GaussianLocationScale;
  else if (kind == "ar1")
    spec.kind = SimulatorKind::AR1;
  else if (kind == "linear_model")
    spec.kind = SimulatorKind::LinearModel;
  else if (kind == "external")
    spec.kind = SimulatorKind::External;
  else
    throw Error(ErrorCode::InvalidConfig, "unknown simulator kind '" + kind + "'");
  if (obj.contains("design"))
    spec.design = matrix_from_json(obj["design"], "simulator.design");
  spec.command = obj.value("command", "");
  if (obj.contains("args"))
    spec.args = obj["args"].get<std::vector<std::string>>();
  spec.timeout_sec = obj.value("timeout_sec", 30.0);
  return spec;
}

json simulator_to_json(const SimulatorSpec& spec) {
  json obj;
  switch (spec.kind) {
    case SimulatorKind::GaussianLocationScale:
      obj["kind"] = "gaussian_location_scale";
      break;
    case SimulatorKind::AR1: obj["kind"] = "ar1"; break;
    case SimulatorKind::LinearModel: obj["kind"] = "linear_model"; break;
    case SimulatorKind::External: obj["kind"] = "external"; break;
  }
  if (spec.design.size() > 0) obj["design"] = matrix_to_json(spec.design);
  if (!spec.command.empty()) obj["command"] = spec.command;
  if (!spec.args.empty()) obj["args"] = spec.args;
  obj["timeout_sec"] = spec.timeout_sec;
  return obj;
}

CressieReadConfig cr_from_json(const json& obj) {
  CressieReadConfig cr;
  const std::string branch = obj.value("branch", "general");
  if (branch == "general") {
    cr.limit_branch = LimitBranch::General;
    cr.gamma = obj.value("gamma", 1.0);
  } else if (branch == "el") {
    cr = CressieReadConfig::el();
  } else if (branch == "et") {
    cr = CressieReadConfig::et();
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown cr branch '" + branch + "'");
  }
  cr.feasibility_margin = obj.value("feasibility_margin", 1e-10);
  cr.validate();
  return cr;
}

json cr_to_json(const CressieReadConfig& cr) {
  json obj;
  switch (cr.limit_branch) {
    case LimitBranch::General: obj["branch"] = "general"; break;
    case LimitBranch::EL_gamma0: obj["branch"] = "el"; break;
    case LimitBranch::ET_gammaNeg1: obj["branch"] = "et"; break;
  }
  obj["gamma"] = cr.gamma;
  obj["feasibility_margin"] = cr.feasibility_margin;
  return obj;
}

PriorSpec prior_from_json(const json& obj) {
  const std::string kind = obj.value("kind", "flat");
  if (kind == "flat") return PriorSpec::flat();
  if (kind == "gaussian")
    return PriorSpec::independent_gaussian(
        vector_from_json(obj.at("mean"), "prior.mean"),
        vector_from_json(obj.at("sd"), "prior.sd"));
  if (kind == "uniform")
    return PriorSpec::uniform(Box(vector_from_json(obj.at("lo"), "prior.lo"),
                                  vector_from_json(obj.at("hi"), "prior.hi")));
  throw Error(ErrorCode::InvalidConfig, "unknown prior kind '" + kind + "'");
}

json prior_to_json(const PriorSpec& prior) {
  json obj;
  switch (prior.kind) {
    case PriorKind::Flat: obj["kind"] = "flat"; break;
    case PriorKind::IndependentGaussian:
      obj["kind"] = "gaussian";
      obj["mean"] = vector_to_json(prior.mean);
      obj["sd"] = vector_to_json(prior.sd);
      break;
    case PriorKind::Uniform:
      obj["kind"] = "uniform";
      obj["lo"] = vector_to_json(prior.box.lo);
      obj["hi"] = vector_to_json(prior.box.hi);
      break;
  }
  return obj;
}

KernelConfig kernel_from_json(const json& obj) {
  KernelConfig k;
  const std::string kind = obj.value("kind", "gaussian");
  if (kind == "gaussian") k.kernel = KernelKind::Gaussian;
  else if (kind == "epanechnikov") k.kernel = KernelKind::Epanechnikov;
  else if (kind == "uniform") k.kernel = KernelKind::Uniform;
  else throw Error(ErrorCode::InvalidConfig, "unknown kernel '" + kind + "'");
  const std::string rule = obj.value("rule", "silverman");
  if (rule == "silverman") k.bandwidth_rule = BandwidthRule::SilvermanRule;
  else if (rule == "fixed") k.bandwidth_rule = BandwidthRule::Fixed;
  else throw Error(ErrorCode::InvalidConfig, "unknown bandwidth rule '" + rule + "'");
  k.bandwidth = obj.value("bandwidth", 1.0);
  k.validate();
  return k;
}

json kernel_to_json(const KernelConfig& k) {
  json obj;
  switch (k.kernel) {
    case KernelKind::Gaussian: obj["kind"] = "gaussian"; break;
    case KernelKind::Epanechnikov: obj["kind"] = "epanechnikov"; break;
    case KernelKind::Uniform: obj["kind"] = "uniform"; break;
  }
  obj["rule"] =
      k.bandwidth_rule == BandwidthRule::SilvermanRule ? "silverman" : "fixed";
  obj["bandwidth"] = k.bandwidth;
  return obj;
}

}  // namespace

RunConfig run_config_from_json(const json& doc) {
  if (!doc.is_object())
    throw Error(ErrorCode::InvalidConfig, "config document must be an object");
  RunConfig cfg;
  if (doc.contains("mode")) cfg.mode = parse_run_mode(doc["mode"].get<std::string>());
  cfg.data_path = doc.value("data", "");
  cfg.output_dir = doc.value("out", ".");
  cfg.seed = doc.value("seed", std::uint64_t{0});

  if (doc.contains("simulator")) cfg.simulator = simulator_from_json(doc["simulator"]);
  if (doc.contains("moment_model")) {
    const json& mm = doc["moment_model"];
    cfg.moment_model.name = mm.value("name", "Mean");
    if (mm.contains("beta_bounds"))
      cfg.moment_model.beta_bounds =
          box_from_json(mm["beta_bounds"], "moment_model.beta_bounds");
  }
  if (doc.contains("cr")) cfg.cr = cr_from_json(doc["cr"]);
  if (doc.contains("inner")) {
    const json& inner = doc["inner"];
    cfg.inner.max_iters = inner.value("max_iters", cfg.inner.max_iters);
    cfg.inner.tol = inner.value("tol", cfg.inner.tol);
    cfg.inner.backtrack_ratio =
        inner.value("backtrack_ratio", cfg.inner.backtrack_ratio);
    cfg.inner.validate();
  }
  if (doc.contains("nelder_mead")) {
    const json& nm = doc["nelder_mead"];
    cfg.nelder_mead.reflect = nm.value("reflect", cfg.nelder_mead.reflect);
    cfg.nelder_mead.expand = nm.value("expand", cfg.nelder_mead.expand);
    cfg.nelder_mead.contract = nm.value("contract", cfg.nelder_mead.contract);
    cfg.nelder_mead.shrink = nm.value("shrink", cfg.nelder_mead.shrink);
    cfg.nelder_mead.max_iters = nm.value("max_iters", cfg.nelder_mead.max_iters);
    cfg.nelder_mead.f_tol = nm.value("f_tol", cfg.nelder_mead.f_tol);
    cfg.nelder_mead.initial_step =
        nm.value("initial_step", cfg.nelder_mead.initial_step);
    cfg.nelder_mead.validate();
  }

  if (doc.contains("variant"))
    cfg.variant = parse_variant(doc["variant"].get<std::string>());
  if (doc.contains("replications")) {
    const json& rep = doc["replications"];
    cfg.replications.n_reps = rep.value("n_reps", 1);
    cfg.replications.base_seed = rep.value("base_seed", std::uint64_t{0});
    cfg.replications.parallel = rep.value("parallel", false);
  }
  if (doc.contains("kernel")) cfg.kernel = kernel_from_json(doc["kernel"]);
  if (doc.contains("subset")) {
    const json& subset = doc["subset"];
    if (subset.contains("indices")) {
      std::vector<Index> idx;
      for (const auto& v : subset["indices"]) idx.push_back(v.get<Index>());
      cfg.subset_indices = std::move(idx);
    }
  }
  if (doc.contains("blocks")) {
    const json& blocks = doc["blocks"];
    const std::string rule = blocks.value("rule", "fixed");
    if (rule == "fixed") cfg.blocks.rule = BlockRule::Fixed;
    else if (rule == "sqrt") cfg.blocks.rule = BlockRule::SqrtRule;
    else throw Error(ErrorCode::InvalidConfig, "unknown block rule '" + rule + "'");
    cfg.blocks.block_len = blocks.value("block_len", Index{1});
  }

  if (doc.contains("mcmc")) {
    const json& mc = doc["mcmc"];
    cfg.mcmc.n_iters = mc.value("n_iters", 1000);
    cfg.mcmc.burn_in = mc.value("burn_in", 0);
    if (mc.contains("proposal_sd"))
      cfg.mcmc.proposal_sd = vector_from_json(mc["proposal_sd"], "mcmc.proposal_sd");
    cfg.mcmc.seed = mc.value("seed", cfg.seed);
    if (mc.contains("eps_tol") && !mc["eps_tol"].is_null())
      cfg.mcmc.eps_tol = mc["eps_tol"].get<double>();
    cfg.mcmc.paper_faithful_acceptance =
        mc.value("paper_faithful_acceptance", false);
    cfg.resimulate_per_proposal = mc.value("resimulate_per_proposal", true);
  } else {
    cfg.mcmc.seed = cfg.seed;
  }
  if (doc.contains("prior")) cfg.prior = prior_from_json(doc["prior"]);

  if (doc.contains("theta")) cfg.theta = vector_from_json(doc["theta"], "theta");
  if (doc.contains("theta_bounds"))
    cfg.theta_bounds = box_from_json(doc["theta_bounds"], "theta_bounds");
  cfg.sim_n = doc.value("sim_n", Index{0});
  if (doc.contains("beta_init"))
    cfg.beta_init = vector_from_json(doc["beta_init"], "beta_init");
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  json doc;
  doc["mode"] = run_mode_name(cfg.mode);
  doc["data"] = cfg.data_path;
  doc["out"] = cfg.output_dir;
  doc["seed"] = cfg.seed;
  doc["simulator"] = simulator_to_json(cfg.simulator);
  doc["moment_model"]["name"] = cfg.moment_model.name;
  if (cfg.moment_model.beta_bounds)
    doc["moment_model"]["beta_bounds"] = box_to_json(*cfg.moment_model.beta_bounds);
  doc["cr"] = cr_to_json(cfg.cr);
  doc["inner"] = {{"max_iters", cfg.inner.max_iters},
                  {"tol", cfg.inner.tol},
                  {"backtrack_ratio", cfg.inner.backtrack_ratio}};
  doc["nelder_mead"] = {{"reflect", cfg.nelder_mead.reflect},
                        {"expand", cfg.nelder_mead.expand},
                        {"contract", cfg.nelder_mead.contract},
                        {"shrink", cfg.nelder_mead.shrink},
                        {"max_iters", cfg.nelder_mead.max_iters},
                        {"f_tol", cfg.nelder_mead.f_tol},
                        {"initial_step", cfg.nelder_mead.initial_step}};
  doc["variant"] = summary_variant_name(cfg.variant);
  doc["replications"] = {{"n_reps", cfg.replications.n_reps},
                         {"base_seed", cfg.replications.base_seed},
                         {"parallel", cfg.replications.parallel}};
  doc["kernel"] = kernel_to_json(cfg.kernel);
  if (cfg.subset_indices) doc["subset"]["indices"] = *cfg.subset_indices;
  doc["blocks"] = {
      {"rule", cfg.blocks.rule == BlockRule::Fixed ? "fixed" : "sqrt"},
      {"block_len", cfg.blocks.block_len}};
  json mc = {{"n_iters", cfg.mcmc.n_iters},
             {"burn_in", cfg.mcmc.burn_in},
             {"seed", cfg.mcmc.seed},
             {"paper_faithful_acceptance", cfg.mcmc.paper_faithful_acceptance},
             {"resimulate_per_proposal", cfg.resimulate_per_proposal}};
  if (cfg.mcmc.proposal_sd.size() > 0)
    mc["proposal_sd"] = vector_to_json(cfg.mcmc.proposal_sd);
  if (cfg.mcmc.eps_tol) mc["eps_tol"] = *cfg.mcmc.eps_tol;
  doc["mcmc"] = std::move(mc);
  doc["prior"] = prior_to_json(cfg.prior);
  if (cfg.theta) doc["theta"] = vector_to_json(*cfg.theta);
  if (cfg.theta_bounds) doc["theta_bounds"] = box_to_json(*cfg.theta_bounds);
  doc["sim_n"] = cfg.sim_n;
  if (cfg.beta_init) doc["beta_init"] = vector_to_json(*cfg.beta_init);
  return doc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError,
                "config '" + path + "': " + std::string(e.what()));
  }
  return run_config_from_json(doc);
}

}  // namespace crlearn
