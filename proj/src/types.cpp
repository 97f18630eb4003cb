#include "crlearn/types.hpp"

#include <cmath>
#include <limits>

namespace crlearn {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InfeasibleBase: return "InfeasibleBase";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NoFeasibleBeta: return "NoFeasibleBeta";
    case ErrorCode::EmptyReplications: return "EmptyReplications";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::DegenerateRow: return "DegenerateRow";
    case ErrorCode::BadBlockLen: return "BadBlockLen";
    case ErrorCode::BadTheta: return "BadTheta";
    case ErrorCode::ExternalFailure: return "ExternalFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InitialPointInfeasible: return "InitialPointInfeasible";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

const char* summary_variant_name(SummaryVariant v) {
  switch (v) {
    case SummaryVariant::Basic: return "basic";
    case SummaryVariant::MultiRep: return "multirep";
    case SummaryVariant::Conditional: return "conditional";
    case SummaryVariant::Subset: return "subset";
    case SummaryVariant::Blockwise: return "blockwise";
  }
  return "unknown";
}

Box::Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size())
    throw Error(ErrorCode::InvalidConfig, "box bounds have mismatched lengths");
  for (Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i]))
      throw Error(ErrorCode::InvalidConfig, "box has lo > hi in coordinate " +
                                                std::to_string(i));
}

bool Box::contains(const Vector& x) const {
  if (x.size() != lo.size()) return false;
  for (Index i = 0; i < x.size(); ++i)
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  return true;
}

Box Box::unbounded(Index d) {
  const double inf = std::numeric_limits<double>::infinity();
  return Box(Vector::Constant(d, -inf), Vector::Constant(d, inf));
}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw Error(ErrorCode::DomainError, "data matrix must be at least 1 x 1");
  if (!values_.allFinite())
    throw Error(ErrorCode::NonFiniteValue, "data matrix has non-finite entries");
}

Matrix evaluate_moments(const MomentModel& model, const DataMatrix& data,
                        const Vector& beta) {
  if (data.cols() != model.d_y)
    throw Error(ErrorCode::LengthMismatch,
                "data has " + std::to_string(data.cols()) +
                    " columns, model expects " + std::to_string(model.d_y));
  if (beta.size() != model.d_beta)
    throw Error(ErrorCode::LengthMismatch, "beta has wrong dimension");
  if (model.eval_all) {
    Matrix g = model.eval_all(data, beta);
    if (g.rows() != data.rows() || g.cols() != model.d_g)
      throw Error(ErrorCode::DomainError, "eval_all returned wrong shape");
    return g;
  }
  Matrix g(data.rows(), model.d_g);
  for (Index i = 0; i < data.rows(); ++i) {
    Vector gi = model.eval(data.row(i), beta);
    if (gi.size() != model.d_g)
      throw Error(ErrorCode::DomainError, "moment function returned wrong length");
    g.row(i) = gi.transpose();
  }
  return g;
}

CressieReadConfig CressieReadConfig::general(double gamma) {
  CressieReadConfig cfg;
  cfg.gamma = gamma;
  cfg.limit_branch = LimitBranch::General;
  cfg.validate();
  return cfg;
}

CressieReadConfig CressieReadConfig::el() {
  CressieReadConfig cfg;
  cfg.gamma = 0.0;
  cfg.limit_branch = LimitBranch::EL_gamma0;
  return cfg;
}

CressieReadConfig CressieReadConfig::et() {
  CressieReadConfig cfg;
  cfg.gamma = -1.0;
  cfg.limit_branch = LimitBranch::ET_gammaNeg1;
  return cfg;
}

void CressieReadConfig::validate() const {
  if (limit_branch == LimitBranch::General && (gamma == 0.0 || gamma == -1.0))
    throw Error(ErrorCode::DomainError,
                "gamma hits a pole of the general branch; select an explicit "
                "limit branch instead");
  if (!(feasibility_margin > 0.0))
    throw Error(ErrorCode::InvalidConfig, "feasibility_margin must be positive");
}

namespace {

constexpr double kSimplexSlack = 1e-10;

void check_simplex(const Vector& pi) {
  if (pi.size() < 1)
    throw Error(ErrorCode::DomainError, "probability vector is empty");
  double sum = 0.0;
  for (Index i = 0; i < pi.size(); ++i) {
    if (!std::isfinite(pi[i]) || pi[i] < -kSimplexSlack)
      throw Error(ErrorCode::DomainError,
                  "probability vector leaves the simplex at index " +
                      std::to_string(i));
    sum += pi[i];
  }
  if (std::abs(sum - 1.0) > kSimplexSlack)
    throw Error(ErrorCode::DomainError, "probabilities sum to " +
                                            std::to_string(sum) +
                                            ", expected 1");
}

}  // namespace

double cr_objective(const Vector& pi, double gamma) {
  if (gamma == 0.0 || gamma == -1.0)
    throw Error(ErrorCode::DomainError,
                "gamma pole in general branch; use the EL/ET limits");
  check_simplex(pi);
  const double n = static_cast<double>(pi.size());
  const double expo = gamma + 1.0;
  double acc = 0.0;
  for (Index i = 0; i < pi.size(); ++i) {
    const double x = n * std::max(pi[i], 0.0);
    double term;
    if (x == 0.0) {
      if (expo > 0.0)
        term = -1.0;
      else  // gamma < -1: divergence blows up at the simplex boundary
        return std::numeric_limits<double>::infinity();
    } else {
      term = std::pow(x, expo) - 1.0;
    }
    acc += term;
  }
  return acc / (gamma * expo);
}

double cr_objective(const Vector& pi, const CressieReadConfig& cfg) {
  switch (cfg.limit_branch) {
    case LimitBranch::General:
      return cr_objective(pi, cfg.gamma);
    case LimitBranch::EL_gamma0: {
      check_simplex(pi);
      const double n = static_cast<double>(pi.size());
      double acc = 0.0;
      for (Index i = 0; i < pi.size(); ++i) {
        const double x = n * std::max(pi[i], 0.0);
        if (x == 0.0) return std::numeric_limits<double>::infinity();
        acc += std::log(x);
      }
      return -acc / n;
    }
    case LimitBranch::ET_gammaNeg1: {
      check_simplex(pi);
      const double n = static_cast<double>(pi.size());
      double acc = 0.0;
      for (Index i = 0; i < pi.size(); ++i) {
        const double x = n * std::max(pi[i], 0.0);
        if (x > 0.0) acc += pi[i] * std::log(x);  // x log x -> 0 as x -> 0
      }
      return acc;
    }
  }
  throw Error(ErrorCode::DomainError, "unknown limit branch");
}

}  // namespace crlearn
