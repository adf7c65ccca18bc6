#include "mivnet/prior.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mivnet/estimators.hpp"

namespace mivnet {

namespace {
constexpr double kPsdTol = -1e-10;
}

PriorKind parse_prior_kind(const std::string& name) {
  if (name == "sutva_uncorrelated") return PriorKind::sutva_uncorrelated;
  if (name == "sutva_constant") return PriorKind::sutva_constant;
  if (name == "sania_uncorrelated") return PriorKind::sania_uncorrelated;
  if (name == "sania_constant") return PriorKind::sania_constant;
  if (name == "sanasia_independent") return PriorKind::sanasia_independent;
  if (name == "custom") return PriorKind::custom;
  throw std::invalid_argument("unknown prior kind: " + name);
}

std::string prior_kind_name(PriorKind k) {
  switch (k) {
    case PriorKind::sutva_uncorrelated: return "sutva_uncorrelated";
    case PriorKind::sutva_constant: return "sutva_constant";
    case PriorKind::sania_uncorrelated: return "sania_uncorrelated";
    case PriorKind::sania_constant: return "sania_constant";
    case PriorKind::sanasia_independent: return "sanasia_independent";
    case PriorKind::custom: return "custom";
  }
  return "?";
}

namespace {

bool is_constant_kind(PriorKind k) {
  return k == PriorKind::sutva_constant || k == PriorKind::sania_constant;
}

void size_per_unit(PriorCov& p) {
  p.s2_alpha = Eigen::VectorXd::Zero(p.n);
  p.s2_beta = Eigen::VectorXd::Zero(p.n);
  p.cov_ab = Eigen::VectorXd::Zero(p.n);
  p.s2_gamma = Eigen::MatrixXd::Zero(p.n, p.max_degree + 1);
  p.s2_delta = Eigen::MatrixXd::Zero(p.n, p.max_degree + 1);
  p.cov_ag = Eigen::MatrixXd::Zero(p.n, p.max_degree + 1);
  p.cov_bg = Eigen::MatrixXd::Zero(p.n, p.max_degree + 1);
}

}  // namespace

PriorCov make_sutva_uncorrelated(int n, double s2a, double s2b, double cab) {
  PriorCov p;
  p.kind = PriorKind::sutva_uncorrelated;
  p.n = n;
  p.max_degree = 0;
  size_per_unit(p);
  p.s2_alpha.setConstant(s2a);
  p.s2_beta.setConstant(s2b);
  p.cov_ab.setConstant(cab);
  validate_prior(p);
  return p;
}

PriorCov make_sutva_constant(double s2a, double s2b, double cab, double jitter) {
  PriorCov p;
  p.kind = PriorKind::sutva_constant;
  p.n = 0;
  p.max_degree = 0;
  p.const_block = Eigen::MatrixXd::Zero(2, 2);
  p.const_block << s2a, cab, cab, s2b;
  p.jitter = jitter;
  validate_prior(p);
  return p;
}

PriorCov make_sania_uncorrelated(int n, int max_degree, double s2a, double s2b, double gamma_coef,
                                 double cab) {
  PriorCov p;
  p.kind = PriorKind::sania_uncorrelated;
  p.n = n;
  p.max_degree = max_degree;
  size_per_unit(p);
  p.s2_alpha.setConstant(s2a);
  p.s2_beta.setConstant(s2b);
  p.cov_ab.setConstant(cab);
  for (int d = 1; d <= max_degree; ++d) p.s2_gamma.col(d).setConstant(gamma_coef * d);
  validate_prior(p);
  return p;
}

PriorCov make_sania_constant(int max_degree, double s2a, double s2b, double gamma_coef, double jitter) {
  PriorCov p;
  p.kind = PriorKind::sania_constant;
  p.n = 0;
  p.max_degree = max_degree;
  p.const_block = Eigen::MatrixXd::Zero(2 + max_degree, 2 + max_degree);
  p.const_block(0, 0) = s2a;
  p.const_block(1, 1) = s2b;
  for (int d = 1; d <= max_degree; ++d) p.const_block(1 + d, 1 + d) = gamma_coef * d;
  p.jitter = jitter;
  validate_prior(p);
  return p;
}

PriorCov make_sanasia_independent(int n, double s2a, double s2b, double s2gamma) {
  PriorCov p;
  p.kind = PriorKind::sanasia_independent;
  p.n = n;
  p.max_degree = 0;
  size_per_unit(p);
  p.s2_alpha.setConstant(s2a);
  p.s2_beta.setConstant(s2b);
  p.s2_gamma_scalar = s2gamma;
  validate_prior(p);
  return p;
}

void validate_prior(const PriorCov& p) {
  if (p.jitter < 0.0) throw std::invalid_argument("prior jitter must be >= 0");
  if (is_constant_kind(p.kind)) {
    const int dim = 2 + p.max_degree;
    if (p.const_block.rows() != dim || p.const_block.cols() != dim)
      throw std::invalid_argument("constant prior block has wrong dimension");
    if ((p.const_block - p.const_block.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("constant prior block must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.const_block, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdTol * std::max(1.0, p.const_block.norm()))
      throw std::invalid_argument("constant prior block is not positive semidefinite");
    return;
  }
  if (p.kind == PriorKind::sanasia_independent) {
    if (p.s2_gamma_scalar < 0.0) throw std::invalid_argument("sanasia gamma variance must be >= 0");
    if ((p.s2_alpha.array() < 0).any() || (p.s2_beta.array() < 0).any())
      throw std::invalid_argument("variances must be >= 0");
    return;
  }
  // per-unit kinds: each within-unit block over [alpha, beta, Gamma(1..D)]
  // (delta variances enter the diagonal separately and must be nonnegative)
  if (p.s2_alpha.size() != p.n || p.s2_beta.size() != p.n || p.cov_ab.size() != p.n ||
      p.s2_gamma.rows() != p.n || p.s2_gamma.cols() != p.max_degree + 1)
    throw std::invalid_argument("per-unit prior blocks have wrong dimension");
  if ((p.s2_delta.array() < 0).any()) throw std::invalid_argument("delta variances must be >= 0");
  const int dim = 2 + p.max_degree;
  Eigen::MatrixXd block(dim, dim);
  for (int i = 0; i < p.n; ++i) {
    block.setZero();
    block(0, 0) = p.s2_alpha[i];
    block(1, 1) = p.s2_beta[i];
    block(0, 1) = block(1, 0) = p.cov_ab[i];
    for (int d = 1; d <= p.max_degree; ++d) {
      block(1 + d, 1 + d) = p.s2_gamma(i, d);
      block(0, 1 + d) = block(1 + d, 0) = p.cov_ag(i, d);
      block(1, 1 + d) = block(1 + d, 1) = p.cov_bg(i, d);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdTol * std::max(1.0, block.norm()))
      throw std::invalid_argument("within-unit prior block is not positive semidefinite (unit " +
                                  std::to_string(i) + ")");
  }
}

SigmaAssembler::SigmaAssembler(const PriorCov& prior, const Graph& g) : prior_(&prior), g_(&g) {
  const int n = g.size();
  // sutva kinds carry no interference block, so the graph degree is moot
  const bool degree_indexed =
      prior.kind == PriorKind::sania_uncorrelated || prior.kind == PriorKind::sania_constant ||
      prior.kind == PriorKind::custom;
  if (!is_constant_kind(prior.kind) && prior.n != n)
    throw std::invalid_argument("prior dimensioned for different n");
  if (degree_indexed && prior.max_degree < g.max_degree())
    throw std::invalid_argument("prior max_degree smaller than graph max degree");
  if (prior.kind == PriorKind::sanasia_independent) {
    h_label_ = component_labels(shared_neighbor_graph(g));
    for (int c : h_label_) n_comp_ = std::max(n_comp_, c + 1);
  }
}

bool SigmaAssembler::diagonal_kind() const {
  switch (prior_->kind) {
    case PriorKind::sutva_uncorrelated:
    case PriorKind::sania_uncorrelated:
    case PriorKind::custom: return true;
    default: return false;
  }
}

double SigmaAssembler::sigma_ii(int i, int arm, int deg) const {
  const PriorCov& p = *prior_;
  if (!diagonal_kind()) throw std::logic_error("sigma_ii is only defined for uncorrelated kinds");
  double v = p.s2_alpha[i] + arm * (p.s2_beta[i] + 2.0 * p.cov_ab[i]);
  if (p.kind == PriorKind::sutva_uncorrelated) return v;
  if (deg > 0) {
    v += p.s2_gamma(i, deg) + arm * p.s2_delta(i, deg);
    v += 2.0 * p.cov_ag(i, deg) + 2.0 * arm * p.cov_bg(i, deg);
  }
  return v;
}

Eigen::MatrixXd SigmaAssembler::sigma(const Allocation& z) const {
  const PriorCov& p = *prior_;
  const Graph& g = *g_;
  const int n = g.size();
  if (z.size() != n) throw std::invalid_argument("allocation length does not match graph");
  const std::vector<int> deg = g.treated_degrees(z);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  switch (p.kind) {
    case PriorKind::sutva_uncorrelated:
    case PriorKind::sania_uncorrelated:
    case PriorKind::custom: {
      for (int i = 0; i < n; ++i) out(i, i) = sigma_ii(i, z[i], deg[static_cast<std::size_t>(i)]);
      return out;
    }
    case PriorKind::sutva_constant:
    case PriorKind::sania_constant: {
      auto cov = [&](int a, int b) { return p.const_block(a, b); };
      const bool with_gamma = p.kind == PriorKind::sania_constant;
      // indices into const_block: 0 = alpha, 1 = beta, 1+d = Gamma(d)
      for (int i = 0; i < n; ++i) {
        const int di = with_gamma ? deg[static_cast<std::size_t>(i)] : 0;
        for (int j = i; j < n; ++j) {
          const int dj = with_gamma ? deg[static_cast<std::size_t>(j)] : 0;
          double v = cov(0, 0) + z[i] * cov(0, 1) + z[j] * cov(0, 1) + z[i] * z[j] * cov(1, 1);
          if (di > 0) v += cov(0, 1 + di) + z[j] * cov(1, 1 + di);
          if (dj > 0) v += cov(0, 1 + dj) + z[i] * cov(1, 1 + dj);
          if (di > 0 && dj > 0) v += cov(1 + di, 1 + dj);
          out(i, j) = out(j, i) = v;
        }
        out(i, i) += p.jitter;
      }
      return out;
    }
    case PriorKind::sanasia_independent: {
      for (int i = 0; i < n; ++i) out(i, i) = p.s2_alpha[i] + z[i] * p.s2_beta[i];
      // one independent slope per shared-neighbor component
      for (int c = 0; c < n_comp_; ++c) {
        Eigen::VectorXd dv = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
          if (h_label_[static_cast<std::size_t>(i)] == c) dv[i] = deg[static_cast<std::size_t>(i)];
        if (dv.isZero(0.0)) continue;
        out.noalias() += p.s2_gamma_scalar * dv * dv.transpose();
      }
      return out;
    }
  }
  throw std::logic_error("unhandled prior kind");
}

Eigen::MatrixXd assemble_sigma_z(const PriorCov& prior, const Graph& g, const Allocation& z) {
  return SigmaAssembler(prior, g).sigma(z);
}

double integrated_variance(const WeightScheme& ws, const Design& d, const PriorCov& prior, const Graph& g) {
  if (ws.w.rows() != d.size() || ws.w.cols() != d.n())
    throw std::invalid_argument("weight scheme not aligned with design support");
  SigmaAssembler assembler(prior, g);
  double acc = 0.0;
  for (int k = 0; k < d.size(); ++k) {
    Eigen::VectorXd wk = ws.w.row(k);
    acc += d.prob(k) * wk.dot(assembler.sigma(d.allocation(k)) * wk);
  }
  return acc - beta_bar_variance(prior);
}

double beta_bar_variance(const PriorCov& p) {
  if (is_constant_kind(p.kind)) return p.const_block(1, 1);
  const double n = static_cast<double>(p.n);
  return p.s2_beta.sum() / (n * n);
}

namespace {

// PSD square root via eigen decomposition (tolerates semidefiniteness).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

ParamSet sample_from_prior(const PriorCov& prior, ModelKind kind, const Graph& g, Rng& rng) {
  const int n = g.size();
  ParamSet p;
  p.kind = kind;
  p.alpha = Eigen::VectorXd::Zero(n);
  p.beta = Eigen::VectorXd::Zero(n);

  switch (prior.kind) {
    case PriorKind::sutva_uncorrelated: {
      if (kind != ModelKind::SUTVA) throw std::invalid_argument("sutva prior samples SUTVA parameters");
      for (int i = 0; i < n; ++i) {
        const double sa = std::sqrt(prior.s2_alpha[i]);
        p.alpha[i] = sa * rng.normal();
        // conditional draw keeps Cov(alpha_i, beta_i) = cov_ab
        double c = sa > 0 ? prior.cov_ab[i] / prior.s2_alpha[i] : 0.0;
        double resid = prior.s2_beta[i] - c * prior.cov_ab[i];
        p.beta[i] = c * p.alpha[i] + std::sqrt(std::max(0.0, resid)) * rng.normal();
      }
      return p;
    }
    case PriorKind::sania_uncorrelated:
    case PriorKind::custom: {
      const bool pattern_kind = (kind == ModelKind::NIA || kind == ModelKind::ANIA);
      const bool degree_kind = (kind == ModelKind::SANIA || kind == ModelKind::SNIA);
      if (!pattern_kind && !degree_kind)
        throw std::invalid_argument("uncorrelated prior samples SANIA/SNIA/NIA/ANIA parameters");
      if (pattern_kind && (prior.cov_ag.cwiseAbs().maxCoeff() > 0 || prior.cov_bg.cwiseAbs().maxCoeff() > 0))
        throw std::invalid_argument("alpha/beta-Gamma crosses are not supported for pattern kinds");
      if (degree_kind) {
        p.gamma_deg.assign(static_cast<std::size_t>(n), {});
        p.delta_deg.assign(static_cast<std::size_t>(n), {});
      } else {
        p.gamma_pat.assign(static_cast<std::size_t>(n), {});
        p.delta_pat.assign(static_cast<std::size_t>(n), {});
      }
      const int dim = 2 + prior.max_degree;
      Eigen::MatrixXd block(dim, dim);
      for (int i = 0; i < n; ++i) {
        block.setZero();
        block(0, 0) = prior.s2_alpha[i];
        block(1, 1) = prior.s2_beta[i];
        block(0, 1) = block(1, 0) = prior.cov_ab[i];
        for (int d = 1; d <= prior.max_degree; ++d) {
          block(1 + d, 1 + d) = prior.s2_gamma(i, d);
          block(0, 1 + d) = block(1 + d, 0) = prior.cov_ag(i, d);
          block(1, 1 + d) = block(1 + d, 1) = prior.cov_bg(i, d);
        }
        Eigen::MatrixXd s = psd_sqrt(block);
        Eigen::VectorXd zdraw(dim);
        for (int k = 0; k < dim; ++k) zdraw[k] = rng.normal();
        Eigen::VectorXd x = s * zdraw;
        p.alpha[i] = x[0];
        p.beta[i] = x[1];
        if (degree_kind) {
          for (int d = 1; d <= g.degree(i); ++d) {
            p.gamma_deg[static_cast<std::size_t>(i)][d] = x[1 + d];
            if (kind == ModelKind::SNIA && prior.s2_delta(i, d) > 0)
              p.delta_deg[static_cast<std::size_t>(i)][d] = std::sqrt(prior.s2_delta(i, d)) * rng.normal();
          }
        } else {
          // independent draw per neighbor pattern, variance keyed by popcount
          const int di = g.degree(i);
          for (std::uint64_t m = 1; m < (std::uint64_t{1} << di); ++m) {
            int pc = std::popcount(m);
            double sg = std::sqrt(prior.s2_gamma(i, pc));
            p.gamma_pat[static_cast<std::size_t>(i)][m] = sg * rng.normal();
            if (kind == ModelKind::NIA && prior.s2_delta(i, pc) > 0)
              p.delta_pat[static_cast<std::size_t>(i)][m] = std::sqrt(prior.s2_delta(i, pc)) * rng.normal();
          }
        }
      }
      return p;
    }
    case PriorKind::sutva_constant:
    case PriorKind::sania_constant: {
      if (prior.kind == PriorKind::sutva_constant && kind != ModelKind::SUTVA)
        throw std::invalid_argument("sutva prior samples SUTVA parameters");
      if (prior.kind == PriorKind::sania_constant && kind != ModelKind::SANIA && kind != ModelKind::SUTVA)
        throw std::invalid_argument("sania_constant prior samples SANIA parameters");
      const int dim = 2 + prior.max_degree;
      Eigen::MatrixXd s = psd_sqrt(prior.const_block);
      Eigen::VectorXd zdraw(dim);
      for (int k = 0; k < dim; ++k) zdraw[k] = rng.normal();
      Eigen::VectorXd x = s * zdraw;
      const double sj = std::sqrt(prior.jitter);
      for (int i = 0; i < n; ++i) {
        p.alpha[i] = x[0] + sj * rng.normal();
        p.beta[i] = x[1];
      }
      if (kind == ModelKind::SANIA) {
        p.gamma_deg.assign(static_cast<std::size_t>(n), {});
        for (int i = 0; i < n; ++i)
          for (int d = 1; d <= g.degree(i); ++d) p.gamma_deg[static_cast<std::size_t>(i)][d] = x[1 + d];
      }
      return p;
    }
    case PriorKind::sanasia_independent: {
      if (kind != ModelKind::SANASIA)
        throw std::invalid_argument("sanasia prior samples SANASIA parameters");
      for (int i = 0; i < n; ++i) {
        p.alpha[i] = std::sqrt(prior.s2_alpha[i]) * rng.normal();
        p.beta[i] = std::sqrt(prior.s2_beta[i]) * rng.normal();
      }
      p.h_component = component_labels(shared_neighbor_graph(g));
      int ncomp = 0;
      for (int c : p.h_component) ncomp = std::max(ncomp, c + 1);
      p.gamma_comp.resize(static_cast<std::size_t>(ncomp));
      p.delta_comp.assign(static_cast<std::size_t>(ncomp), 0.0);
      const double sg = std::sqrt(prior.s2_gamma_scalar);
      for (int c = 0; c < ncomp; ++c) p.gamma_comp[static_cast<std::size_t>(c)] = sg * rng.normal();
      return p;
    }
  }
  throw std::logic_error("unhandled prior kind");
}

void save_prior(const PriorCov& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "kind " << prior_kind_name(p.kind) << "\n";
  out << "max_degree " << p.max_degree << "\n";
  if (p.jitter != 0.0) out << "jitter " << fmt(p.jitter) << "\n";
  if (p.kind == PriorKind::sutva_constant || p.kind == PriorKind::sania_constant) {
    for (int a = 0; a < p.const_block.rows(); ++a)
      for (int b = a; b < p.const_block.cols(); ++b)
        if (p.const_block(a, b) != 0.0) out << "const_cov " << a << " " << b << " " << fmt(p.const_block(a, b)) << "\n";
  } else {
    for (int i = 0; i < p.n; ++i) {
      if (p.s2_alpha[i] != 0.0) out << "alpha_var_unit " << i << " " << fmt(p.s2_alpha[i]) << "\n";
      if (p.s2_beta[i] != 0.0) out << "beta_var_unit " << i << " " << fmt(p.s2_beta[i]) << "\n";
      if (p.cov_ab[i] != 0.0) out << "cov_alpha_beta_unit " << i << " " << fmt(p.cov_ab[i]) << "\n";
      for (int d = 1; d <= p.max_degree; ++d) {
        if (p.s2_gamma(i, d) != 0.0) out << "gamma_var_unit_d " << i << " " << d << " " << fmt(p.s2_gamma(i, d)) << "\n";
        if (p.s2_delta(i, d) != 0.0) out << "delta_var_unit_d " << i << " " << d << " " << fmt(p.s2_delta(i, d)) << "\n";
        if (p.cov_ag(i, d) != 0.0) out << "cov_alpha_gamma_unit_d " << i << " " << d << " " << fmt(p.cov_ag(i, d)) << "\n";
        if (p.cov_bg(i, d) != 0.0) out << "cov_beta_gamma_unit_d " << i << " " << d << " " << fmt(p.cov_bg(i, d)) << "\n";
      }
    }
    if (p.s2_gamma_scalar != 0.0) out << "gamma_var " << fmt(p.s2_gamma_scalar) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PriorCov load_prior(const std::string& path, int n, int max_degree) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prior file: " + path);
  PriorCov p;
  p.n = n;
  std::string line;
  int lineno = 0;
  bool have_kind = false;
  // defer sizing until kind and max_degree are known; collect entries first
  std::vector<std::array<double, 4>> entries;  // code, a, b, v
  std::map<std::string, int> codes = {
      {"alpha_var", 0},          {"beta_var", 1},
      {"cov_alpha_beta", 2},     {"gamma_var_coef", 3},
      {"delta_var_coef", 4},     {"gamma_var_d", 5},
      {"delta_var_d", 6},        {"alpha_var_unit", 7},
      {"beta_var_unit", 8},      {"cov_alpha_beta_unit", 9},
      {"gamma_var_unit_d", 10},  {"delta_var_unit_d", 11},
      {"cov_alpha_gamma_d", 12}, {"cov_beta_gamma_d", 13},
      {"const_cov", 14},         {"gamma_var", 15},
      {"jitter", 16},            {"cov_alpha_gamma_unit_d", 17},
      {"cov_beta_gamma_unit_d", 18}};
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string key;
    is >> key;
    auto bad = [&]() {
      return std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed '" + key + "' entry");
    };
    if (key == "kind") {
      std::string name;
      is >> name;
      if (!is) throw bad();
      p.kind = parse_prior_kind(name);
      have_kind = true;
      continue;
    }
    if (key == "max_degree") {
      int d;
      is >> d;
      if (!is || d < 0) throw bad();
      max_degree = std::max(max_degree, d);
      continue;
    }
    auto it = codes.find(key);
    if (it == codes.end()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown entry '" + key + "'");
    double a = 0, b = 0, v = 0;
    switch (it->second) {
      case 0: case 1: case 2: case 3: case 4: case 15: case 16:
        is >> v;
        break;
      case 5: case 6: case 7: case 8: case 9: case 12: case 13:
        is >> a >> v;
        break;
      default:
        is >> a >> b >> v;
        break;
    }
    if (!is) throw bad();
    entries.push_back({static_cast<double>(it->second), a, b, v});
  }
  if (!have_kind) throw std::runtime_error(path + ": missing 'kind <tag>'");
  p.max_degree = max_degree;
  const bool constant = p.kind == PriorKind::sutva_constant || p.kind == PriorKind::sania_constant;
  if (constant) {
    p.const_block = Eigen::MatrixXd::Zero(2 + max_degree, 2 + max_degree);
    p.n = 0;
  } else {
    size_per_unit(p);
  }
  for (auto [codef, a, b, v] : entries) {
    const int code = static_cast<int>(codef);
    const int ia = static_cast<int>(a), ib = static_cast<int>(b);
    switch (code) {
      case 0: constant ? (void)(p.const_block(0, 0) = v) : (void)p.s2_alpha.setConstant(v); break;
      case 1: constant ? (void)(p.const_block(1, 1) = v) : (void)p.s2_beta.setConstant(v); break;
      case 2:
        if (constant) p.const_block(0, 1) = p.const_block(1, 0) = v;
        else p.cov_ab.setConstant(v);
        break;
      case 3:
        for (int d = 1; d <= max_degree; ++d) {
          if (constant) p.const_block(1 + d, 1 + d) = v * d;
          else p.s2_gamma.col(d).setConstant(v * d);
        }
        break;
      case 4:
        if (constant) throw std::runtime_error(path + ": delta entries need a per-unit prior kind");
        for (int d = 1; d <= max_degree; ++d) p.s2_delta.col(d).setConstant(v * d);
        break;
      case 5:
        if (constant) p.const_block(1 + ia, 1 + ia) = v;
        else p.s2_gamma.col(ia).setConstant(v);
        break;
      case 6:
        if (constant) throw std::runtime_error(path + ": delta entries need a per-unit prior kind");
        p.s2_delta.col(ia).setConstant(v);
        break;
      case 7: p.s2_alpha[ia] = v; break;
      case 8: p.s2_beta[ia] = v; break;
      case 9: p.cov_ab[ia] = v; break;
      case 10: p.s2_gamma(ia, ib) = v; break;
      case 11: p.s2_delta(ia, ib) = v; break;
      case 12:
        if (constant) p.const_block(0, 1 + ia) = p.const_block(1 + ia, 0) = v;
        else p.cov_ag.col(ia).setConstant(v);
        break;
      case 13:
        if (constant) p.const_block(1, 1 + ia) = p.const_block(1 + ia, 1) = v;
        else p.cov_bg.col(ia).setConstant(v);
        break;
      case 14:
        if (!constant) throw std::runtime_error(path + ": const_cov needs a constant prior kind");
        p.const_block(ia, ib) = p.const_block(ib, ia) = v;
        break;
      case 15: p.s2_gamma_scalar = v; break;
      case 16: p.jitter = v; break;
      case 17: p.cov_ag(ia, ib) = v; break;
      case 18: p.cov_bg(ia, ib) = v; break;
    }
  }
  validate_prior(p);
  return p;
}

}  // namespace mivnet
