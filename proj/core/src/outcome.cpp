#include "mivnet/outcome.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mivnet {

ModelKind parse_model_kind(const std::string& name) {
  static const std::map<std::string, ModelKind> table = {
      {"SUTVA", ModelKind::SUTVA},   {"NIA", ModelKind::NIA},       {"SNIA", ModelKind::SNIA},
      {"ANIA", ModelKind::ANIA},     {"NAIA", ModelKind::NAIA},     {"SANIA", ModelKind::SANIA},
      {"SNAIA", ModelKind::SNAIA},   {"ANAIA", ModelKind::ANAIA},   {"NASIA", ModelKind::NASIA},
      {"SANAIA", ModelKind::SANAIA}, {"SNASIA", ModelKind::SNASIA}, {"ANASIA", ModelKind::ANASIA},
      {"SANASIA", ModelKind::SANASIA}};
  auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown model kind: " + name);
  return it->second;
}

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::SUTVA: return "SUTVA";
    case ModelKind::NIA: return "NIA";
    case ModelKind::SNIA: return "SNIA";
    case ModelKind::ANIA: return "ANIA";
    case ModelKind::NAIA: return "NAIA";
    case ModelKind::SANIA: return "SANIA";
    case ModelKind::SNAIA: return "SNAIA";
    case ModelKind::ANAIA: return "ANAIA";
    case ModelKind::NASIA: return "NASIA";
    case ModelKind::SANAIA: return "SANAIA";
    case ModelKind::SNASIA: return "SNASIA";
    case ModelKind::ANASIA: return "ANASIA";
    case ModelKind::SANASIA: return "SANASIA";
  }
  return "?";
}

bool sym_received(ModelKind k) {
  switch (k) {
    case ModelKind::SNIA:
    case ModelKind::SANIA:
    case ModelKind::SNAIA:
    case ModelKind::SANAIA:
    case ModelKind::SNASIA:
    case ModelKind::SANASIA: return true;
    default: return false;
  }
}

bool additive_main(ModelKind k) {
  switch (k) {
    case ModelKind::SUTVA:
    case ModelKind::ANIA:
    case ModelKind::SANIA:
    case ModelKind::ANAIA:
    case ModelKind::SANAIA:
    case ModelKind::ANASIA:
    case ModelKind::SANASIA: return true;
    default: return false;
  }
}

bool additive_intf(ModelKind k) {
  switch (k) {
    case ModelKind::SUTVA:
    case ModelKind::NAIA:
    case ModelKind::SNAIA:
    case ModelKind::ANAIA:
    case ModelKind::NASIA:
    case ModelKind::SANAIA:
    case ModelKind::SNASIA:
    case ModelKind::ANASIA:
    case ModelKind::SANASIA: return true;
    default: return false;
  }
}

bool sym_sent(ModelKind k) {
  switch (k) {
    case ModelKind::NASIA:
    case ModelKind::SNASIA:
    case ModelKind::ANASIA:
    case ModelKind::SANASIA: return true;
    default: return false;
  }
}

std::uint64_t neighbor_pattern(const Graph& g, const Allocation& z, int i) {
  const auto& nbrs = g.neighborhood(i);
  if (nbrs.size() > 63) throw std::invalid_argument("neighbor pattern keys need degree <= 63");
  std::uint64_t mask = 0;
  for (std::size_t b = 0; b < nbrs.size(); ++b)
    if (z[nbrs[b]]) mask |= (std::uint64_t{1} << b);
  return mask;
}

namespace {

double map_get(const std::map<std::uint64_t, double>& m, std::uint64_t k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}
double map_get(const std::map<int, double>& m, int k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}
double map_get(const std::map<std::pair<int, int>, double>& m, int a, int b) {
  auto it = m.find({a, b});
  return it == m.end() ? 0.0 : it->second;
}

void check_dims(const ParamSet& p, const Graph& g) {
  const int n = g.size();
  if (p.alpha.size() != n || p.beta.size() != n)
    throw std::invalid_argument("parameter set not dimensioned for graph");
  switch (p.kind) {
    case ModelKind::NIA:
      if (p.delta_pat.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("NIA needs per-unit delta pattern tables");
      [[fallthrough]];
    case ModelKind::ANIA:
      if (p.gamma_pat.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("pattern kinds need per-unit gamma tables");
      break;
    case ModelKind::SNIA:
      if (p.delta_deg.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("SNIA needs per-unit delta degree tables");
      [[fallthrough]];
    case ModelKind::SANIA:
      if (p.gamma_deg.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("degree kinds need per-unit gamma tables");
      break;
    case ModelKind::NASIA:
    case ModelKind::ANASIA:
      if (p.gamma_sender.size() != n) throw std::invalid_argument("sender kinds need gamma_sender");
      if (p.kind == ModelKind::NASIA && p.delta_sender.size() != n)
        throw std::invalid_argument("NASIA needs delta_sender");
      break;
    case ModelKind::SNAIA:
    case ModelKind::SANAIA:
      if (p.gamma_slope.size() != n) throw std::invalid_argument("slope kinds need gamma_slope");
      if (p.kind == ModelKind::SNAIA && p.delta_slope.size() != n)
        throw std::invalid_argument("SNAIA needs delta_slope");
      break;
    case ModelKind::SNASIA:
    case ModelKind::SANASIA: {
      if (p.h_component.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("component kinds need h_component labels");
      for (int c : p.h_component)
        if (c < 0 || static_cast<std::size_t>(c) >= p.gamma_comp.size())
          throw std::invalid_argument("component label outside gamma_comp range");
      if (p.kind == ModelKind::SNASIA && p.delta_comp.size() != p.gamma_comp.size())
        throw std::invalid_argument("SNASIA needs per-component delta");
      break;
    }
    default: break;
  }
}

}  // namespace

double evaluate(const ParamSet& p, const Graph& g, const Allocation& z, int i) {
  if (z.size() != g.size()) throw std::invalid_argument("allocation length does not match graph");
  if (i < 0 || i >= g.size()) throw std::out_of_range("unit index out of range");
  check_dims(p, g);

  const double zi = z[i] ? 1.0 : 0.0;
  double y = p.alpha[i] + zi * p.beta[i];
  switch (p.kind) {
    case ModelKind::SUTVA: return y;
    case ModelKind::NIA: {
      std::uint64_t m = neighbor_pattern(g, z, i);
      return y + map_get(p.gamma_pat[static_cast<std::size_t>(i)], m) +
             zi * map_get(p.delta_pat[static_cast<std::size_t>(i)], m);
    }
    case ModelKind::ANIA: {
      std::uint64_t m = neighbor_pattern(g, z, i);
      return y + map_get(p.gamma_pat[static_cast<std::size_t>(i)], m);
    }
    case ModelKind::SNIA: {
      int d = g.treated_degree(z, i);
      return y + map_get(p.gamma_deg[static_cast<std::size_t>(i)], d) +
             zi * map_get(p.delta_deg[static_cast<std::size_t>(i)], d);
    }
    case ModelKind::SANIA: {
      int d = g.treated_degree(z, i);
      return y + map_get(p.gamma_deg[static_cast<std::size_t>(i)], d);
    }
    case ModelKind::NAIA: {
      for (int j : g.neighborhood(i))
        if (z[j]) y += map_get(p.gamma_edge, j, i) + zi * map_get(p.delta_edge, j, i);
      return y;
    }
    case ModelKind::ANAIA: {
      for (int j : g.neighborhood(i))
        if (z[j]) y += map_get(p.gamma_edge, j, i);
      return y;
    }
    case ModelKind::NASIA: {
      for (int j : g.neighborhood(i))
        if (z[j]) y += p.gamma_sender[j] + zi * p.delta_sender[j];
      return y;
    }
    case ModelKind::ANASIA: {
      for (int j : g.neighborhood(i))
        if (z[j]) y += p.gamma_sender[j];
      return y;
    }
    case ModelKind::SNAIA: {
      int d = g.treated_degree(z, i);
      return y + p.gamma_slope[i] * d + zi * p.delta_slope[i] * d;
    }
    case ModelKind::SANAIA: {
      int d = g.treated_degree(z, i);
      return y + p.gamma_slope[i] * d;
    }
    case ModelKind::SNASIA: {
      int d = g.treated_degree(z, i);
      int c = p.h_component[static_cast<std::size_t>(i)];
      return y + p.gamma_comp[static_cast<std::size_t>(c)] * d +
             zi * p.delta_comp[static_cast<std::size_t>(c)] * d;
    }
    case ModelKind::SANASIA: {
      int d = g.treated_degree(z, i);
      int c = p.h_component[static_cast<std::size_t>(i)];
      return y + p.gamma_comp[static_cast<std::size_t>(c)] * d;
    }
  }
  throw std::logic_error("unhandled model kind");
}

Eigen::VectorXd evaluate_all(const ParamSet& p, const Graph& g, const Allocation& z) {
  Eigen::VectorXd y(g.size());
  for (int i = 0; i < g.size(); ++i) y[i] = evaluate(p, g, z, i);
  return y;
}

double estimand_beta_bar(const ParamSet& p) {
  if (p.beta.size() == 0) throw std::invalid_argument("empty parameter set");
  return p.beta.mean();
}

ParamSet to_nia(const ParamSet& p, const Graph& g) {
  check_dims(p, g);
  const int n = g.size();
  ParamSet out;
  out.kind = ModelKind::NIA;
  out.alpha = p.alpha;
  out.beta = p.beta;
  out.gamma_pat.assign(static_cast<std::size_t>(n), {});
  out.delta_pat.assign(static_cast<std::size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    const auto& nbrs = g.neighborhood(i);
    if (nbrs.size() > 20) throw std::invalid_argument("to_nia enumerates 2^degree patterns; degree too large");
    const std::uint64_t npat = std::uint64_t{1} << nbrs.size();
    for (std::uint64_t m = 1; m < npat; ++m) {
      Allocation z0(n);
      for (std::size_t b = 0; b < nbrs.size(); ++b)
        if ((m >> b) & 1u) z0[nbrs[b]] = 1;
      // NIA locality: only (z_i, pattern) matter, so these two evaluations
      // pin down Gamma_i and Delta_i at this pattern
      double y00 = p.alpha[i];
      double y0m = evaluate(p, g, z0, i);
      Allocation z1 = z0;
      z1[i] = 1;
      double y1m = evaluate(p, g, z1, i);
      double gamma = y0m - y00;
      double delta = (y1m - (p.alpha[i] + p.beta[i])) - gamma;
      if (gamma != 0.0) out.gamma_pat[static_cast<std::size_t>(i)][m] = gamma;
      if (delta != 0.0) out.delta_pat[static_cast<std::size_t>(i)][m] = delta;
    }
  }
  return out;
}

ParamSet sample_params(ModelKind kind, const Graph& g, const SamplingSpec& spec, std::uint64_t seed) {
  if (spec.alpha_sd < 0 || spec.beta_sd < 0 || spec.gamma_sd < 0 || spec.delta_sd < 0)
    throw std::invalid_argument("sampling spec needs nonnegative standard deviations");
  const int n = g.size();
  ParamSet p;
  p.kind = kind;
  p.alpha.resize(n);
  p.beta.resize(n);
  for (int i = 0; i < n; ++i) {
    p.alpha[i] = spec.alpha_mean + spec.alpha_sd * keyed_normal(seed, 'a', static_cast<std::uint64_t>(i), 0);
    p.beta[i] = spec.beta_mean + spec.beta_sd * keyed_normal(seed, 'b', static_cast<std::uint64_t>(i), 0);
  }
  switch (kind) {
    case ModelKind::SUTVA: break;
    case ModelKind::NIA:
    case ModelKind::ANIA: {
      p.gamma_pat.assign(static_cast<std::size_t>(n), {});
      p.delta_pat.assign(static_cast<std::size_t>(n), {});
      for (int i = 0; i < n; ++i) {
        const int di = g.degree(i);
        if (di > 20) throw std::invalid_argument("pattern kinds need degree <= 20 for sampling");
        for (std::uint64_t m = 1; m < (std::uint64_t{1} << di); ++m) {
          double mu = spec.gamma_mean_coef * static_cast<double>(std::popcount(m));
          p.gamma_pat[static_cast<std::size_t>(i)][m] =
              mu + spec.gamma_sd * keyed_normal(seed, 'g', static_cast<std::uint64_t>(i), m);
          if (kind == ModelKind::NIA)
            p.delta_pat[static_cast<std::size_t>(i)][m] =
                spec.delta_mean_coef * static_cast<double>(std::popcount(m)) +
                spec.delta_sd * keyed_normal(seed, 'd', static_cast<std::uint64_t>(i), m);
        }
      }
      break;
    }
    case ModelKind::SNIA:
    case ModelKind::SANIA: {
      p.gamma_deg.assign(static_cast<std::size_t>(n), {});
      p.delta_deg.assign(static_cast<std::size_t>(n), {});
      for (int i = 0; i < n; ++i)
        for (int d = 1; d <= g.degree(i); ++d) {
          p.gamma_deg[static_cast<std::size_t>(i)][d] =
              spec.gamma_mean_coef * d +
              spec.gamma_sd * keyed_normal(seed, 'g', static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(d));
          if (kind == ModelKind::SNIA)
            p.delta_deg[static_cast<std::size_t>(i)][d] =
                spec.delta_mean_coef * d +
                spec.delta_sd * keyed_normal(seed, 'd', static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(d));
        }
      break;
    }
    case ModelKind::NAIA:
    case ModelKind::ANAIA: {
      for (int i = 0; i < n; ++i)
        for (int j : g.neighborhood(i)) {
          p.gamma_edge[{j, i}] = spec.gamma_mean_coef + spec.gamma_sd * keyed_normal(seed, 'g', static_cast<std::uint64_t>(j),
                                                                                     static_cast<std::uint64_t>(i));
          if (kind == ModelKind::NAIA)
            p.delta_edge[{j, i}] = spec.delta_mean_coef + spec.delta_sd * keyed_normal(seed, 'd', static_cast<std::uint64_t>(j),
                                                                                       static_cast<std::uint64_t>(i));
        }
      break;
    }
    case ModelKind::NASIA:
    case ModelKind::ANASIA: {
      p.gamma_sender.resize(n);
      p.delta_sender = Eigen::VectorXd::Zero(n);
      for (int j = 0; j < n; ++j) {
        p.gamma_sender[j] = spec.gamma_mean_coef + spec.gamma_sd * keyed_normal(seed, 'g', static_cast<std::uint64_t>(j), 1);
        if (kind == ModelKind::NASIA)
          p.delta_sender[j] = spec.delta_mean_coef + spec.delta_sd * keyed_normal(seed, 'd', static_cast<std::uint64_t>(j), 1);
      }
      break;
    }
    case ModelKind::SNAIA:
    case ModelKind::SANAIA: {
      p.gamma_slope.resize(n);
      p.delta_slope = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) {
        p.gamma_slope[i] = spec.gamma_mean_coef + spec.gamma_sd * keyed_normal(seed, 'g', static_cast<std::uint64_t>(i), 2);
        if (kind == ModelKind::SNAIA)
          p.delta_slope[i] = spec.delta_mean_coef + spec.delta_sd * keyed_normal(seed, 'd', static_cast<std::uint64_t>(i), 2);
      }
      break;
    }
    case ModelKind::SNASIA:
    case ModelKind::SANASIA: {
      p.h_component = component_labels(shared_neighbor_graph(g));
      int ncomp = 0;
      for (int c : p.h_component) ncomp = std::max(ncomp, c + 1);
      p.gamma_comp.resize(static_cast<std::size_t>(ncomp));
      p.delta_comp.assign(static_cast<std::size_t>(ncomp), 0.0);
      for (int c = 0; c < ncomp; ++c) {
        p.gamma_comp[static_cast<std::size_t>(c)] =
            spec.gamma_mean_coef + spec.gamma_sd * keyed_normal(seed, 'g', static_cast<std::uint64_t>(c), 3);
        if (kind == ModelKind::SNASIA)
          p.delta_comp[static_cast<std::size_t>(c)] =
              spec.delta_mean_coef + spec.delta_sd * keyed_normal(seed, 'd', static_cast<std::uint64_t>(c), 3);
      }
      break;
    }
  }
  return p;
}

void save_params(const ParamSet& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "kind " << model_kind_name(p.kind) << "\n";
  for (int i = 0; i < p.alpha.size(); ++i) out << "alpha " << i << " " << fmt(p.alpha[i]) << "\n";
  for (int i = 0; i < p.beta.size(); ++i) out << "beta " << i << " " << fmt(p.beta[i]) << "\n";
  for (std::size_t i = 0; i < p.gamma_deg.size(); ++i)
    for (auto [d, v] : p.gamma_deg[i]) out << "gamma_d " << i << " " << d << " " << fmt(v) << "\n";
  for (std::size_t i = 0; i < p.delta_deg.size(); ++i)
    for (auto [d, v] : p.delta_deg[i]) out << "delta_d " << i << " " << d << " " << fmt(v) << "\n";
  for (std::size_t i = 0; i < p.gamma_pat.size(); ++i)
    for (auto [m, v] : p.gamma_pat[i]) out << "gamma_pat " << i << " " << m << " " << fmt(v) << "\n";
  for (std::size_t i = 0; i < p.delta_pat.size(); ++i)
    for (auto [m, v] : p.delta_pat[i]) out << "delta_pat " << i << " " << m << " " << fmt(v) << "\n";
  for (auto& [e, v] : p.gamma_edge) out << "gamma_edge " << e.first << " " << e.second << " " << fmt(v) << "\n";
  for (auto& [e, v] : p.delta_edge) out << "delta_edge " << e.first << " " << e.second << " " << fmt(v) << "\n";
  for (int j = 0; j < p.gamma_sender.size(); ++j) out << "gamma_sender " << j << " " << fmt(p.gamma_sender[j]) << "\n";
  for (int j = 0; j < p.delta_sender.size(); ++j) out << "delta_sender " << j << " " << fmt(p.delta_sender[j]) << "\n";
  for (int i = 0; i < p.gamma_slope.size(); ++i) out << "gamma_slope " << i << " " << fmt(p.gamma_slope[i]) << "\n";
  for (int i = 0; i < p.delta_slope.size(); ++i) out << "delta_slope " << i << " " << fmt(p.delta_slope[i]) << "\n";
  for (std::size_t c = 0; c < p.gamma_comp.size(); ++c) out << "gamma_comp " << c << " " << fmt(p.gamma_comp[c]) << "\n";
  for (std::size_t c = 0; c < p.delta_comp.size(); ++c) out << "delta_comp " << c << " " << fmt(p.delta_comp[c]) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

ParamSet load_params(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open parameter file: " + path);
  const int n = g.size();
  ParamSet p;
  p.alpha = Eigen::VectorXd::Zero(n);
  p.beta = Eigen::VectorXd::Zero(n);
  std::string line;
  int lineno = 0;
  bool have_kind = false;
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
      p.kind = parse_model_kind(name);
      have_kind = true;
      // size the blocks the kind needs
      if (p.kind == ModelKind::NIA || p.kind == ModelKind::ANIA) {
        p.gamma_pat.assign(static_cast<std::size_t>(n), {});
        p.delta_pat.assign(static_cast<std::size_t>(n), {});
      }
      if (p.kind == ModelKind::SNIA || p.kind == ModelKind::SANIA) {
        p.gamma_deg.assign(static_cast<std::size_t>(n), {});
        p.delta_deg.assign(static_cast<std::size_t>(n), {});
      }
      if (p.kind == ModelKind::NASIA || p.kind == ModelKind::ANASIA) {
        p.gamma_sender = Eigen::VectorXd::Zero(n);
        p.delta_sender = Eigen::VectorXd::Zero(n);
      }
      if (p.kind == ModelKind::SNAIA || p.kind == ModelKind::SANAIA) {
        p.gamma_slope = Eigen::VectorXd::Zero(n);
        p.delta_slope = Eigen::VectorXd::Zero(n);
      }
      if (p.kind == ModelKind::SNASIA || p.kind == ModelKind::SANASIA) {
        p.h_component = component_labels(shared_neighbor_graph(g));
        int ncomp = 0;
        for (int c : p.h_component) ncomp = std::max(ncomp, c + 1);
        p.gamma_comp.assign(static_cast<std::size_t>(ncomp), 0.0);
        p.delta_comp.assign(static_cast<std::size_t>(ncomp), 0.0);
      }
      continue;
    }
    if (!have_kind) throw std::runtime_error(path + ": first entry must be 'kind <name>'");
    if (key == "alpha" || key == "beta" || key == "gamma_sender" || key == "delta_sender" ||
        key == "gamma_slope" || key == "delta_slope" || key == "gamma_comp" || key == "delta_comp") {
      int i;
      double v;
      is >> i >> v;
      if (!is) throw bad();
      if (key == "alpha") p.alpha[i] = v;
      else if (key == "beta") p.beta[i] = v;
      else if (key == "gamma_sender") p.gamma_sender[i] = v;
      else if (key == "delta_sender") p.delta_sender[i] = v;
      else if (key == "gamma_slope") p.gamma_slope[i] = v;
      else if (key == "delta_slope") p.delta_slope[i] = v;
      else if (key == "gamma_comp") p.gamma_comp.at(static_cast<std::size_t>(i)) = v;
      else p.delta_comp.at(static_cast<std::size_t>(i)) = v;
    } else if (key == "gamma_d" || key == "delta_d") {
      int i, d;
      double v;
      is >> i >> d >> v;
      if (!is) throw bad();
      auto& tbl = (key == "gamma_d") ? p.gamma_deg : p.delta_deg;
      tbl.at(static_cast<std::size_t>(i))[d] = v;
    } else if (key == "gamma_pat" || key == "delta_pat") {
      int i;
      std::uint64_t m;
      double v;
      is >> i >> m >> v;
      if (!is) throw bad();
      auto& tbl = (key == "gamma_pat") ? p.gamma_pat : p.delta_pat;
      tbl.at(static_cast<std::size_t>(i))[m] = v;
    } else if (key == "gamma_edge" || key == "delta_edge") {
      int j, i;
      double v;
      is >> j >> i >> v;
      if (!is) throw bad();
      auto& tbl = (key == "gamma_edge") ? p.gamma_edge : p.delta_edge;
      tbl[{j, i}] = v;
    } else {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown entry '" + key + "'");
    }
  }
  if (!have_kind) throw std::runtime_error(path + ": missing 'kind <name>'");
  return p;
}

}  // namespace mivnet
