#include "mivnet/estimators.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mivnet {

WeightScheme naive_weights(const Design& d) {
  const int n = d.n();
  WeightScheme ws;
  ws.w.resize(d.size(), n);
  for (int k = 0; k < d.size(); ++k) {
    const Allocation& z = d.allocation(k);
    const int t = z.treated_count();
    if (t == 0 || t == n)
      throw std::invalid_argument("naive weights undefined: trivial allocation " + z.to_string() +
                                  " in support");
    const double wt = 1.0 / t, wc = 1.0 / (n - t);
    for (int i = 0; i < n; ++i) ws.w(k, i) = z[i] ? wt : -wc;
  }
  return ws;
}

WeightScheme ht_weights(const Design& d) {
  const int n = d.n();
  Eigen::VectorXd pi(n);
  for (int i = 0; i < n; ++i) {
    pi[i] = d.marginal(i);
    if (!(pi[i] > 0.0) || !(pi[i] < 1.0))
      throw std::invalid_argument("Horvitz-Thompson weights undefined: unit " + std::to_string(i) +
                                  " has a zero-probability arm");
  }
  WeightScheme ws;
  ws.w.resize(d.size(), n);
  for (int k = 0; k < d.size(); ++k) {
    const Allocation& z = d.allocation(k);
    for (int i = 0; i < n; ++i)
      ws.w(k, i) = z[i] ? 1.0 / (n * pi[i]) : -1.0 / (n * (1.0 - pi[i]));
  }
  return ws;
}

WeightScheme stratified_naive_weights(const Graph& g, const Design& d, UnbalancedPolicy policy) {
  if (g.size() != d.n()) throw std::invalid_argument("graph/design dimension mismatch");
  const int n = d.n();
  WeightScheme ws;
  ws.w.resize(d.size(), n);
  std::vector<int> count[2];
  for (int k = 0; k < d.size(); ++k) {
    const Allocation& z = d.allocation(k);
    const std::vector<int> deg = g.treated_degrees(z);
    const int dmax = *std::max_element(deg.begin(), deg.end());
    count[0].assign(static_cast<std::size_t>(dmax) + 1, 0);
    count[1].assign(static_cast<std::size_t>(dmax) + 1, 0);
    for (int i = 0; i < n; ++i) ++count[z[i]][static_cast<std::size_t>(deg[static_cast<std::size_t>(i)])];
    std::vector<double> c(static_cast<std::size_t>(dmax) + 1, 0.0);
    double total = 0.0;
    for (int dd = 0; dd <= dmax; ++dd) {
      const int n0 = count[0][static_cast<std::size_t>(dd)], n1 = count[1][static_cast<std::size_t>(dd)];
      if (n0 > 0 && n1 > 0) c[static_cast<std::size_t>(dd)] = 1.0 / (1.0 / n0 + 1.0 / n1);
      total += c[static_cast<std::size_t>(dd)];
    }
    if (!(total > 0.0)) {
      if (policy == UnbalancedPolicy::error)
        throw std::invalid_argument("stratified naive weights undefined: allocation " + z.to_string() +
                                    " has no degree stratum with both arms");
      ws.w.row(k).setZero();
      continue;
    }
    for (int i = 0; i < n; ++i) {
      const int dd = deg[static_cast<std::size_t>(i)];
      const double cd = c[static_cast<std::size_t>(dd)];
      if (cd == 0.0) {
        ws.w(k, i) = 0.0;
      } else {
        const int size = count[z[i]][static_cast<std::size_t>(dd)];
        ws.w(k, i) = (cd / total) * (z[i] ? 1.0 : -1.0) / size;
      }
    }
  }
  return ws;
}

void save_weights(const WeightScheme& ws, const Design& d, const std::string& path,
                  const std::map<std::string, std::string>& metadata) {
  if (ws.w.rows() != d.size() || ws.w.cols() != d.n())
    throw std::invalid_argument("weight scheme not aligned with design support");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& [k, v] : metadata) out << "# " << k << " " << v << "\n";
  char buf[64];
  for (int k = 0; k < d.size(); ++k) {
    out << d.allocation(k).to_string();
    for (int i = 0; i < d.n(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", ws.w(k, i));
      out << " " << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

LoadedWeights load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weights file: " + path);
  LoadedWeights lw;
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0, n = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string key;
      is >> key;
      std::string rest;
      std::getline(is, rest);
      if (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
      if (!key.empty()) lw.metadata[key] = rest;
      continue;
    }
    std::istringstream is(line);
    std::string bits;
    is >> bits;
    Allocation z = Allocation::from_string(bits);
    if (n < 0) n = z.size();
    if (z.size() != n) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": inconsistent allocation length");
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) is >> w[static_cast<std::size_t>(i)];
    if (!is) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(n) + " weights");
    lw.support.push_back(std::move(z));
    rows.push_back(std::move(w));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no weight rows");
  lw.w.resize(static_cast<int>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int i = 0; i < n; ++i) lw.w(static_cast<int>(r), i) = rows[r][static_cast<std::size_t>(i)];
  return lw;
}

WeightScheme align_weights(const LoadedWeights& lw, const Design& d) {
  if (static_cast<int>(lw.support.size()) != d.size() || lw.w.cols() != d.n())
    throw std::invalid_argument("weights file does not match design support");
  WeightScheme ws;
  ws.w.resize(d.size(), d.n());
  for (std::size_t r = 0; r < lw.support.size(); ++r) {
    auto idx = d.index_of(lw.support[r]);
    if (!idx) throw std::invalid_argument("weights allocation not in design support: " + lw.support[r].to_string());
    ws.w.row(*idx) = lw.w.row(static_cast<int>(r));
  }
  return ws;
}

}  // namespace mivnet
