#include "mivnet/design.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mivnet/rng.hpp"

namespace mivnet {

namespace {
constexpr double kPmfTol = 1e-12;
}

Design Design::from_support(std::vector<Allocation> support, std::vector<double> pmf) {
  if (support.empty()) throw std::invalid_argument("design support must be nonempty");
  if (support.size() != pmf.size()) throw std::invalid_argument("support/pmf size mismatch");
  const int n = support.front().size();
  if (n < 1) throw std::invalid_argument("allocations must have length >= 1");

  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });

  Design d;
  d.n_ = n;
  d.support_.reserve(support.size());
  d.pmf_.reserve(pmf.size());
  double total = 0.0;
  for (std::size_t idx : order) {
    const Allocation& z = support[idx];
    if (z.size() != n) throw std::invalid_argument("allocations of mixed length in support");
    if (!d.support_.empty() && d.support_.back() == z)
      throw std::invalid_argument("duplicate allocation in support: " + z.to_string());
    if (!(pmf[idx] > 0.0)) throw std::invalid_argument("pmf must be strictly positive on support");
    d.support_.push_back(z);
    d.pmf_.push_back(pmf[idx]);
    total += pmf[idx];
  }
  if (std::abs(total - 1.0) > kPmfTol)
    throw std::invalid_argument("pmf must sum to 1 (got " + std::to_string(total) + ")");
  return d;
}

std::optional<int> Design::index_of(const Allocation& z) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), z);
  if (it != support_.end() && *it == z) return static_cast<int>(it - support_.begin());
  return std::nullopt;
}

bool Design::contains_trivial() const {
  for (const auto& z : support_)
    if (z.trivial()) return true;
  return false;
}

double Design::marginal(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("unit index out of range");
  double p = 0.0;
  for (int k = 0; k < size(); ++k)
    if (support_[static_cast<std::size_t>(k)][i]) p += pmf_[static_cast<std::size_t>(k)];
  return p;
}

namespace {

Allocation allocation_from_code(int n, std::uint64_t code) {
  Allocation z(n);
  for (int i = 0; i < n; ++i) z[i] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1u);
  return z;
}

}  // namespace

Design bernoulli_design(int n, double q, bool exclude_trivial, std::int64_t cap, std::uint64_t seed,
                        SubsampleWeighting weighting) {
  if (n < 1) throw std::invalid_argument("bernoulli_design needs n >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("treatment probability must be in (0,1)");
  if (cap < 2) throw std::invalid_argument("support cap must be >= 2");

  const int excl = exclude_trivial ? 2 : 0;
  const bool full_cube = n < 62 && ((std::int64_t{1} << n) - excl) <= cap;

  std::vector<Allocation> support;
  std::vector<double> pmf;
  if (full_cube) {
    const std::uint64_t total = std::uint64_t{1} << n;
    const double logq = std::log(q), log1q = std::log1p(-q);
    for (std::uint64_t code = 0; code < total; ++code) {
      Allocation z = allocation_from_code(n, code);
      if (exclude_trivial && z.trivial()) continue;
      int k = z.treated_count();
      support.push_back(std::move(z));
      pmf.push_back(std::exp(k * logq + (n - k) * log1q));
    }
  } else {
    // sample `cap` distinct allocations uniformly from the non-trivial cube
    Rng rng(derive_seed(seed, 0x4245ULL));  // 'BE'
    std::set<Allocation> seen;
    while (static_cast<std::int64_t>(seen.size()) < cap) {
      Allocation z(n);
      for (int i = 0; i < n; ++i) z[i] = static_cast<std::uint8_t>(rng.next_u64() & 1u);
      if (z.trivial()) continue;
      seen.insert(std::move(z));
    }
    const double logq = std::log(q), log1q = std::log1p(-q);
    for (const auto& z : seen) {
      support.push_back(z);
      pmf.push_back(weighting == SubsampleWeighting::uniform
                        ? 1.0
                        : std::exp(z.treated_count() * logq + (n - z.treated_count()) * log1q));
    }
  }
  double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (auto& p : pmf) p /= total;
  return Design::from_support(std::move(support), std::move(pmf));
}

namespace {

void enumerate_combinations(int n, int k, std::vector<Allocation>& out) {
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    Allocation z(n);
    for (int i : pick) z[i] = 1;
    out.push_back(std::move(z));
    int i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace

Design crd_design(int n, int k) {
  if (n < 1) throw std::invalid_argument("crd_design needs n >= 1");
  if (k < 0 || k > n) throw std::invalid_argument("treated count k must satisfy 0 <= k <= n");
  std::vector<Allocation> support;
  if (k == 0) {
    support.push_back(Allocation::zeros(n));
  } else if (k == n) {
    support.push_back(Allocation::ones(n));
  } else {
    enumerate_combinations(n, k, support);
  }
  std::vector<double> pmf(support.size(), 1.0 / static_cast<double>(support.size()));
  return Design::from_support(std::move(support), std::move(pmf));
}

Design mixture(std::span<const Design> designs, std::span<const double> weights) {
  if (designs.empty() || designs.size() != weights.size())
    throw std::invalid_argument("mixture needs matching, nonempty designs and weights");
  const int n = designs.front().n();
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("mixture weights must be nonnegative");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > kPmfTol) throw std::invalid_argument("mixture weights must sum to 1");

  std::map<Allocation, double> acc;
  for (std::size_t m = 0; m < designs.size(); ++m) {
    const Design& d = designs[m];
    if (d.n() != n) throw std::invalid_argument("mixture components must share n");
    if (weights[m] == 0.0) continue;
    for (int k = 0; k < d.size(); ++k) acc[d.allocation(k)] += weights[m] * d.prob(k);
  }
  std::vector<Allocation> support;
  std::vector<double> pmf;
  for (auto& [z, p] : acc) {
    support.push_back(z);
    pmf.push_back(p);
  }
  return Design::from_support(std::move(support), std::move(pmf));
}

Design coloring_design(const Coloring& coloring, int n) {
  std::vector<Allocation> support;
  support.push_back(Allocation::zeros(n));
  for (const auto& cls : coloring.classes) {
    Allocation z(n);
    for (int i : cls) {
      if (i < 0 || i >= n) throw std::invalid_argument("coloring class index out of range");
      z[i] = 1;
    }
    support.push_back(std::move(z));
  }
  std::vector<double> pmf(support.size(), 1.0 / static_cast<double>(support.size()));
  return Design::from_support(std::move(support), std::move(pmf));
}

Design orbit_design_ring(int n, const Allocation& base) {
  if (base.size() != n) throw std::invalid_argument("base allocation length must equal n");
  std::set<Allocation> orbit;
  for (int r = 0; r < n; ++r) {
    Allocation z(n);
    for (int i = 0; i < n; ++i) z[i] = base[(i + r) % n];
    orbit.insert(std::move(z));
  }
  std::vector<Allocation> support(orbit.begin(), orbit.end());
  std::vector<double> pmf(support.size(), 1.0 / static_cast<double>(support.size()));
  return Design::from_support(std::move(support), std::move(pmf));
}

double joint_propensity(const Design& d, const Graph& g, int i, int z_val, int deg_val) {
  if (g.size() != d.n()) throw std::invalid_argument("graph/design dimension mismatch");
  if (i < 0 || i >= d.n()) throw std::out_of_range("unit index out of range");
  double p = 0.0;
  for (int k = 0; k < d.size(); ++k) {
    const Allocation& z = d.allocation(k);
    if (z[i] == z_val && g.treated_degree(z, i) == deg_val) p += d.prob(k);
  }
  return p;
}

void save_design(const Design& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (int k = 0; k < d.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", d.prob(k));
    out << d.allocation(k).to_string() << " " << buf << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Design load_design(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open design file: " + path);
  std::vector<Allocation> support;
  std::vector<double> pmf;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string bits;
    double p;
    is >> bits >> p;
    if (!is) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected '<bitstring> <prob>'");
    support.push_back(Allocation::from_string(bits));
    pmf.push_back(p);
  }
  return Design::from_support(std::move(support), std::move(pmf));
}

}  // namespace mivnet
