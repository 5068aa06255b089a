#include "ringlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "ringlab/error.hpp"
#include "ringlab/linalg.hpp"

namespace ringlab {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kFlowSlack = 1e-11;

// Dinic max-flow with real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : graph_(n), level_(n), iter_(n) {}

  void add_edge(int from, int to, double cap) {
    graph_[from].push_back({to, cap, static_cast<int>(graph_[to].size())});
    graph_[to].push_back({from, 0.0, static_cast<int>(graph_[from].size()) - 1});
  }

  double run(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      while (true) {
        const double f = dfs(s, t, kInf);
        if (f <= kEps) break;
        flow += f;
      }
    }
    return flow;
  }

 private:
  static constexpr double kInf = 4.0;   // capacities never exceed total mass
  static constexpr double kEps = 1e-15;

  struct Edge {
    int to;
    double cap;
    int rev;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> queue;
    queue.push_back(s);
    level_[s] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int v = queue[qi];
      for (const Edge& e : graph_[v])
        if (e.cap > kEps && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          queue.push_back(e.to);
        }
    }
    return level_[t] >= 0;
  }

  double dfs(int v, int t, double f) {
    if (v == t) return f;
    for (int& i = iter_[v]; i < static_cast<int>(graph_[v].size()); ++i) {
      Edge& e = graph_[v][i];
      if (e.cap > kEps && level_[v] < level_[e.to]) {
        const double d = dfs(e.to, t, std::min(f, e.cap));
        if (d > kEps) {
          e.cap -= d;
          graph_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

// Sorted by location with duplicate locations merged; canonical form for
// the symmetric distance computation.
std::vector<WeightedAtom> consolidate(const std::vector<WeightedAtom>& in) {
  std::vector<WeightedAtom> atoms = in;
  std::sort(atoms.begin(), atoms.end(),
            [](const WeightedAtom& a, const WeightedAtom& b) {
              return std::tuple(a.location.real(), a.location.imag()) <
                     std::tuple(b.location.real(), b.location.imag());
            });
  std::vector<WeightedAtom> out;
  for (const auto& a : atoms) {
    if (!out.empty() && out.back().location == a.location)
      out.back().weight += a.weight;
    else
      out.push_back(a);
  }
  return out;
}

bool atoms_less(const std::vector<WeightedAtom>& a,
                const std::vector<WeightedAtom>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ka =
        std::tuple(a[i].location.real(), a[i].location.imag(), a[i].weight);
    const auto kb =
        std::tuple(b[i].location.real(), b[i].location.imag(), b[i].weight);
    if (ka != kb) return ka < kb;
  }
  return false;
}

// Mass that cannot be transported along pairs with |x - y| <= eps.
double transport_deficiency(const std::vector<WeightedAtom>& a,
                            const std::vector<WeightedAtom>& b,
                            const std::vector<double>& dist, double eps) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  const int source = 0, sink = n + m + 1;
  MaxFlow flow(n + m + 2);
  for (int i = 0; i < n; ++i) flow.add_edge(source, 1 + i, a[i].weight);
  for (int j = 0; j < m; ++j) flow.add_edge(1 + n + j, sink, b[j].weight);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (dist[i * m + j] <= eps) flow.add_edge(1 + i, 1 + n + j, 2.0);
  return std::max(0.0, 1.0 - flow.run(source, sink));
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(std::vector<WeightedAtom> atoms)
    : atoms_(std::move(atoms)) {
  if (atoms_.empty())
    throw std::invalid_argument("measure needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.location.real()) || !std::isfinite(a.location.imag()))
      throw std::invalid_argument("measure atom at non-finite location");
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw std::invalid_argument("measure atom weights must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightTol)
    throw std::invalid_argument("measure weights must sum to 1 (got " +
                                std::to_string(total) + ")");
}

EmpiricalMeasure EmpiricalMeasure::uniform(const std::vector<cplx>& points) {
  if (points.empty())
    throw std::invalid_argument("measure needs at least one atom");
  std::vector<WeightedAtom> atoms(points.size());
  const double w = 1.0 / static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) atoms[i] = {points[i], w};
  return EmpiricalMeasure(std::move(atoms));
}

EmpiricalMeasure EmpiricalMeasure::uniform_real(
    const std::vector<double>& points) {
  std::vector<cplx> z(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) z[i] = {points[i], 0.0};
  return uniform(z);
}

EmpiricalMeasure empirical_eigenvalues(const Matrix& a,
                                       const std::string& context) {
  return EmpiricalMeasure::uniform(eigenvalues(a, context));
}

EmpiricalMeasure empirical_singulars(const Matrix& a,
                                     const std::string& context) {
  return EmpiricalMeasure::uniform_real(singular_values(a, context));
}

double levy_prokhorov(const EmpiricalMeasure& alpha,
                      const EmpiricalMeasure& beta, double tol,
                      std::size_t pair_cap) {
  if (!(tol > 0.0)) throw std::invalid_argument("levy_prokhorov: tol > 0");
  if (alpha.size() * beta.size() > pair_cap)
    throw std::length_error(
        "levy_prokhorov: atom count product " +
        std::to_string(alpha.size() * beta.size()) + " exceeds cap " +
        std::to_string(pair_cap) + "; subsample the measures");

  std::vector<WeightedAtom> a = consolidate(alpha.atoms());
  std::vector<WeightedAtom> b = consolidate(beta.atoms());
  if (atoms_less(b, a)) std::swap(a, b);  // exact symmetry in the arguments

  const std::size_t n = a.size(), m = b.size();
  std::vector<double> dist(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      dist[i * m + j] = std::abs(a[i].location - b[j].location);

  const auto feasible = [&](double eps) {
    return transport_deficiency(a, b, dist, eps) <= eps + kFlowSlack;
  };

  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;  // the LP distance never exceeds 1
  while (hi - lo > 0.5 * tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

RingRadii ring_radii(const EmpiricalMeasure& mu) {
  double m2 = 0.0, inv_m2 = 0.0;
  for (const auto& a : mu.atoms()) {
    const double x2 = std::norm(a.location);
    if (x2 == 0.0)
      throw std::domain_error("ring radii: measure has an atom at 0");
    m2 += a.weight * x2;
    inv_m2 += a.weight / x2;
  }
  return {1.0 / std::sqrt(inv_m2), std::sqrt(m2)};
}

double annulus_coverage(const EmpiricalMeasure& measure, RingRadii radii,
                        double delta) {
  if (delta < 0.0) throw std::invalid_argument("annulus coverage: delta >= 0");
  const double lo = radii.r_minus - delta;
  const double hi = radii.r_plus + delta;
  double covered = 0.0;
  for (const auto& a : measure.atoms()) {
    const double r = std::abs(a.location);
    if (r >= lo && r <= hi) covered += a.weight;
  }
  return covered;
}

std::string measure_to_json(const EmpiricalMeasure& m) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : m.atoms())
    atoms.push_back({a.location.real(), a.location.imag(), a.weight});
  return nlohmann::json{{"atoms", atoms}}.dump();
}

EmpiricalMeasure measure_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("measure JSON: ") + e.what());
  }
  if (!j.contains("atoms") || !j["atoms"].is_array())
    throw config_error("measure JSON: missing 'atoms' array");
  std::vector<WeightedAtom> atoms;
  for (const auto& entry : j["atoms"]) {
    if (!entry.is_array() || entry.size() != 3)
      throw config_error("measure JSON: atoms are [re, im, weight] triples");
    atoms.push_back({cplx{entry[0].get<double>(), entry[1].get<double>()},
                     entry[2].get<double>()});
  }
  try {
    return EmpiricalMeasure(std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("measure JSON: ") + e.what());
  }
}

}  // namespace ringlab
