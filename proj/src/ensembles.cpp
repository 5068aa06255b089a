#include "ringlab/ensembles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "ringlab/error.hpp"
#include "ringlab/linalg.hpp"

namespace ringlab {

namespace {

void require_support_point(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw config_error(std::string(what) +
                       ": support points must be finite and > 0");
}

double parse_number(const std::string& token, const char* what) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw config_error(std::string(what) + ": malformed number '" + token +
                       "'");
  return value;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_number(double v) {
  std::string s = std::to_string(v);
  // trim trailing zeros but keep one decimal
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.')
    s.pop_back();
  return s;
}

}  // namespace

SpectralLaw SpectralLaw::two_atom(double a, double b, double p) {
  require_support_point(a, "two-atom law");
  require_support_point(b, "two-atom law");
  if (a == b)
    throw config_error("two-atom law: support must contain more than one point");
  if (!(p > 0.0) || !(p < 1.0))
    throw config_error("two-atom law: p must lie in (0, 1)");
  SpectralLaw law;
  law.kind_ = Kind::TwoAtom;
  law.lo_ = std::min(a, b);
  law.hi_ = std::max(a, b);
  law.p_ = (a < b) ? p : 1.0 - p;  // mass at the smaller point
  return law;
}

SpectralLaw SpectralLaw::uniform_interval(double a, double b) {
  require_support_point(a, "uniform law");
  require_support_point(b, "uniform law");
  if (!(a < b))
    throw config_error("uniform law: need a < b");
  SpectralLaw law;
  law.kind_ = Kind::UniformInterval;
  law.lo_ = a;
  law.hi_ = b;
  return law;
}

SpectralLaw SpectralLaw::finite_atoms(
    std::vector<std::pair<double, double>> atom_weights) {
  if (atom_weights.empty())
    throw config_error("atoms law: needs at least one atom");
  double total = 0.0;
  for (auto& [x, w] : atom_weights) {
    require_support_point(x, "atoms law");
    if (!(w > 0.0) || !std::isfinite(w))
      throw config_error("atoms law: weights must be positive");
    total += w;
  }
  std::sort(atom_weights.begin(), atom_weights.end());
  // merge duplicates, normalize
  std::vector<std::pair<double, double>> merged;
  for (const auto& [x, w] : atom_weights) {
    if (!merged.empty() && merged.back().first == x)
      merged.back().second += w / total;
    else
      merged.emplace_back(x, w / total);
  }
  if (merged.size() < 2)
    throw config_error("atoms law: support must contain more than one point");
  SpectralLaw law;
  law.kind_ = Kind::FiniteAtoms;
  law.atoms_ = std::move(merged);
  law.lo_ = law.atoms_.front().first;
  law.hi_ = law.atoms_.back().first;
  return law;
}

SpectralLaw SpectralLaw::parse(const std::string& literal) {
  const std::size_t colon = literal.find(':');
  if (colon == std::string::npos)
    throw config_error("law literal '" + literal +
                       "': expected kind:parameters");
  const std::string kind = literal.substr(0, colon);
  const std::string params = literal.substr(colon + 1);
  if (kind == "two-atom") {
    const auto parts = split(params, ',');
    if (parts.size() != 2 && parts.size() != 3)
      throw config_error("law literal: two-atom:a,b[,p]");
    const double a = parse_number(parts[0], "two-atom law");
    const double b = parse_number(parts[1], "two-atom law");
    const double p =
        parts.size() == 3 ? parse_number(parts[2], "two-atom law") : 0.5;
    return two_atom(a, b, p);
  }
  if (kind == "uniform") {
    const auto parts = split(params, ',');
    if (parts.size() != 2) throw config_error("law literal: uniform:a,b");
    return uniform_interval(parse_number(parts[0], "uniform law"),
                            parse_number(parts[1], "uniform law"));
  }
  if (kind == "atoms") {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& piece : split(params, ',')) {
      const auto kv = split(piece, ':');
      if (kv.size() != 2)
        throw config_error("law literal: atoms:x1:w1,x2:w2,...");
      atoms.emplace_back(parse_number(kv[0], "atoms law"),
                         parse_number(kv[1], "atoms law"));
    }
    return finite_atoms(std::move(atoms));
  }
  throw config_error("unknown law kind '" + kind +
                     "' (expected two-atom, uniform, atoms)");
}

std::string SpectralLaw::literal() const {
  switch (kind_) {
    case Kind::TwoAtom:
      return "two-atom:" + format_number(lo_) + "," + format_number(hi_) +
             "," + format_number(p_);
    case Kind::UniformInterval:
      return "uniform:" + format_number(lo_) + "," + format_number(hi_);
    case Kind::FiniteAtoms: {
      std::string out = "atoms:";
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) out += ",";
        out += format_number(atoms_[i].first) + ":" +
               format_number(atoms_[i].second);
      }
      return out;
    }
  }
  return {};
}

double SpectralLaw::quantile(double q) const {
  q = std::clamp(q, 0.0, 1.0);
  switch (kind_) {
    case Kind::TwoAtom:
      return q <= p_ ? lo_ : hi_;
    case Kind::UniformInterval:
      return lo_ + q * (hi_ - lo_);
    case Kind::FiniteAtoms: {
      double cum = 0.0;
      for (const auto& [x, w] : atoms_) {
        cum += w;
        if (q <= cum + 1e-15) return x;
      }
      return atoms_.back().first;
    }
  }
  return lo_;
}

double SpectralLaw::second_moment() const {
  switch (kind_) {
    case Kind::TwoAtom:
      return p_ * lo_ * lo_ + (1.0 - p_) * hi_ * hi_;
    case Kind::UniformInterval:
      return (hi_ * hi_ * hi_ - lo_ * lo_ * lo_) / (3.0 * (hi_ - lo_));
    case Kind::FiniteAtoms: {
      double m = 0.0;
      for (const auto& [x, w] : atoms_) m += w * x * x;
      return m;
    }
  }
  return 0.0;
}

double SpectralLaw::inverse_second_moment() const {
  switch (kind_) {
    case Kind::TwoAtom:
      return p_ / (lo_ * lo_) + (1.0 - p_) / (hi_ * hi_);
    case Kind::UniformInterval:
      // integral of x^-2 / (b - a) over [a, b] = 1/(ab)
      return 1.0 / (lo_ * hi_);
    case Kind::FiniteAtoms: {
      double m = 0.0;
      for (const auto& [x, w] : atoms_) m += w / (x * x);
      return m;
    }
  }
  return 0.0;
}

double SpectralLaw::support_min() const { return lo_; }
double SpectralLaw::support_max() const { return hi_; }

double SpectralLaw::bound_C() const {
  return std::max(hi_, 1.0 / lo_);
}

EmpiricalMeasure SpectralLaw::discretize(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("discretize: n >= 1");
  std::vector<double> points(n);
  for (std::size_t i = 0; i < n; ++i)
    points[i] =
        quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return EmpiricalMeasure::uniform_real(points);
}

RingRadii ring_radii(const SpectralLaw& law) {
  return {1.0 / std::sqrt(law.inverse_second_moment()),
          std::sqrt(law.second_moment())};
}

Matrix quantile_matrix(const SpectralLaw& law, std::size_t d) {
  if (d < 2) throw std::invalid_argument("quantile matrix: d >= 2");
  std::vector<double> diag(d);
  for (std::size_t i = 0; i < d; ++i)
    diag[i] =
        law.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(d));
  return Matrix::diagonal(diag);
}

Matrix iid_matrix(const SpectralLaw& law, std::size_t d, RandomStream& rng) {
  if (d < 2) throw std::invalid_argument("iid matrix: d >= 2");
  std::vector<double> diag(d);
  for (auto& x : diag) x = law.quantile(rng.uniform01());
  std::sort(diag.begin(), diag.end());
  return Matrix::diagonal(diag);
}

Matrix iid_matrix(const SpectralLaw& law, std::size_t d, SeedSpec seed) {
  RandomStream rng(seed);
  return iid_matrix(law, d, rng);
}

Matrix rotate_ensemble(const Matrix& a, RotationSpec rotation,
                       RandomStream& rng) {
  if (!rotation.two_sided) return a;
  const Matrix w = sample_haar(rotation.group, a.dim(), rng);
  const Matrix v = sample_haar(rotation.group, a.dim(), rng);
  return matmul(w, matmul(a, v));
}

Matrix rotate_ensemble(const Matrix& a, RotationSpec rotation, SeedSpec seed) {
  RandomStream rng(seed);
  return rotate_ensemble(a, rotation, rng);
}

ConditionCheck condition_check(const Matrix& a, double C) {
  if (!(C > 1.0)) throw std::invalid_argument("condition check: C > 1");
  const auto sv = singular_values(a);
  ConditionCheck result;
  result.sigma_max = sv.front();
  result.sigma_min = sv.back();
  if (result.sigma_min <= 0.0) {
    result.ok = false;
    result.diagnostic = "matrix is singular (sigma_min = 0)";
    return result;
  }
  result.ok = result.sigma_min >= 1.0 / C && result.sigma_max <= C;
  if (!result.ok)
    result.diagnostic = "singular values [" + std::to_string(result.sigma_min) +
                        ", " + std::to_string(result.sigma_max) +
                        "] violate [1/C, C] with C = " + std::to_string(C);
  return result;
}

}  // namespace ringlab
