#include "manin/picard.hpp"

#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "manin/detail/numeric.hpp"

namespace manin {

SVector svector_from_string(const std::string& csv) {
  SVector out;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    std::string t;
    for (char ch : token)
      if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw std::invalid_argument("empty component in class string");
    mpq_class v;
    try {
      v = mpq_class(t);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("cannot parse rational component: " + t);
    }
    if (v.get_den() == 0) throw std::invalid_argument("zero denominator in: " + t);
    v.canonicalize();
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty class string");
  return out;
}

std::string svector_to_string(const SVector& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += s[i].get_str();
  }
  return out;
}

std::vector<double> svector_to_doubles(const SVector& s) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& v : s) out.push_back(static_cast<double>(detail::mpq_to_ld(v)));
  return out;
}

std::vector<long double> svector_to_ld(const SVector& s) {
  std::vector<long double> out;
  out.reserve(s.size());
  for (const auto& v : s) out.push_back(detail::mpq_to_ld(v));
  return out;
}

SVector svector_scale(const SVector& s, const mpq_class& c) {
  SVector out = s;
  for (auto& v : out) {
    v *= c;
    v.canonicalize();
  }
  return out;
}

SVector anticanonical(const RootDatum& datum) {
  SVector out;
  out.reserve(static_cast<size_t>(datum.rank));
  for (int i = 0; i < datum.rank; ++i) out.emplace_back(datum.kappa(i) + 1);
  return out;
}

bool is_effective_interior(const RootDatum& datum, const SVector& L) {
  if (static_cast<int>(L.size()) != datum.rank)
    throw std::invalid_argument("class size must equal the rank");
  for (const auto& v : L)
    if (v <= 0) return false;
  return true;
}

PoleData manin_invariants(const RootDatum& datum, const SVector& L) {
  if (!is_effective_interior(datum, L))
    throw std::domain_error("class must lie in the interior of the effective cone");
  PoleData pd;
  for (int i = 0; i < datum.rank; ++i) {
    mpq_class ratio(datum.kappa(i) + 1);
    ratio /= L[static_cast<size_t>(i)];
    ratio.canonicalize();
    if (i == 0 || ratio > pd.sigma) {
      pd.sigma = ratio;
      pd.argmax = (1u << i);
    } else if (ratio == pd.sigma) {
      pd.argmax |= (1u << i);
    }
  }
  pd.multiplicity = subset_size(pd.argmax);
  return pd;
}

int character_count_pgl(int n, const SVector& L) {
  if (n < 2 || n > 6) throw std::invalid_argument("character count supports 2 <= n <= 6");
  if (static_cast<int>(L.size()) != n - 1)
    throw std::invalid_argument("class size must equal n-1");
  for (const auto& v : L)
    if (v.get_den() != 1 || v <= 0)
      throw std::invalid_argument("character count requires positive integer coordinates");

  mpq_class best(0);
  int idx_gcd = 0;
  for (int i = 1; i <= n - 1; ++i) {
    mpq_class ratio(i * (n - i) + 1);
    ratio /= L[static_cast<size_t>(i - 1)];
    ratio.canonicalize();
    if (ratio > best) {
      best = ratio;
      idx_gcd = i;
    } else if (ratio == best) {
      idx_gcd = std::gcd(idx_gcd, i);
    }
  }
  return std::gcd(n, idx_gcd);
}

}  // namespace manin
