#include "manin/rootsys.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace manin {

namespace {

std::vector<int> flatten(const Eigen::MatrixXi& m) {
  std::vector<int> v(static_cast<size_t>(m.size()));
  size_t k = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) v[k++] = m(i, j);
  return v;
}

bool is_nonpositive(const Eigen::VectorXi& v) { return (v.array() <= 0).all(); }

// l(w) = number of positive roots mapped to negative roots.  Images of roots
// are roots, so "negative" = all coordinates <= 0.
int weyl_length(const Eigen::MatrixXi& mat, const std::vector<Eigen::VectorXi>& pos) {
  int len = 0;
  for (const auto& beta : pos)
    if (is_nonpositive(mat * beta)) ++len;
  return len;
}

void validate_cartan(const Eigen::MatrixXi& c) {
  if (c.rows() != c.cols() || c.rows() < 1)
    throw std::invalid_argument("Cartan matrix must be square and nonempty");
  if (c.rows() > 5) throw std::invalid_argument("rank > 5 is not supported");
  for (int i = 0; i < c.rows(); ++i) {
    if (c(i, i) != 2) throw std::invalid_argument("Cartan diagonal entries must equal 2");
    for (int j = 0; j < c.cols(); ++j)
      if (i != j && c(i, j) > 0)
        throw std::invalid_argument("Cartan off-diagonal entries must be <= 0");
  }
}

struct VecLess {
  bool operator()(const Eigen::VectorXi& a, const Eigen::VectorXi& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  }
};

}  // namespace

Eigen::MatrixXi simple_reflection_matrix(const Eigen::MatrixXi& cartan, int i) {
  const int r = static_cast<int>(cartan.rows());
  if (i < 0 || i >= r) throw std::out_of_range("simple reflection index out of range");
  Eigen::MatrixXi s = Eigen::MatrixXi::Identity(r, r);
  s.row(i) -= cartan.row(i);
  return s;
}

std::vector<Eigen::VectorXi> positive_roots_from_cartan(const Eigen::MatrixXi& cartan) {
  validate_cartan(cartan);
  const int r = static_cast<int>(cartan.rows());
  std::vector<Eigen::MatrixXi> refl;
  refl.reserve(r);
  for (int i = 0; i < r; ++i) refl.push_back(simple_reflection_matrix(cartan, i));

  std::set<Eigen::VectorXi, VecLess> roots;
  for (int i = 0; i < r; ++i) {
    Eigen::VectorXi e = Eigen::VectorXi::Zero(r);
    e(i) = 1;
    roots.insert(e);
  }

  const int max_sweeps = 4 * r * r;
  int sweeps = 0;
  for (bool changed = true; changed;) {
    if (++sweeps > max_sweeps)
      throw std::runtime_error("positive-root closure did not stabilize (not finite type)");
    changed = false;
    std::vector<Eigen::VectorXi> snapshot(roots.begin(), roots.end());
    for (const auto& beta : snapshot) {
      for (const auto& s : refl) {
        Eigen::VectorXi img = s * beta;
        if (is_nonnegative(img) && img.any() && roots.insert(img).second) changed = true;
      }
    }
  }

  // Deterministic order: height ascending, then reverse-lexicographic, which
  // lists the simple roots first in index order.
  std::vector<Eigen::VectorXi> out(roots.begin(), roots.end());
  std::sort(out.begin(), out.end(), [](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
    int ha = a.sum(), hb = b.sum();
    if (ha != hb) return ha < hb;
    return std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(),
                                        a.data() + a.size());
  });
  return out;
}

RootDatum build_from_cartan(const std::string& label, const Eigen::MatrixXi& cartan) {
  RootDatum d;
  d.label = label;
  d.n_pgl = 0;
  d.rank = static_cast<int>(cartan.rows());
  d.cartan = cartan;
  d.positive_roots = positive_roots_from_cartan(cartan);

  std::vector<Eigen::MatrixXi> refl;
  for (int i = 0; i < d.rank; ++i) refl.push_back(simple_reflection_matrix(cartan, i));

  std::vector<Eigen::MatrixXi> elems;
  std::map<std::vector<int>, int> seen;
  Eigen::MatrixXi id = Eigen::MatrixXi::Identity(d.rank, d.rank);
  elems.push_back(id);
  seen.emplace(flatten(id), 0);
  for (size_t head = 0; head < elems.size(); ++head) {
    const Eigen::MatrixXi m = elems[head];  // copy: elems may grow
    for (const auto& s : refl) {
      Eigen::MatrixXi nm = m * s;
      auto key = flatten(nm);
      if (seen.emplace(std::move(key), static_cast<int>(elems.size())).second)
        elems.push_back(nm);
    }
    if (elems.size() > 100000)
      throw std::runtime_error("Weyl enumeration exceeded safety bound");
  }

  d.weyl.reserve(elems.size());
  for (const auto& m : elems) d.weyl.push_back({m, weyl_length(m, d.positive_roots)});
  std::sort(d.weyl.begin(), d.weyl.end(), [](const WeylElement& a, const WeylElement& b) {
    if (a.length != b.length) return a.length < b.length;
    return flatten(a.mat) < flatten(b.mat);
  });

  d.kappa = Eigen::VectorXi::Zero(d.rank);
  for (const auto& beta : d.positive_roots) d.kappa += beta;
  d.rho2 = d.kappa;
  return d;
}

RootDatum build_pgl(int n) {
  if (n < 2 || n > 6) throw std::invalid_argument("build_pgl supports 2 <= n <= 6");
  const int r = n - 1;
  Eigen::MatrixXi c = Eigen::MatrixXi::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    c(i, i) = 2;
    if (i > 0) c(i, i - 1) = -1;
    if (i + 1 < r) c(i, i + 1) = -1;
  }
  RootDatum d = build_from_cartan("PGL_" + std::to_string(n), c);
  d.n_pgl = n;

  // Internal invariants for type A_{n-1}.
  long long fact = 1;
  for (int i = 2; i <= n; ++i) fact *= i;
  if (static_cast<long long>(d.weyl.size()) != fact)
    throw std::logic_error("Weyl group size mismatch for PGL datum");
  if (static_cast<int>(d.positive_roots.size()) != n * (n - 1) / 2)
    throw std::logic_error("positive root count mismatch for PGL datum");
  return d;
}

long long delta_b_exponent(const RootDatum& datum, const std::vector<int>& a) {
  if (static_cast<int>(a.size()) != datum.rank)
    throw std::invalid_argument("exponent vector size must equal the rank");
  long long s = 0;
  for (int i = 0; i < datum.rank; ++i) {
    if (a[i] < 0) throw std::invalid_argument("cell exponents must be nonnegative");
    s += static_cast<long long>(datum.kappa(i)) * a[i];
  }
  return s;
}

nlohmann::ordered_json RootDatum::to_json() const {
  nlohmann::ordered_json j;
  j["label"] = label;
  j["n_pgl"] = n_pgl;
  j["rank"] = rank;
  auto mat_rows = [](const Eigen::MatrixXi& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < m.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int jj = 0; jj < m.cols(); ++jj) row.push_back(m(i, jj));
      rows.push_back(row);
    }
    return rows;
  };
  j["cartan"] = mat_rows(cartan);
  nlohmann::ordered_json roots = nlohmann::ordered_json::array();
  for (const auto& beta : positive_roots) {
    nlohmann::ordered_json v = nlohmann::ordered_json::array();
    for (int i = 0; i < beta.size(); ++i) v.push_back(beta(i));
    roots.push_back(v);
  }
  j["positive_roots"] = roots;
  nlohmann::ordered_json kap = nlohmann::ordered_json::array();
  for (int i = 0; i < kappa.size(); ++i) kap.push_back(kappa(i));
  j["kappa"] = kap;
  j["weyl_order"] = weyl.size();
  j["longest_length"] = weyl.empty() ? 0 : weyl.back().length;
  return j;
}

}  // namespace manin
