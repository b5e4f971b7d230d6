#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "manin/rootsys.hpp"

using namespace manin;

namespace {
bool same_mat(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}
std::vector<int> as_vec(const Eigen::VectorXi& v) {
  return std::vector<int>(v.data(), v.data() + v.size());
}
}  // namespace

TEST_CASE("simple reflections are involutions") {
  for (int n = 2; n <= 5; ++n) {
    RootDatum d = build_pgl(n);
    for (int i = 0; i < d.rank; ++i) {
      Eigen::MatrixXi s = simple_reflection_matrix(d.cartan, i);
      CHECK(same_mat(s * s, Eigen::MatrixXi::Identity(d.rank, d.rank)));
    }
  }
}

TEST_CASE("braid relation in rank two") {
  RootDatum d = build_pgl(3);
  Eigen::MatrixXi s0 = simple_reflection_matrix(d.cartan, 0);
  Eigen::MatrixXi s1 = simple_reflection_matrix(d.cartan, 1);
  Eigen::MatrixXi prod = s0 * s1 * s0;
  CHECK(same_mat(prod, s1 * s0 * s1));
}

TEST_CASE("PGL data: sizes, orders, longest element") {
  const long long weyl_orders[] = {0, 0, 2, 6, 24, 120, 720};
  for (int n = 2; n <= 6; ++n) {
    RootDatum d = build_pgl(n);
    CHECK(d.rank == n - 1);
    CHECK(static_cast<int>(d.positive_roots.size()) == n * (n - 1) / 2);
    CHECK(static_cast<long long>(d.weyl.size()) == weyl_orders[n]);
    CHECK(d.weyl.front().length == 0);
    CHECK(d.weyl.back().length == n * (n - 1) / 2);
    int count_len1 = 0;
    for (const auto& w : d.weyl)
      if (w.length == 1) ++count_len1;
    CHECK(count_len1 == d.rank);
  }
}

TEST_CASE("kappa coordinates are i*(n-i)") {
  for (int n = 2; n <= 6; ++n) {
    RootDatum d = build_pgl(n);
    for (int i = 1; i <= d.rank; ++i) CHECK(d.kappa(i - 1) == i * (n - i));
    CHECK(same_mat(d.rho2, d.kappa));
  }
  CHECK(as_vec(build_pgl(4).kappa) == std::vector<int>{3, 4, 3});
  CHECK(as_vec(build_pgl(6).kappa) == std::vector<int>{5, 8, 9, 8, 5});
}

TEST_CASE("positive roots of PGL_4 are the interval sums") {
  RootDatum d = build_pgl(4);
  std::set<std::vector<int>> got;
  for (const auto& beta : d.positive_roots) got.insert(as_vec(beta));
  std::set<std::vector<int>> want = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                     {1, 1, 0}, {0, 1, 1}, {1, 1, 1}};
  CHECK(got == want);
  // simple roots come first, in index order
  CHECK(as_vec(d.positive_roots[0]) == std::vector<int>{1, 0, 0});
  CHECK(as_vec(d.positive_roots[1]) == std::vector<int>{0, 1, 0});
  CHECK(as_vec(d.positive_roots[2]) == std::vector<int>{0, 0, 1});
}

TEST_CASE("Weyl elements permute the root set") {
  RootDatum d = build_pgl(3);
  std::set<std::vector<int>> roots;
  for (const auto& beta : d.positive_roots) {
    roots.insert(as_vec(beta));
    roots.insert(as_vec(Eigen::VectorXi(-beta)));
  }
  for (const auto& w : d.weyl)
    for (const auto& beta : d.positive_roots)
      CHECK(roots.count(as_vec(Eigen::VectorXi(w.mat * beta))) == 1);
}

TEST_CASE("delta_b exponent") {
  RootDatum d = build_pgl(4);
  CHECK(delta_b_exponent(d, {1, 1, 1}) == 10);
  CHECK(delta_b_exponent(d, {0, 1, 0}) == 4);
  CHECK(delta_b_exponent(d, {0, 0, 0}) == 0);
  CHECK_THROWS_AS(delta_b_exponent(d, {1, -1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(delta_b_exponent(d, {1, 1}), std::invalid_argument);
}

TEST_CASE("build_pgl range checks") {
  CHECK_THROWS_AS(build_pgl(1), std::invalid_argument);
  CHECK_THROWS_AS(build_pgl(7), std::invalid_argument);
}

TEST_CASE("non-finite Cartan matrix is rejected") {
  Eigen::MatrixXi affine(2, 2);
  affine << 2, -2, -2, 2;
  CHECK_THROWS_AS(positive_roots_from_cartan(affine), std::runtime_error);
}

TEST_CASE("malformed Cartan matrices are rejected") {
  Eigen::MatrixXi bad_diag(1, 1);
  bad_diag << 3;
  CHECK_THROWS_AS(positive_roots_from_cartan(bad_diag), std::invalid_argument);
  Eigen::MatrixXi bad_off(2, 2);
  bad_off << 2, 1, 1, 2;
  CHECK_THROWS_AS(positive_roots_from_cartan(bad_off), std::invalid_argument);
}

TEST_CASE("build_from_cartan agrees with build_pgl") {
  RootDatum ref = build_pgl(3);
  RootDatum gen = build_from_cartan("A2", ref.cartan);
  CHECK(gen.rank == ref.rank);
  CHECK(gen.positive_roots.size() == ref.positive_roots.size());
  CHECK(gen.weyl.size() == ref.weyl.size());
  CHECK(same_mat(gen.kappa, ref.kappa));
  CHECK(gen.n_pgl == 0);
}

TEST_CASE("json serialization carries the key facts") {
  auto j = build_pgl(4).to_json();
  CHECK(j["label"] == "PGL_4");
  CHECK(j["rank"] == 3);
  CHECK(j["kappa"] == nlohmann::ordered_json::array({3, 4, 3}));
  CHECK(j["weyl_order"] == 24);
  CHECK(j["longest_length"] == 6);
}
