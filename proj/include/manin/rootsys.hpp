#pragma once
// Root-system combinatorics for split adjoint groups: Cartan matrices,
// positive-root closures, Weyl groups as matrices on root coordinates,
// and the kappa exponent vector (coefficients of the sum of positive roots).

#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace manin {

// One Weyl element acting on root coordinates, with its length
// (= number of positive roots it sends to negative roots).
struct WeylElement {
  Eigen::MatrixXi mat;
  int length = 0;
};

struct RootDatum {
  std::string label;   // e.g. "PGL_4"
  int n_pgl = 0;       // n for PGL_n, 0 otherwise
  int rank = 0;
  Eigen::MatrixXi cartan;                       // C(i,j) = <alpha_j, alpha_i^vee>
  std::vector<Eigen::VectorXi> positive_roots;  // root coordinates, simple roots first
  std::vector<WeylElement> weyl;
  Eigen::VectorXi kappa;  // sum of positive roots in root coordinates
  Eigen::VectorXi rho2;   // 2*rho, equals kappa

  nlohmann::ordered_json to_json() const;
};

// Matrix of the simple reflection s_i on root coordinates: I - e_i * C.row(i).
Eigen::MatrixXi simple_reflection_matrix(const Eigen::MatrixXi& cartan, int i);

// Reflection closure of the simple roots; throws if the closure does not
// terminate within 4*rank^2 sweeps (non-finite type).
std::vector<Eigen::VectorXi> positive_roots_from_cartan(const Eigen::MatrixXi& cartan);

// Full datum for PGL_n (type A_{n-1}); 2 <= n <= 6.
RootDatum build_pgl(int n);

// Generic constructor from a Cartan matrix (rank <= 5): closes the positive
// roots and enumerates the Weyl group.
RootDatum build_from_cartan(const std::string& label, const Eigen::MatrixXi& cartan);

// Sum_alpha kappa_alpha * a_alpha; rejects negative components.
long long delta_b_exponent(const RootDatum& datum, const std::vector<int>& a);

inline bool is_nonnegative(const Eigen::VectorXi& v) {
  return (v.array() >= 0).all();
}

}  // namespace manin
