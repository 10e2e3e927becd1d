#include "mlnl/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <random>

namespace mlnl {

namespace {

Eigen::VectorXd random_unit(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  v.normalize();
  return v;
}

void orthogonalize(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
  for (int sweep = 0; sweep < 2; ++sweep)
    for (const auto& q : basis) v -= q.dot(v) * q;
}

}  // namespace

std::vector<RitzPair> bottom_spectrum(const VecOp& solve_shifted, double sigma, Eigen::Index n,
                                      const LanczosOptions& opts) {
  std::vector<RitzPair> accepted;      // converged pairs across passes
  std::vector<Eigen::VectorXd> locked; // their vectors, for deflation

  for (int pass = 0; pass < opts.max_passes; ++pass) {
    Eigen::VectorXd q = random_unit(n, opts.seed + 77 * pass);
    orthogonalize(q, locked);
    if (q.norm() < 1e-12) break;
    q.normalize();

    std::vector<Eigen::VectorXd> Q;
    std::vector<double> alpha, beta;
    Q.push_back(q);
    Eigen::VectorXd q_prev = Eigen::VectorXd::Zero(n);
    double beta_prev = 0.0;

    int steps = 0;
    for (int j = 0; j < opts.max_steps; ++j, ++steps) {
      Eigen::VectorXd v = solve_shifted(Q[j]);
      v -= beta_prev * q_prev;
      const double a = Q[j].dot(v);
      alpha.push_back(a);
      v -= a * Q[j];
      orthogonalize(v, locked);
      orthogonalize(v, Q);
      const double b = v.norm();
      if (b < 1e-13) break;
      beta.push_back(b);
      q_prev = Q[j];
      beta_prev = b;
      Q.push_back(v / b);
    }

    const int m = static_cast<int>(alpha.size());
    if (m == 0) break;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    // residual estimate needs the subdiagonal entry beyond the last step;
    // absent (breakdown) means the Krylov space is invariant
    const double beta_last =
        beta.size() >= static_cast<size_t>(m) ? beta[m - 1] : 0.0;

    int new_found = 0;
    // largest theta of the inverse operator = bottom of the original spectrum
    for (int i = m - 1; i >= 0 && static_cast<int>(accepted.size()) < opts.wanted; --i) {
      const double theta = es.eigenvalues()[i];
      if (theta <= 0.0) continue;
      const double resid = std::abs(beta_last * es.eigenvectors()(m - 1, i));
      if (resid > opts.ritz_tol * std::abs(theta)) continue;
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      for (int j2 = 0; j2 < m; ++j2) y += es.eigenvectors()(j2, i) * Q[j2];
      orthogonalize(y, locked);
      const double ynorm = y.norm();
      if (ynorm < 0.5) continue;  // duplicate of a locked pair
      y /= ynorm;
      RitzPair pair;
      pair.lambda = 1.0 / theta - sigma;
      pair.vector = y;
      accepted.push_back(std::move(pair));
      locked.push_back(accepted.back().vector);
      ++new_found;
    }
    if (static_cast<int>(accepted.size()) >= opts.wanted) break;
    if (new_found == 0 && pass > 0) break;
  }

  std::sort(accepted.begin(), accepted.end(),
            [](const RitzPair& a, const RitzPair& b) { return a.lambda < b.lambda; });
  return accepted;
}

}  // namespace mlnl
