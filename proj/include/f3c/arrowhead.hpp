#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

namespace f3c {

namespace detail {

/// Eigensolver for the symmetric arrowhead matrix
///   [ head  w^T ]
///   [ w     D   ],  D = diag(poles), poles sorted ascending.
/// Eigenvalues are the roots of f(x) = head - x + sum_i w_i^2 / (x - d_i),
/// one per gap between adjacent poles plus one below and one above. Each root
/// is stored relative to its nearest pole so eigenvector components
/// w_i / (x - d_i) keep full relative accuracy next to the pole. Weights
/// below the deflation threshold and exactly repeated poles are split off as
/// exact eigenpairs, following the usual secular-equation practice.
class ArrowheadEigen {
  public:
    ArrowheadEigen(double head, Eigen::VectorXd poles, Eigen::VectorXd weights);

    int size() const { return static_cast<int>(roots_.size()); }
    const Eigen::VectorXd& values() const { return values_; }

    /// Components <u|E_j> of every unit eigenvector on the direction
    /// u = head_coeff * e_head + sum_p pole_coeffs[p] * e_p. O(n) per root.
    Eigen::VectorXd project(double head_coeff, const Eigen::VectorXd& pole_coeffs) const;

  private:
    struct Root {
        double value = 0.0;
        int near = -1;        // index of the anchoring pole; -1 if there are no poles
        double tau = 0.0;     // value - poles[near]
        double inv_norm = 1.0;
        int deflated_pole = -1;  // >= 0: exact eigenpair (poles[p], e_p)
    };

    struct Rotation {
        int p = 0, q = 0;     // pole-space Givens rotation merging equal poles
        double c = 1.0, s = 0.0;
    };

    double pole_gap(const Root& r, int p) const;  // value - poles[p], pole-anchored
    void solve();
    Root solve_interval(double lo, double hi, int anchor_lo, int anchor_hi) const;
    double secular(double sigma, double tau, double* deriv) const;

    double head_ = 0.0;
    Eigen::VectorXd poles_;
    Eigen::VectorXd weights_;          // post-merge, deflated entries zeroed
    std::vector<int> active_;          // pole indices with live weights
    std::vector<Rotation> rotations_;
    std::vector<Root> roots_;          // ascending
    Eigen::VectorXd values_;
};

}  // namespace detail

/// Eigendecomposition of a real symmetric matrix, ascending eigenvalues.
/// Matrices made of a diagonal plus at most two dense border rows/columns are
/// solved by nested secular-equation stages in O(n^2); anything else falls
/// back to a dense solve.
class SpectralDecomposition {
  public:
    explicit SpectralDecomposition(const Eigen::MatrixXd& matrix);

    int dim() const { return static_cast<int>(values_.size()); }
    const Eigen::VectorXd& eigenvalues() const { return values_; }
    bool used_structured_path() const { return structured_ != nullptr; }

    /// Components of every unit eigenvector on one basis row:
    /// result[j] = Q(row, j). O(n^2) on the structured path.
    Eigen::VectorXd basis_row(int row) const;

    /// Full eigenvector matrix, one column per eigenvalue. O(n^3); intended
    /// for verification at modest sizes.
    Eigen::MatrixXd materialize() const;

  private:
    struct Structured {
        std::vector<int> border;       // original indices of the border rows
        std::vector<int> pole_of;      // original index -> sorted pole slot, -1 for borders
        std::unique_ptr<detail::ArrowheadEigen> stage1;
        std::unique_ptr<detail::ArrowheadEigen> stage2;  // null when one border suffices
    };

    Eigen::VectorXd values_;
    Eigen::MatrixXd dense_q_;  // dense fallback
    std::unique_ptr<Structured> structured_;
};

}  // namespace f3c
