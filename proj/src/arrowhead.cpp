#include "f3c/arrowhead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "f3c/errors.hpp"

namespace f3c {

namespace detail {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

ArrowheadEigen::ArrowheadEigen(double head, Eigen::VectorXd poles, Eigen::VectorXd weights)
    : head_(head), poles_(std::move(poles)), weights_(std::move(weights)) {
    const int n = static_cast<int>(poles_.size());
    for (int i = 1; i < n; ++i) {
        if (poles_[i] < poles_[i - 1]) {
            fail(ErrorCode::InvalidArgument, "arrowhead poles must be sorted");
        }
    }

    // Rotate repeated poles so only one of each run keeps coupling weight.
    for (int i = 0; i + 1 < n; ++i) {
        int j = i + 1;
        while (j < n && poles_[j] == poles_[i]) {
            const double r = std::hypot(weights_[i], weights_[j]);
            if (r > 0.0) {
                Rotation rot{i, j, weights_[i] / r, weights_[j] / r};
                weights_[i] = r;
                weights_[j] = 0.0;
                rotations_.push_back(rot);
            }
            ++j;
        }
        i = j - 1;
    }

    double scale = std::abs(head_);
    for (int i = 0; i < n; ++i) {
        scale = std::max({scale, std::abs(poles_[i]), std::abs(weights_[i])});
    }
    const double deflate_tol = 16.0 * kEps * scale;
    for (int i = 0; i < n; ++i) {
        if (std::abs(weights_[i]) > deflate_tol) active_.push_back(i);
    }

    solve();
}

double ArrowheadEigen::pole_gap(const Root& r, int p) const {
    if (r.near < 0) return r.value - poles_[p];
    return (poles_[r.near] - poles_[p]) + r.tau;
}

double ArrowheadEigen::secular(double sigma, double tau, double* deriv) const {
    double f = (head_ - sigma) - tau;
    double df = -1.0;
    for (int t : active_) {
        const double diff = tau - (poles_[t] - sigma);
        const double ratio = weights_[t] / diff;
        f += weights_[t] * ratio;
        df -= ratio * ratio;
    }
    if (deriv) *deriv = df;
    return f;
}

ArrowheadEigen::Root ArrowheadEigen::solve_interval(double lo, double hi, int anchor_lo,
                                                    int anchor_hi) const {
    // f is strictly decreasing across (lo, hi) with exactly one root inside.
    const double mid = 0.5 * (lo + hi);
    const double fmid = secular(mid, 0.0, nullptr);

    Root root;
    const bool right_half = fmid > 0.0;
    root.near = right_half ? (anchor_hi >= 0 ? anchor_hi : anchor_lo)
                           : (anchor_lo >= 0 ? anchor_lo : anchor_hi);
    const double sigma = poles_[root.near];
    double tlo = (right_half ? mid : lo) - sigma;
    double thi = (right_half ? hi : mid) - sigma;
    if (fmid == 0.0) {
        root.tau = mid - sigma;
        root.value = mid;
    } else {
        double t = 0.5 * (tlo + thi);
        for (int iter = 0; iter < 300; ++iter) {
            double df = 0.0;
            const double f = secular(sigma, t, &df);
            if (f == 0.0 || !std::isfinite(f)) break;
            if (f > 0.0) tlo = t; else thi = t;
            const double width = thi - tlo;
            if (width <= 2.0 * kEps * std::max(std::abs(tlo), std::abs(thi))) break;
            double tn = t - f / df;
            // bisection fallback keeps the bracket shrinking geometrically
            if (!(tn > tlo && tn < thi) || (iter & 3) == 3) tn = 0.5 * (tlo + thi);
            if (tn == t) break;
            t = tn;
        }
        root.tau = t;
        root.value = sigma + root.tau;
    }

    double norm2 = 1.0;
    for (int a : active_) {
        const double c = weights_[a] / ((sigma - poles_[a]) + root.tau);
        norm2 += c * c;
    }
    root.inv_norm = 1.0 / std::sqrt(norm2);
    return root;
}

void ArrowheadEigen::solve() {
    std::vector<Root> secular_roots;
    if (active_.empty()) {
        Root r;
        r.value = head_;
        if (poles_.size() > 0) {
            // nearest pole, only used to reconstruct value = pole + tau
            int best = 0;
            for (int i = 1; i < poles_.size(); ++i) {
                if (std::abs(poles_[i] - head_) < std::abs(poles_[best] - head_)) best = i;
            }
            r.near = best;
            r.tau = head_ - poles_[best];
        }
        secular_roots.push_back(r);
    } else {
        double wnorm2 = 0.0;
        for (int a : active_) wnorm2 += weights_[a] * weights_[a];
        const double margin = std::sqrt(wnorm2) * 1.0000001 + 1e-300;
        const int m = static_cast<int>(active_.size());
        const double lo_bound = std::min(head_, poles_[active_.front()]) - margin;
        const double hi_bound = std::max(head_, poles_[active_.back()]) + margin;

        secular_roots.reserve(static_cast<std::size_t>(m) + 1);
        secular_roots.push_back(solve_interval(lo_bound, poles_[active_[0]], -1, active_[0]));
        for (int k = 0; k + 1 < m; ++k) {
            secular_roots.push_back(
                solve_interval(poles_[active_[k]], poles_[active_[k + 1]], active_[k], active_[k + 1]));
        }
        secular_roots.push_back(solve_interval(poles_[active_.back()], hi_bound, active_.back(), -1));
    }

    // Merge with the deflated poles, each an exact eigenpair.
    std::vector<Root> deflated;
    for (int i = 0; i < poles_.size(); ++i) {
        if (std::binary_search(active_.begin(), active_.end(), i)) continue;
        Root r;
        r.value = poles_[i];
        r.deflated_pole = i;
        deflated.push_back(r);
    }
    roots_.clear();
    roots_.reserve(secular_roots.size() + deflated.size());
    std::merge(secular_roots.begin(), secular_roots.end(), deflated.begin(), deflated.end(),
               std::back_inserter(roots_),
               [](const Root& a, const Root& b) { return a.value < b.value; });

    values_.resize(static_cast<Eigen::Index>(roots_.size()));
    for (std::size_t i = 0; i < roots_.size(); ++i) {
        values_[static_cast<Eigen::Index>(i)] = roots_[i].value;
    }
}

Eigen::VectorXd ArrowheadEigen::project(double head_coeff,
                                        const Eigen::VectorXd& pole_coeffs) const {
    Eigen::VectorXd u = pole_coeffs;
    for (const Rotation& rot : rotations_) {
        const double up = u[rot.p], uq = u[rot.q];
        u[rot.p] = rot.c * up + rot.s * uq;
        u[rot.q] = -rot.s * up + rot.c * uq;
    }
    Eigen::VectorXd out(size());
    for (int j = 0; j < size(); ++j) {
        const Root& r = roots_[static_cast<std::size_t>(j)];
        if (r.deflated_pole >= 0) {
            out[j] = u[r.deflated_pole];
            continue;
        }
        double acc = head_coeff;
        for (int a : active_) acc += u[a] * weights_[a] / pole_gap(r, a);
        out[j] = r.inv_norm * acc;
    }
    return out;
}

}  // namespace detail

namespace {

struct StructureScan {
    bool structured = false;
    std::vector<int> border;
};

StructureScan scan_structure(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    const std::size_t edge_cap = 4 * static_cast<std::size_t>(n) + 16;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (m(i, j) != 0.0 || m(j, i) != 0.0) {
                if (edges.size() >= edge_cap) return {};
                edges.emplace_back(i, j);
            }
        }
    }
    StructureScan scan;
    // Greedy 2-row vertex cover of the off-diagonal pattern.
    for (int pass = 0; pass < 2 && !edges.empty(); ++pass) {
        std::vector<int> degree(static_cast<std::size_t>(n), 0);
        for (const auto& [i, j] : edges) {
            ++degree[static_cast<std::size_t>(i)];
            ++degree[static_cast<std::size_t>(j)];
        }
        const int pick = static_cast<int>(
            std::max_element(degree.begin(), degree.end()) - degree.begin());
        scan.border.push_back(pick);
        std::erase_if(edges, [pick](const auto& e) { return e.first == pick || e.second == pick; });
    }
    scan.structured = edges.empty();
    return scan;
}

}  // namespace

SpectralDecomposition::SpectralDecomposition(const Eigen::MatrixXd& matrix) {
    const int n = static_cast<int>(matrix.rows());
    if (n == 0 || matrix.cols() != n) {
        fail(ErrorCode::InvalidArgument, "matrix must be square and non-empty");
    }
    if (!matrix.allFinite()) {
        fail(ErrorCode::InvalidArgument, "matrix has non-finite entries");
    }

    StructureScan scan = scan_structure(matrix);
    if (!scan.structured) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix);
        if (es.info() != Eigen::Success) {
            fail(ErrorCode::ConvergenceFailure, "dense eigensolver failed");
        }
        values_ = es.eigenvalues();
        dense_q_ = es.eigenvectors();
        return;
    }

    auto st = std::make_unique<Structured>();
    if (scan.border.empty()) scan.border.push_back(0);

    // Stage-1 head is the border row with the stronger coupling to the rest.
    if (scan.border.size() == 2) {
        auto border_norm = [&](int b) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == scan.border[0] || j == scan.border[1]) continue;
                s += matrix(b, j) * matrix(b, j);
            }
            return s;
        };
        if (border_norm(scan.border[1]) > border_norm(scan.border[0])) {
            std::swap(scan.border[0], scan.border[1]);
        }
    }
    st->border = scan.border;

    std::vector<int> pole_rows;
    pole_rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (i != st->border[0] && (st->border.size() < 2 || i != st->border[1])) {
            pole_rows.push_back(i);
        }
    }
    std::sort(pole_rows.begin(), pole_rows.end(),
              [&](int a, int b) { return matrix(a, a) < matrix(b, b); });
    st->pole_of.assign(static_cast<std::size_t>(n), -1);
    const int m = static_cast<int>(pole_rows.size());
    Eigen::VectorXd d(m), w1(m), w2(m);
    const int b1 = st->border[0];
    const int b2 = st->border.size() == 2 ? st->border[1] : -1;
    for (int p = 0; p < m; ++p) {
        const int row = pole_rows[static_cast<std::size_t>(p)];
        st->pole_of[static_cast<std::size_t>(row)] = p;
        d[p] = matrix(row, row);
        w1[p] = matrix(b1, row);
        if (b2 >= 0) w2[p] = matrix(b2, row);
    }

    st->stage1 = std::make_unique<detail::ArrowheadEigen>(matrix(b1, b1), d, w1);
    if (b2 >= 0) {
        const Eigen::VectorXd z = st->stage1->project(matrix(b1, b2), w2);
        st->stage2 =
            std::make_unique<detail::ArrowheadEigen>(matrix(b2, b2), st->stage1->values(), z);
        values_ = st->stage2->values();
    } else {
        values_ = st->stage1->values();
    }
    structured_ = std::move(st);
}

Eigen::VectorXd SpectralDecomposition::basis_row(int row) const {
    if (row < 0 || row >= dim()) {
        fail(ErrorCode::InvalidArgument, "basis row out of range");
    }
    if (!structured_) return dense_q_.row(row);

    const Structured& st = *structured_;
    const int m = dim() - static_cast<int>(st.border.size());
    if (st.border.size() == 2 && row == st.border[1]) {
        return st.stage2->project(1.0, Eigen::VectorXd::Zero(st.stage1->size()));
    }
    Eigen::VectorXd u;
    if (row == st.border[0]) {
        u = st.stage1->project(1.0, Eigen::VectorXd::Zero(m));
    } else {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[st.pole_of[static_cast<std::size_t>(row)]] = 1.0;
        u = st.stage1->project(0.0, e);
    }
    if (!st.stage2) return u;
    return st.stage2->project(0.0, u);
}

Eigen::MatrixXd SpectralDecomposition::materialize() const {
    if (!structured_) return dense_q_;
    Eigen::MatrixXd q(dim(), dim());
    for (int row = 0; row < dim(); ++row) q.row(row) = basis_row(row).transpose();
    return q;
}

}  // namespace f3c
