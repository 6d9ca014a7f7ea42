#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "windcurve/error.hpp"

namespace windcurve {

struct NnlsResult {
    Eigen::VectorXd x;
    double objective = 0.0;  // ||A x - b||^2
    int iterations = 0;
    bool converged = false;
};

// Lawson-Hanson active-set solver for min ||A x - b||^2 subject to x >= 0.
// Each passive-set subproblem is solved by a column-pivoting QR of the
// selected columns of A, so the Gram matrix is never formed.
inline NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations = -1) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (b.size() != m) throw ParameterError("nnls: dimension mismatch between A and b");
    if (n == 0) throw ParameterError("nnls: A has no columns");
    if (max_iterations < 0) max_iterations = static_cast<int>(3 * n + 30);

    const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max(m, n)) *
                       std::max(1.0, A.cwiseAbs().colwise().sum().maxCoeff());

    NnlsResult res;
    res.x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);

    auto passive_indices = [&] {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        return idx;
    };
    // Unconstrained least squares restricted to the passive columns.
    auto solve_passive = [&](const std::vector<Eigen::Index>& idx) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
        if (idx.empty()) return s;
        const Eigen::MatrixXd sub = A(Eigen::all, idx);
        const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(b);
        for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = z(static_cast<Eigen::Index>(k));
        return s;
    };

    Eigen::VectorXd w = A.transpose() * b;
    while (res.iterations < max_iterations) {
        // most violated dual among active (zero) variables
        Eigen::Index t = -1;
        double best = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w(j) > best) {
                best = w(j);
                t = j;
            }
        }
        if (t < 0) {
            res.converged = true;
            break;
        }
        passive[static_cast<std::size_t>(t)] = true;

        while (true) {
            ++res.iterations;
            const auto idx = passive_indices();
            Eigen::VectorXd s = solve_passive(idx);
            bool feasible = true;
            for (auto j : idx)
                if (s(j) <= 0) feasible = false;
            if (feasible) {
                res.x = s;
                break;
            }
            double step = 1.0;
            for (auto j : idx) {
                if (s(j) <= 0) {
                    const double denom = res.x(j) - s(j);
                    if (denom > 0) step = std::min(step, res.x(j) / denom);
                }
            }
            res.x += step * (s - res.x);
            const double xtol = 1e-12 * std::max(1.0, res.x.cwiseAbs().maxCoeff());
            for (auto j : idx) {
                if (res.x(j) <= xtol) {
                    res.x(j) = 0.0;
                    passive[static_cast<std::size_t>(j)] = false;
                }
            }
            if (res.iterations >= max_iterations) break;
        }
        w = A.transpose() * (b - A * res.x);
    }
    res.objective = (A * res.x - b).squaredNorm();
    return res;
}

}  // namespace windcurve
