#include <random>

#include "catch_amalgamated.hpp"
#include "windcurve/nnls.hpp"

using namespace windcurve;

namespace {

// Exhaustive reference: best least-squares fit over every support set whose
// unconstrained solution is non-negative.
std::pair<Eigen::VectorXd, double> nnls_oracle(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const auto n = A.cols();
    Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
    double best_obj = b.squaredNorm();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index c = 0; c < n; ++c)
            if (mask & (1u << c)) cols.push_back(c);
        const Eigen::MatrixXd As = A(Eigen::all, cols);
        const Eigen::VectorXd xs = As.colPivHouseholderQr().solve(b);
        if ((xs.array() < 0).any()) continue;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < cols.size(); ++i) x(cols[i]) = xs(static_cast<Eigen::Index>(i));
        const double obj = (A * x - b).squaredNorm();
        if (obj < best_obj) {
            best_obj = obj;
            best = x;
        }
    }
    return {best, best_obj};
}

}  // namespace

TEST_CASE("NNLS matches the exhaustive reference on random problems") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index m = 8 + trial % 13, n = 1 + trial % 6;
        Eigen::MatrixXd A(m, n);
        Eigen::VectorXd b(m);
        for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
        for (Eigen::Index i = 0; i < m; ++i) b(i) = g(rng);
        const auto res = nnls(A, b);
        const auto [x_ref, obj_ref] = nnls_oracle(A, b);
        REQUIRE(res.converged);
        REQUIRE((res.x.array() >= 0).all());
        REQUIRE(res.objective <= obj_ref * (1 + 1e-9) + 1e-12);
        REQUIRE((res.x - x_ref).norm() <= 1e-7 * std::max(1.0, x_ref.norm()));
    }
}

TEST_CASE("NNLS special cases") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd b(3);
    b << 1, -2, 3;
    const auto r = nnls(A, b);
    CHECK(r.x(0) == Catch::Approx(1));
    CHECK(r.x(1) == 0.0);
    CHECK(r.x(2) == Catch::Approx(3));

    const auto zero = nnls(A, -b.cwiseAbs());
    CHECK(zero.x.isZero());
    CHECK_THROWS_AS(nnls(A, Eigen::VectorXd::Zero(2)), ParameterError);
    CHECK_THROWS_AS(nnls(Eigen::MatrixXd(3, 0), b), ParameterError);
}
