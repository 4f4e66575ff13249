// Dense symmetric linear algebra kit: Cholesky, triangular solves, SPD solve
// and inverse, against hand-computed fixtures.

#include <stdexcept>

#include <gtest/gtest.h>

#include "scct/linalg.hpp"

namespace {

using namespace scct;

TEST(Matrix, BasicOps) {
    Matrix a(2, 3);
    a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
    a(1, 0) = 4; a(1, 1) = 5; a(1, 2) = 6;
    const Matrix at = transpose(a);
    EXPECT_EQ(at.rows(), 3u);
    EXPECT_EQ(at.cols(), 2u);
    EXPECT_DOUBLE_EQ(at(2, 1), 6.0);

    const Matrix id = Matrix::identity(3);
    const Matrix aid = matmul(a, id);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(aid(i, j), a(i, j));

    const std::vector<double> v{1.0, 1.0, 1.0};
    const std::vector<double> av = matvec(a, v);
    EXPECT_DOUBLE_EQ(av[0], 6.0);
    EXPECT_DOUBLE_EQ(av[1], 15.0);
}

TEST(Cholesky, HandFixture) {
    // [[4,2],[2,3]] = L L' with L = [[2,0],[1,sqrt(2)]]
    Matrix a(2, 2);
    a(0, 0) = 4; a(0, 1) = 2; a(1, 0) = 2; a(1, 1) = 3;
    const Matrix L = cholesky_lower(a);
    EXPECT_NEAR(L(0, 0), 2.0, 1e-14);
    EXPECT_NEAR(L(1, 0), 1.0, 1e-14);
    EXPECT_NEAR(L(0, 1), 0.0, 1e-14);
    EXPECT_NEAR(L(1, 1), std::sqrt(2.0), 1e-14);
}

TEST(Cholesky, RejectsNonSpd) {
    Matrix a(2, 2);
    a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = 2; a(1, 1) = 1;  // eigenvalues 3, -1
    EXPECT_THROW(cholesky_lower(a), std::domain_error);
}

TEST(SpdSolve, MatchesHandInverse) {
    Matrix a(2, 2);
    a(0, 0) = 4; a(0, 1) = 2; a(1, 0) = 2; a(1, 1) = 3;  // det 8
    const std::vector<double> b{2.0, 5.0};
    const std::vector<double> x = solve_spd(a, b);
    // inverse = (1/8) [[3,-2],[-2,4]]
    EXPECT_NEAR(x[0], (3.0 * 2 - 2.0 * 5) / 8.0, 1e-13);
    EXPECT_NEAR(x[1], (-2.0 * 2 + 4.0 * 5) / 8.0, 1e-13);
}

TEST(SpdInverse, ProductIsIdentity) {
    const std::size_t d = 6;
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            a(i, j) = (i == j) ? 2.0 : 1.0 / (1.0 + std::abs(int(i) - int(j)));
    const Matrix inv = inverse_spd(a);
    const Matrix prod = matmul(a, inv);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            EXPECT_NEAR(prod(i, j), i == j ? 1.0 : 0.0, 1e-11);
}

TEST(TriangularSolves, RoundTrip) {
    Matrix a(3, 3);
    a(0,0)=4; a(0,1)=1; a(0,2)=0.5;
    a(1,0)=1; a(1,1)=3; a(1,2)=0.2;
    a(2,0)=0.5; a(2,1)=0.2; a(2,2)=5;
    const Matrix L = cholesky_lower(a);
    const std::vector<double> b{1.0, 2.0, 3.0};
    const std::vector<double> y = solve_lower(L, b);
    const std::vector<double> x = solve_upper_t(L, y);
    const std::vector<double> ax = matvec(a, x);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(ax[i], b[i], 1e-12);
}

}  // namespace
