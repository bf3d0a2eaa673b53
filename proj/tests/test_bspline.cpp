#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfq/bspline.hpp"
#include "mfq/geometry.hpp"
#include "mfq/nodegen.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace mfq;

namespace {

Eigen::VectorXd greville_coefficients(const TensorSplineSpace<2>& space, int axis) {
    const auto g0 = greville_abscissae(space.axes[0], space.q);
    const auto g1 = greville_abscissae(space.axes[1], space.q);
    Eigen::VectorXd c(space.n_coeff);
    for (int j1 = 0; j1 < space.axes[1].n_basis; ++j1)
        for (int j0 = 0; j0 < space.axes[0].n_basis; ++j0)
            c[j0 + space.axes[0].n_basis * j1] = axis == 0 ? g0[j0] : g1[j1];
    return c;
}

Eigen::VectorXd random_coefficients(const TensorSplineSpace<2>& space, std::uint64_t seed) {
    Eigen::VectorXd c(space.n_coeff);
    for (int j = 0; j < space.n_coeff; ++j) c[j] = 2.0 * hash01(seed, j) - 1.0;
    return c;
}

template <int D>
std::vector<Pt<D>> box_samples(const TensorSplineSpace<D>& space, std::uint64_t seed, int n) {
    std::vector<Pt<D>> pts(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < D; ++k) {
            const auto& ax = space.axes[k];
            pts[i][k] =
                ax.a + (ax.b - ax.a) * hash01(seed, static_cast<std::uint64_t>(i) * D + k);
        }
    return pts;
}

}  // namespace

TEST_CASE("open uniform knots repeat the ends and step uniformly") {
    const auto k2 = open_uniform_knots(0.0, 0.5, 2, 2);
    CHECK(k2 == std::vector<double>{0.0, 0.0, 0.5, 1.0, 1.0});

    const auto k4 = open_uniform_knots(-1.0, 0.25, 3, 4);
    REQUIRE(k4.size() == 3 + 1 + 2 * 3);
    for (int i = 0; i < 4; ++i) {
        CHECK(k4[i] == -1.0);
        CHECK(k4[k4.size() - 1 - i] == doctest::Approx(-0.25).epsilon(1e-15));
    }
    for (std::size_t i = 1; i < k4.size(); ++i) CHECK(k4[i] >= k4[i - 1]);
    CHECK(k4[4] == doctest::Approx(-0.75).epsilon(1e-15));
    CHECK(k4[5] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("univariate splines form a partition of unity with vanishing derivative sums") {
    for (int q = 2; q <= 6; ++q) {
        const auto knots = open_uniform_knots(0.0, 0.125, 8, q);
        for (int i = 0; i <= 200; ++i) {
            const double x = i / 200.0;
            const Spline1D v = spline_eval_1d(knots, q, x, 0);
            double sum = 0.0, scale = 0.0;
            for (int j = 0; j < q; ++j) {
                CHECK(v.val[j] >= -1e-14);
                sum += v.val[j];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            const Spline1D d = spline_eval_1d(knots, q, x, 1);
            double dsum = 0.0;
            for (int j = 0; j < q; ++j) {
                dsum += d.val[j];
                scale = std::max(scale, std::abs(d.val[j]));
            }
            CHECK(std::abs(dsum) <= 1e-12 * (1.0 + scale));
        }
    }
}

TEST_CASE("uniform quadratics take the half-half values at interior knots") {
    const auto knots = open_uniform_knots(0.0, 0.25, 8, 3);
    const Spline1D v = spline_eval_1d(knots, 3, 1.0, 0);
    std::vector<double> vals(v.val.begin(), v.val.begin() + 3);
    std::sort(vals.begin(), vals.end());
    CHECK(std::abs(vals[0] - 0.0) <= 1e-14);
    CHECK(std::abs(vals[1] - 0.5) <= 1e-14);
    CHECK(std::abs(vals[2] - 0.5) <= 1e-14);

    const auto lin = open_uniform_knots(0.0, 0.25, 8, 2);
    const Spline1D w = spline_eval_1d(lin, 2, 1.0, 0);
    std::vector<double> wv(w.val.begin(), w.val.begin() + 2);
    std::sort(wv.begin(), wv.end());
    CHECK(std::abs(wv[0]) <= 1e-14);
    CHECK(std::abs(wv[1] - 1.0) <= 1e-14);
}

TEST_CASE("analytic derivatives agree with finite differences") {
    const double fd = 1e-6;
    for (int q = 3; q <= 5; ++q) {
        const auto knots = open_uniform_knots(0.0, 0.2, 10, q);
        for (int i = 0; i < 40; ++i) {
            double x = 0.05 + 1.9 * hash01(40 + q, i);
            const double nearest = std::round(x / 0.2) * 0.2;
            if (std::abs(x - nearest) < 1e-3) x += 2e-3;
            const Spline1D d = spline_eval_1d(knots, q, x, 1);
            const Spline1D lo = spline_eval_1d(knots, q, x - fd, 0);
            const Spline1D hi = spline_eval_1d(knots, q, x + fd, 0);
            REQUIRE(lo.first == d.first);
            REQUIRE(hi.first == d.first);
            for (int j = 0; j < q; ++j)
                CHECK(d.val[j] ==
                      doctest::Approx((hi.val[j] - lo.val[j]) / (2.0 * fd)).epsilon(1e-5));
        }
    }
}

TEST_CASE("the spline space rounds the box outward to whole cells") {
    const auto dom = make_domain2("ellipse");
    const double h = 0.05;
    const int q = 5;
    const auto space = make_spline_space(*dom, h, q);
    CHECK(space.q == q);
    long long prod = 1;
    for (int k = 0; k < 2; ++k) {
        const auto& ax = space.axes[k];
        CHECK(ax.spacing == doctest::Approx(4.0 * h).epsilon(1e-15));
        CHECK(ax.a == dom->box.lo[k]);
        CHECK(ax.b >= dom->box.hi[k] - 1e-12);
        CHECK(ax.b - ax.a == doctest::Approx(ax.n_cells * ax.spacing).epsilon(1e-14));
        CHECK(ax.n_cells == static_cast<int>(std::ceil((dom->box.hi[k] - dom->box.lo[k]) /
                                                       (4.0 * h))));
        CHECK(ax.n_basis == ax.n_cells + q - 1);
        REQUIRE(ax.knots.size() == static_cast<std::size_t>(ax.n_cells + 1 + 2 * (q - 1)));
        for (int i = 1; i < static_cast<int>(ax.knots.size()) - 2 * (q - 1); ++i)
            CHECK(ax.knots[q - 1 + i] - ax.knots[q - 2 + i] ==
                  doctest::Approx(ax.spacing).epsilon(1e-12));
        prod *= ax.n_basis;
    }
    CHECK(space.n_coeff == prod);

    CHECK_THROWS_AS(make_spline_space(*dom, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_spline_space(*dom, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(spline_eval_1d(space.axes[0].knots, kMaxSplineOrder + 1, 0.0, 0),
                    std::invalid_argument);
}

TEST_CASE("local tensor evaluation matches the axis-0-fastest flat indexing") {
    const auto dom2 = make_domain2("ellipse");
    const auto space2 = make_spline_space(*dom2, 0.08, 4);
    for (const auto& p : box_samples(space2, 50, 30)) {
        const auto pairs = eval_local(space2, p);
        REQUIRE(pairs.size() == 16);
        const Spline1D s0 = spline_eval_1d(space2.axes[0].knots, 4, p[0], 0);
        const Spline1D s1 = spline_eval_1d(space2.axes[1].knots, 4, p[1], 0);
        double sum = 0.0;
        std::size_t m = 0;
        for (int i1 = 0; i1 < 4; ++i1)
            for (int i0 = 0; i0 < 4; ++i0, ++m) {
                const int flat = (s0.first + i0) + space2.axes[0].n_basis * (s1.first + i1);
                bool found = false;
                for (const auto& pr : pairs)
                    if (pr.first == flat) {
                        found = true;
                        CHECK(pr.second ==
                              doctest::Approx(s0.val[i0] * s1.val[i1]).epsilon(1e-13));
                    }
                CHECK(found);
            }
        for (const auto& pr : pairs) {
            CHECK(pr.first >= 0);
            CHECK(pr.first < space2.n_coeff);
            sum += pr.second;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        for (int axis = 0; axis < 2; ++axis) {
            double dsum = 0.0;
            for (const auto& pr : eval_local(space2, p, axis)) dsum += pr.second;
            CHECK(std::abs(dsum) <= 1e-9);
        }
    }

    const auto dom3 = make_domain3("torus");
    const auto space3 = make_spline_space(*dom3, 0.2, 3);
    for (const auto& p : box_samples(space3, 51, 10)) {
        const auto pairs = eval_local(space3, p);
        REQUIRE(pairs.size() == 27);
        const Spline1D s0 = spline_eval_1d(space3.axes[0].knots, 3, p[0], 0);
        const Spline1D s1 = spline_eval_1d(space3.axes[1].knots, 3, p[1], 0);
        const Spline1D s2 = spline_eval_1d(space3.axes[2].knots, 3, p[2], 0);
        std::size_t m = 0;
        for (int i2 = 0; i2 < 3; ++i2)
            for (int i1 = 0; i1 < 3; ++i1)
                for (int i0 = 0; i0 < 3; ++i0, ++m) {
                    const int flat =
                        (s0.first + i0) +
                        space3.axes[0].n_basis *
                            ((s1.first + i1) + space3.axes[1].n_basis * (s2.first + i2));
                    CHECK(pairs[m].first == flat);
                    CHECK(pairs[m].second == doctest::Approx(s0.val[i0] * s1.val[i1] *
                                                             s2.val[i2])
                                                 .epsilon(1e-13));
                }
    }

    Pt<2> outside(space2.axes[0].b + 1.0, 0.0);
    CHECK_THROWS_AS(eval_local(space2, outside), std::domain_error);
}

TEST_CASE("greville coefficients reproduce linear functions") {
    const auto dom = make_domain2("ellipse");
    const auto space = make_spline_space(*dom, 0.1, 4);
    const Eigen::VectorXd cx = greville_coefficients(space, 0);
    const Eigen::VectorXd cy = greville_coefficients(space, 1);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(space.n_coeff);
    for (const auto& p : box_samples(space, 60, 60)) {
        CHECK(std::abs(eval_spline(space, cx, p) - p[0]) <= 1e-10);
        CHECK(std::abs(eval_spline(space, cy, p) - p[1]) <= 1e-10);
        CHECK(std::abs(eval_spline(space, cx, p, 0) - 1.0) <= 1e-8);
        CHECK(std::abs(eval_spline(space, cx, p, 1)) <= 1e-8);
        CHECK(std::abs(eval_spline(space, ones, p) - 1.0) <= 1e-12);
        CHECK(std::abs(eval_spline(space, ones, p, 0)) <= 1e-9);
    }
    Eigen::VectorXd short_coef(space.n_coeff - 1);
    short_coef.setZero();
    const Pt<2> origin = Pt<2>::Zero();
    CHECK_THROWS_AS(eval_spline(space, short_coef, origin), std::invalid_argument);
}

TEST_CASE("collocation matrices agree with direct spline evaluation") {
    const auto dom = make_domain2("ellipse");
    const auto space = make_spline_space(*dom, 0.1, 4);
    const auto ns = advancing_front(*dom, 0.1, 1);
    const auto Y = ns.quadrature_nodes();
    const auto& Z = ns.boundary;

    const SparseMatrix L = assemble_L_div_bsp(space, Y);
    REQUIRE(L.rows() == static_cast<int>(Y.size()));
    REQUIRE(L.cols() == 2 * space.n_coeff);
    const SparseMatrix B = assemble_B_normal_bsp(space, Z);
    REQUIRE(B.rows() == static_cast<int>(Z.size()));
    REQUIRE(B.cols() == 2 * space.n_coeff);
    for (int i = 0; i < L.rows(); ++i) CHECK(L.row_nnz(i) <= 2 * 16);
    for (int i = 0; i < B.rows(); ++i) CHECK(B.row_nnz(i) <= 2 * 16);

    const Eigen::VectorXd c = random_coefficients(space, 77);
    Eigen::VectorXd psi0 = Eigen::VectorXd::Zero(2 * space.n_coeff);
    Eigen::VectorXd psi1 = Eigen::VectorXd::Zero(2 * space.n_coeff);
    psi0.head(space.n_coeff) = c;
    psi1.tail(space.n_coeff) = c;

    const Eigen::VectorXd l0 = L.multiply(psi0), l1 = L.multiply(psi1);
    for (std::size_t i = 0; i < Y.size(); ++i) {
        CHECK(l0[i] == doctest::Approx(eval_spline(space, c, Y[i], 0)).epsilon(1e-12));
        CHECK(l1[i] == doctest::Approx(eval_spline(space, c, Y[i], 1)).epsilon(1e-12));
    }
    const Eigen::VectorXd b0 = B.multiply(psi0), b1 = B.multiply(psi1);
    for (std::size_t i = 0; i < Z.size(); ++i) {
        const double s = eval_spline(space, c, Z[i].point);
        CHECK(b0[i] == doctest::Approx(Z[i].normal[0] * s).epsilon(1e-12));
        CHECK(b1[i] == doctest::Approx(Z[i].normal[1] * s).epsilon(1e-12));
    }

    Eigen::VectorXd grev = Eigen::VectorXd::Zero(2 * space.n_coeff);
    grev.head(space.n_coeff) = greville_coefficients(space, 0);
    grev.tail(space.n_coeff) = greville_coefficients(space, 1);
    const Eigen::VectorXd div = L.multiply(grev);
    for (int i = 0; i < div.size(); ++i) CHECK(std::abs(div[i] - 2.0) <= 1e-10);
    const Eigen::VectorXd btr = B.multiply(grev);
    for (std::size_t i = 0; i < Z.size(); ++i)
        CHECK(std::abs(btr[i] - Z[i].normal.dot(Z[i].point)) <= 1e-10);
}
