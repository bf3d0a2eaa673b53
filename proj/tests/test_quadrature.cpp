#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfq/bspline.hpp"
#include "mfq/geometry.hpp"
#include "mfq/nodegen.hpp"
#include "mfq/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace mfq;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<BoundarySample<2>> circle_samples(int n) {
    std::vector<BoundarySample<2>> Z(n);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        Z[i].point = Pt<2>(std::cos(t), std::sin(t));
        Z[i].normal = Z[i].point;
    }
    return Z;
}

// Collects the full dense row r of A for inspection.
Eigen::VectorXd dense_row(const SparseMatrix& A, int r) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(A.cols());
    for (int t = 0; t < A.row_nnz(r); ++t) row[A.row_cols(r)[t]] = A.row_vals(r)[t];
    return row;
}

}  // namespace

TEST_CASE("enum names round-trip") {
    CHECK(method_from_name(method_name(Method::BSP)) == Method::BSP);
    CHECK(operator_from_name(operator_name(OperatorPair::Elliptic)) == OperatorPair::Elliptic);
    for (const auto k :
         {ConstraintKind::BoundaryConstant, ConstraintKind::InteriorConstant,
          ConstraintKind::Combined, ConstraintKind::FundamentalSolution, ConstraintKind::Both})
        CHECK(constraint_from_name(constraint_name(k)) == k);
    CHECK_THROWS_AS(method_from_name("fem"), std::invalid_argument);
    CHECK_THROWS_AS(constraint_from_name("none"), std::invalid_argument);
}

TEST_CASE("constraint rows carry the literal signs and moments") {
    const auto dom = make_domain2("ellipse");
    const int n_y = 3, n_z = 4, m = 5;
    const std::vector<Pt<2>> Y = {Pt<2>(0.0, 0.0), Pt<2>(0.1, 0.0), Pt<2>(0.0, 0.1)};
    auto Z = circle_samples(n_z);
    for (auto& zs : Z) zs.point *= 0.99;
    SparseMatrix L(n_y, m), B(n_z, m);
    L.finalize();
    B.finalize();

    const double area = *dom->measure_interior;
    const double blen = *dom->measure_boundary;

    SUBCASE("boundary constant") {
        const auto sys = build_system<2>(L, B, make_constraint(*dom, ConstraintKind::BoundaryConstant),
                                         Y, Z, *dom);
        REQUIRE(sys.A.rows() == 1);
        CHECK(sys.rows_pruned == m);
        CHECK(sys.row_map == std::vector<int>{m});
        const Eigen::VectorXd row = dense_row(sys.A, 0);
        CHECK(row.head(n_y).cwiseAbs().maxCoeff() == 0.0);
        CHECK((row.tail(n_z).array() + 1.0).abs().maxCoeff() == 0.0);
        CHECK(sys.b[0] == -blen);
    }
    SUBCASE("interior constant") {
        const auto sys = build_system<2>(L, B, make_constraint(*dom, ConstraintKind::InteriorConstant),
                                         Y, Z, *dom);
        REQUIRE(sys.A.rows() == 1);
        const Eigen::VectorXd row = dense_row(sys.A, 0);
        CHECK((row.head(n_y).array() - 1.0).abs().maxCoeff() == 0.0);
        CHECK(row.tail(n_z).cwiseAbs().maxCoeff() == 0.0);
        CHECK(sys.b[0] == area);
    }
    SUBCASE("combined") {
        const auto sys =
            build_system<2>(L, B, make_constraint(*dom, ConstraintKind::Combined), Y, Z, *dom);
        REQUIRE(sys.A.rows() == 1);
        const Eigen::VectorXd row = dense_row(sys.A, 0);
        CHECK((row.head(n_y).array() - 1.0).abs().maxCoeff() == 0.0);
        CHECK((row.tail(n_z).array() - 1.0).abs().maxCoeff() == 0.0);
        CHECK(sys.b[0] == area + blen);
    }
    SUBCASE("both") {
        const auto sys =
            build_system<2>(L, B, make_constraint(*dom, ConstraintKind::Both), Y, Z, *dom);
        REQUIRE(sys.A.rows() == 2);
        CHECK(sys.row_map == std::vector<int>{m, m + 1});
        const Eigen::VectorXd r0 = dense_row(sys.A, 0);
        const Eigen::VectorXd r1 = dense_row(sys.A, 1);
        CHECK((r0.head(n_y).array() - 1.0).abs().maxCoeff() == 0.0);
        CHECK(r0.tail(n_z).cwiseAbs().maxCoeff() == 0.0);
        CHECK(sys.b[0] == area);
        CHECK(r1.head(n_y).cwiseAbs().maxCoeff() == 0.0);
        CHECK((r1.tail(n_z).array() + 1.0).abs().maxCoeff() == 0.0);
        CHECK(sys.b[1] == -blen);
    }
    SUBCASE("fundamental solution") {
        const auto spec = make_constraint(*dom, ConstraintKind::FundamentalSolution);
        const auto sys = build_system<2>(L, B, spec, Y, Z, *dom);
        REQUIRE(sys.A.rows() == 1);
        const Eigen::VectorXd row = dense_row(sys.A, 0);
        CHECK(row.head(n_y).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < n_z; ++i)
            CHECK(row[n_y + i] ==
                  -fundamental_ghat<2>(Z[i].point, Z[i].normal, spec.x0));
        CHECK(sys.b[0] == -1.0);
    }
    SUBCASE("mismatched shapes throw") {
        SparseMatrix bad(n_y + 1, m);
        bad.finalize();
        CHECK_THROWS_AS(build_system<2>(bad, B, make_constraint(*dom, ConstraintKind::Combined),
                                        Y, Z, *dom),
                        std::invalid_argument);
        SparseMatrix wide(n_z, m + 1);
        wide.finalize();
        CHECK_THROWS_AS(build_system<2>(L, wide, make_constraint(*dom, ConstraintKind::Combined),
                                        Y, Z, *dom),
                        std::invalid_argument);
    }
}

TEST_CASE("the fundamental kernel normal derivative has the free-space form") {
    const Pt<2> x0(0.1, -0.2);
    const Pt<2> z(0.1 + 0.5, -0.2);
    const Pt<2> radial(1.0, 0.0), tangent(0.0, 1.0);
    CHECK(fundamental_ghat<2>(z, radial, x0) ==
          doctest::Approx(1.0 / (2.0 * kPi * 0.5)).epsilon(1e-14));
    CHECK(std::abs(fundamental_ghat<2>(z, tangent, x0)) <= 1e-16);

    const Pt<3> y0(0.0, 0.0, 0.0);
    const Pt<3> z3(0.0, 0.0, 2.0);
    const Pt<3> rad3(0.0, 0.0, 1.0), tan3(1.0, 0.0, 0.0);
    CHECK(fundamental_ghat<3>(z3, rad3, y0) ==
          doctest::Approx(1.0 / (4.0 * kPi * 4.0)).epsilon(1e-14));
    CHECK(std::abs(fundamental_ghat<3>(z3, tan3, y0)) <= 1e-16);
    CHECK_THROWS_AS(fundamental_ghat<3>(y0, rad3, y0), std::domain_error);

    // Green's identity: the normal derivative of the kernel integrates to one
    // over any boundary enclosing x0; midpoint quadrature on the circle is
    // spectrally accurate.
    const auto Z = circle_samples(400);
    double total = 0.0;
    for (const auto& zs : Z)
        total += fundamental_ghat<2>(zs.point, zs.normal, Pt<2>(0.3, 0.1)) * (2.0 * kPi / 400);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constraint validation rejects missing measures and exterior centers") {
    const auto cassini = make_domain2("cassini");
    CHECK_THROWS_AS(make_constraint(*cassini, ConstraintKind::BoundaryConstant),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_constraint(*cassini, ConstraintKind::InteriorConstant),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_constraint(*cassini, ConstraintKind::Combined), std::invalid_argument);
    CHECK_THROWS_AS(make_constraint(*cassini, ConstraintKind::Both), std::invalid_argument);
    CHECK_NOTHROW(make_constraint(*cassini, ConstraintKind::FundamentalSolution));

    const auto ellipse = make_domain2("ellipse");
    const auto spec = make_constraint(*ellipse, ConstraintKind::FundamentalSolution);
    CHECK(spec.x0 == ellipse->x0);
    CHECK_THROWS_AS(make_constraint(*ellipse, ConstraintKind::FundamentalSolution,
                                    std::optional<Pt<2>>(Pt<2>(2.0, 0.0))),
                    std::invalid_argument);
    CHECK_NOTHROW(make_constraint(*ellipse, ConstraintKind::FundamentalSolution,
                                  std::optional<Pt<2>>(Pt<2>(0.5, 0.0))));
}

TEST_CASE("boundary-constant rules integrate the boundary measure exactly") {
    const auto dom = make_domain2("ellipse");
    const auto nodes = advancing_front(*dom, 0.1, 1);
    for (const Method method : {Method::MFD, Method::BSP}) {
        WeightsOptions<2> opt;
        opt.method = method;
        opt.q = 4;
        const QuadratureRule rule = compute_weights(*dom, nodes, opt);
        CHECK(rule.residual_inf <= 1e-10 * std::max(1.0, *dom->measure_boundary));
        CHECK(rule.v.sum() ==
              doctest::Approx(*dom->measure_boundary).epsilon(1e-10));
        CHECK(rule.w.size() == nodes.n_Y());
        CHECK(rule.v.size() == nodes.n_Z());
        CHECK(rule.K_w == doctest::Approx(rule.w.lpNorm<1>() / *dom->measure_interior));
        CHECK(rule.K_v == doctest::Approx(rule.v.lpNorm<1>() / *dom->measure_boundary));
        CHECK(rule.K_w_normalized);
        CHECK(rule.K_v_normalized);
        CHECK(rule.numeric_rank > 0);
        CHECK(rule.path == SolverPath::RankRevealingQR);
    }
}

TEST_CASE("rules annihilate every discretized divergence pair") {
    const auto dom = make_domain2("ellipse");
    const auto nodes = advancing_front(*dom, 0.1, 2);
    WeightsOptions<2> opt;
    opt.method = Method::BSP;
    opt.q = 4;
    const QuadratureRule rule = compute_weights(*dom, nodes, opt);

    const auto space = make_spline_space(*dom, nodes.h, opt.q);
    const auto Y = nodes.quadrature_nodes();
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd c0(space.n_coeff), c1(space.n_coeff);
        for (int j = 0; j < space.n_coeff; ++j) {
            c0[j] = 2.0 * hash01(900 + trial, j) - 1.0;
            c1[j] = 2.0 * hash01(950 + trial, j) - 1.0;
        }
        Eigen::VectorXd f(Y.size());
        for (std::size_t i = 0; i < Y.size(); ++i)
            f[i] = eval_spline(space, c0, Y[i], 0) + eval_spline(space, c1, Y[i], 1);
        Eigen::VectorXd g(nodes.boundary.size());
        double gscale = 0.0;
        for (std::size_t i = 0; i < nodes.boundary.size(); ++i) {
            const auto& zs = nodes.boundary[i];
            g[i] = zs.normal[0] * eval_spline(space, c0, zs.point) +
                   zs.normal[1] * eval_spline(space, c1, zs.point);
            gscale = std::max(gscale, std::abs(g[i]));
        }
        const double err = apply_rule(rule, &f, &g);
        const double scale = rule.w.lpNorm<1>() * f.cwiseAbs().maxCoeff() +
                             rule.v.lpNorm<1>() * gscale;
        CHECK(std::abs(err) <= 1e-9 * scale);
    }
}

TEST_CASE("the boundary weights integrate the Green kernel to one") {
    const auto dom = make_domain2("ellipse");
    const auto nodes = advancing_front(*dom, 0.05, 1);
    WeightsOptions<2> opt;
    opt.method = Method::MFD;
    opt.q = 4;
    const QuadratureRule rule = compute_weights(*dom, nodes, opt);
    Eigen::VectorXd ghat(nodes.boundary.size());
    for (std::size_t i = 0; i < nodes.boundary.size(); ++i)
        ghat[i] = fundamental_ghat<2>(nodes.boundary[i].point, nodes.boundary[i].normal,
                                      dom->x0);
    CHECK(rule.v.dot(ghat) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("weights are independent of the source ordering") {
    const auto dom = make_domain2("ellipse");
    const auto nodes = advancing_front(*dom, 0.1, 3);
    const auto X = make_X(*dom, nodes.h, nodes.seed).quadrature_nodes();
    std::vector<Pt<2>> rev(X.rbegin(), X.rend());

    WeightsOptions<2> opt;
    opt.method = Method::MFD;
    opt.q = 4;
    const QuadratureRule a = compute_weights(*dom, nodes, opt, &X);
    const QuadratureRule b = compute_weights(*dom, nodes, opt, &rev);
    CHECK((a.w - b.w).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((a.v - b.v).cwiseAbs().maxCoeff() <= 1e-10);

    const QuadratureRule dflt = compute_weights(*dom, nodes, opt);
    CHECK((a.w - dflt.w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stability constants stay near one on smooth domains") {
    WeightsOptions<2> opt;
    opt.q = 4;
    for (const char* name : {"ellipse", "disk-sector"}) {
        const auto dom = make_domain2(name);
        for (const std::uint64_t seed : {1ULL, 2ULL}) {
            const auto nodes = advancing_front(*dom, 0.05, seed);
            for (const Method method : {Method::MFD, Method::BSP}) {
                opt.method = method;
                const QuadratureRule rule = compute_weights(*dom, nodes, opt);
                INFO(name, " seed ", seed, " method ", method_name(method));
                CHECK(rule.K_w <= 5.0);
                CHECK(rule.K_v <= 1.2);
            }
        }
    }
}

TEST_CASE("the discrete incompatibility diagnostic separates consistent pairs") {
    const auto dom = make_domain2("ellipse");
    const auto nodes = advancing_front(*dom, 0.15, 1);
    const auto Y = nodes.quadrature_nodes();
    const auto& Z = nodes.boundary;
    const auto X = make_X(*dom, nodes.h, nodes.seed).quadrature_nodes();
    const KdTree<2> xtree(X);
    const SparseMatrix L = assemble_L_div(xtree, Y, 4);
    const SparseMatrix B = assemble_B_normal(xtree, Z, 4);

    Eigen::VectorXd f_ok(Y.size()), g_ok(Z.size());
    for (std::size_t i = 0; i < Y.size(); ++i) f_ok[i] = 2.0;
    for (std::size_t i = 0; i < Z.size(); ++i) g_ok[i] = Z[i].normal.dot(Z[i].point);
    CHECK_FALSE(check_discrete_incompatibility(L, B, f_ok, g_ok));

    Eigen::VectorXd f_bad = Eigen::VectorXd::Ones(Y.size());
    Eigen::VectorXd g_bad = Eigen::VectorXd::Zero(Z.size());
    CHECK(check_discrete_incompatibility(L, B, f_bad, g_bad));

    Eigen::VectorXd short_f(2);
    short_f.setZero();
    CHECK_THROWS_AS(check_discrete_incompatibility(L, B, short_f, g_ok), std::invalid_argument);
}

TEST_CASE("impossible configurations are refused with a code") {
    const auto dom = make_domain2("ellipse");
    WeightsOptions<2> opt;
    opt.method = Method::MFD;

    const auto coarse = advancing_front(*dom, 0.3, 1);
    opt.q = 6;
    try {
        compute_weights(*dom, coarse, opt);
        FAIL("expected a refusal");
    } catch (const RefusalError& e) {
        CHECK(e.code() == "stencil-exceeds-sources");
    }

    const auto nodes = advancing_front(*dom, 0.15, 1);
    opt.q = 4;
    opt.x_ratio = 0.5;
    try {
        compute_weights(*dom, nodes, opt);
        FAIL("expected a refusal");
    } catch (const RefusalError& e) {
        CHECK(e.code() == "overdetermined");
    }
}

TEST_CASE("invalid configurations throw") {
    const auto dom = make_domain2("ellipse");
    const auto nodes = advancing_front(*dom, 0.15, 1);
    WeightsOptions<2> opt;
    opt.method = Method::BSP;
    opt.op = OperatorPair::Elliptic;
    CHECK_THROWS_AS(compute_weights(*dom, nodes, opt), std::invalid_argument);

    NodeSet<2> empty;
    empty.h = 0.1;
    CHECK_THROWS_AS(compute_weights(*dom, empty, WeightsOptions<2>{}), std::invalid_argument);

    WeightsOptions<2> ok;
    const QuadratureRule rule = compute_weights(*dom, nodes, ok);
    Eigen::VectorXd wrong(3);
    wrong.setZero();
    CHECK_THROWS_AS(apply_rule(rule, &wrong, nullptr), std::invalid_argument);
    CHECK_THROWS_AS(apply_rule(rule, nullptr, &wrong), std::invalid_argument);
    CHECK(apply_rule(rule, nullptr, nullptr) == 0.0);
}

TEST_CASE("apply_rule combines the two weighted sums") {
    QuadratureRule rule;
    rule.w = Eigen::Vector2d(1.0, 2.0);
    rule.v = Eigen::VectorXd::Constant(1, 3.0);
    Eigen::VectorXd f(2), g(1);
    f << 10.0, 20.0;
    g << 5.0;
    CHECK(apply_rule(rule, &f, &g) == doctest::Approx(35.0));
    CHECK(apply_rule(rule, &f, nullptr) == doctest::Approx(50.0));
    CHECK(apply_rule(rule, nullptr, &g) == doctest::Approx(-15.0));
}

TEST_CASE("the elliptic pair collocates on the quadrature nodes themselves") {
    const auto dom = make_domain2("ellipse");
    const auto nodes = advancing_front(*dom, 0.1, 1);
    WeightsOptions<2> opt;
    opt.method = Method::MFD;
    opt.op = OperatorPair::Elliptic;
    opt.q = 4;
    const QuadratureRule rule = compute_weights(*dom, nodes, opt);
    CHECK(rule.n_sources == nodes.n_Y());
    CHECK(rule.residual_inf <= 1e-9 * (1.0 + *dom->measure_boundary));
    CHECK(rule.v.sum() == doctest::Approx(*dom->measure_boundary).epsilon(1e-9));
}

TEST_CASE("weight CSV files carry the rule header and one row per node") {
    const auto dom = make_domain2("ellipse");
    const auto nodes = advancing_front(*dom, 0.15, 4);
    WeightsOptions<2> opt;
    opt.q = 4;
    const QuadratureRule rule = compute_weights(*dom, nodes, opt);
    const std::string path = "/tmp/mfq_weights_test.csv";
    write_weights_csv(path, rule, nodes);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    std::stringstream head(line);
    std::string tok;
    std::getline(head, tok, ',');
    CHECK(tok == "mfd");
    std::getline(head, tok, ',');
    CHECK(tok == "4");
    std::getline(head, tok, ',');
    CHECK(std::strtod(tok.c_str(), nullptr) == 0.15);

    int n_interior = 0, n_boundary = 0;
    double wsum = 0.0, vsum = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string kind, x, y, weight;
        std::getline(row, kind, ',');
        std::getline(row, x, ',');
        std::getline(row, y, ',');
        std::getline(row, weight, ',');
        if (kind == "interior") {
            wsum += std::strtod(weight.c_str(), nullptr);
            ++n_interior;
        } else {
            REQUIRE(kind == "boundary");
            vsum += std::strtod(weight.c_str(), nullptr);
            ++n_boundary;
        }
    }
    CHECK(n_interior == nodes.n_Y());
    CHECK(n_boundary == nodes.n_Z());
    CHECK(wsum == doctest::Approx(rule.w.sum()).epsilon(1e-14));
    CHECK(vsum == doctest::Approx(rule.v.sum()).epsilon(1e-14));

    NodeSet<2> other = advancing_front(*dom, 0.2, 4);
    CHECK_THROWS_AS(write_weights_csv(path, rule, other), std::invalid_argument);
    std::remove(path.c_str());
}
