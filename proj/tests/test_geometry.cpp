#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fd3m/errors.hpp"
#include "fd3m/geometry.hpp"

using namespace fd3m;

namespace {

void check_bounds(const Subdomain& s, std::vector<double> lo, std::vector<double> hi) {
    for (std::size_t j = 0; j < lo.size(); ++j) {
        CHECK(std::abs(s.lo[j] - lo[j]) <= 1e-12);
        CHECK(std::abs(s.hi[j] - hi[j]) <= 1e-12);
    }
}

} // namespace

TEST_CASE("strips: 1D N=5 w=0.2 hand-derived bounds") {
    auto d = decompose_strips(BoxDomain::interval(-1, 1), 5, 0.2, 0);
    REQUIRE(d.size() == 5);
    check_bounds(d.subdomains[0], {-1.0}, {-0.5});
    check_bounds(d.subdomains[1], {-0.7}, {-0.1});
    check_bounds(d.subdomains[2], {-0.3}, {0.3});
    check_bounds(d.subdomains[3], {0.1}, {0.7});
    check_bounds(d.subdomains[4], {0.5}, {1.0});
}

TEST_CASE("strips: 1D N=2 w=0.2, overlap and interfaces") {
    auto d = decompose_strips(BoxDomain::interval(-1, 1), 2, 0.2, 0);
    check_bounds(d.subdomains[0], {-1.0}, {0.1});
    check_bounds(d.subdomains[1], {-0.1}, {1.0});
    CHECK(std::abs(d.subdomains[0].hi[0] - d.subdomains[1].lo[0] - 0.2) < 1e-15);
    CHECK(d.subdomains[0].neighbors == std::vector<int>{1});
    CHECK(d.subdomains[1].neighbors == std::vector<int>{0});
    REQUIRE(d.subdomains[0].interface_faces.size() == 1);
    CHECK(d.subdomains[0].interface_faces[0].coord == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.subdomains[1].interface_faces[0].coord == doctest::Approx(-0.1).epsilon(1e-12));
    // endpoint sides on the domain boundary are exterior
    CHECK(d.subdomains[0].sides[0].kind == SideKind::exterior);
    CHECK(d.subdomains[0].sides[1].kind == SideKind::interface);
}

TEST_CASE("strips: 2D strips keep full transverse extent") {
    auto d = decompose_strips(BoxDomain::square(-1, 1), 5, 0.2, 0);
    for (const auto& s : d.subdomains) {
        CHECK(s.lo[1] == -1.0);
        CHECK(s.hi[1] == 1.0);
        CHECK(s.sides[2].kind == SideKind::exterior);
        CHECK(s.sides[3].kind == SideKind::exterior);
    }
    CHECK(d.subdomains[2].neighbors == std::vector<int>{1, 3});
}

TEST_CASE("grid: 4x2 hand-derived corner subdomain") {
    auto d = decompose_grid(BoxDomain::square(-1, 1), 4, 2, 0.25, 0.5);
    REQUIRE(d.size() == 8);
    check_bounds(d.subdomains[0], {-1.0, -1.0}, {-0.375, 0.25});
    CHECK(d.subdomains[0].neighbors == std::vector<int>{1, 4, 5});

    // the diagonal neighbor contributes face segments on two sides
    int diag_faces = 0;
    for (const auto& f : d.subdomains[0].interface_faces)
        if (f.neighbor == 5) ++diag_faces;
    CHECK(diag_faces == 2);

    // right side of subdomain 0 splits into single- and double-covered parts
    const auto& right = d.subdomains[0].sides[1];
    REQUIRE(right.kind == SideKind::interface);
    REQUIRE(right.segments.size() == 2);
    CHECK(right.segments[0].owners == std::vector<int>{1});
    CHECK(right.segments[1].owners == std::vector<int>{1, 5});
    CHECK(right.segments[0].t_hi == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("grid: 8x1 degenerates to strips") {
    auto g = decompose_grid(BoxDomain::square(-1, 1), 8, 1, 0.125, 0.125);
    auto s = decompose_strips(BoxDomain::square(-1, 1), 8, 0.125, 0);
    REQUIRE(g.size() == s.size());
    for (int i = 0; i < g.size(); ++i) {
        CHECK(g.subdomains[i].lo == s.subdomains[i].lo);
        CHECK(g.subdomains[i].hi == s.subdomains[i].hi);
        CHECK(g.subdomains[i].neighbors == s.subdomains[i].neighbors);
    }
}

TEST_CASE("overlap too large is rejected") {
    CHECK_THROWS_AS(decompose_strips(BoxDomain::interval(-1, 1), 5, 0.41, 0), ConfigError);
    CHECK_THROWS_AS(decompose_strips(BoxDomain::interval(-1, 1), 2, -0.1, 0), ConfigError);
}

TEST_CASE("coverage: random points always belong to some subdomain") {
    auto d = decompose_grid(BoxDomain::square(-1, 1), 4, 2, 0.25, 0.5);
    RngStream rng(77);
    for (int t = 0; t < 10000; ++t) {
        Eigen::VectorXd x(2);
        x << rng.uniform(-1, 1), rng.uniform(-1, 1);
        CHECK(!d.containing(x).empty());
    }
}

TEST_CASE("neighbor relation is symmetric; interfaces live inside the neighbor") {
    auto d = decompose_grid(BoxDomain::square(-1, 1), 4, 2, 0.25, 0.5);
    for (const auto& s : d.subdomains) {
        for (int j : s.neighbors) {
            const auto& nb = d.subdomains[j].neighbors;
            CHECK(std::find(nb.begin(), nb.end(), s.index) != nb.end());
        }
        for (const auto& f : s.interface_faces) {
            const auto& o = d.subdomains[f.neighbor];
            CHECK(f.coord > o.lo[f.axis]);
            CHECK(f.coord < o.hi[f.axis]);
        }
    }
}

TEST_CASE("distance function: zero on faces, interior values, 1D specialization") {
    auto d = decompose_strips(BoxDomain::square(-1, 1), 2, 0.2, 0);
    DistanceFunction D = distance_function(d.subdomains[0]);
    // edges of [-1,0.1]x[-1,1]
    Eigen::VectorXd e1(2), e2(2), c(2);
    e1 << -1.0, 0.33;
    e2 << -0.77, 1.0;
    CHECK(D.value(e1) == 0.0);
    CHECK(D.value(e2) == 0.0);

    DistanceFunction unit{Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0)};
    c << 0.0, 0.0;
    CHECK(unit.value(c) == 1.0);

    DistanceFunction one_d{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 2.0)};
    Eigen::VectorXd x1(1);
    x1 << 1.0;
    CHECK(one_d.value(x1) == -1.0);

    // jet vs hand derivatives of (x-a)(x-b)
    Jet j = one_d.jet(x1);
    CHECK(j.grad[0] == doctest::Approx(2 * 1.0 - 0.0 - 2.0));
    CHECK(j.lap_diag[0] == 2.0);
}

TEST_CASE("sample_uniform: membership, mean, determinism") {
    auto d = decompose_strips(BoxDomain::interval(-1, 1), 2, 0.2, 0);
    RngStream a = RngStream::derive(42, "colloc", 0);
    RngStream b = RngStream::derive(42, "colloc", 0);
    auto p1 = sample_uniform(d.subdomains[0], 4000, a);
    auto p2 = sample_uniform(d.subdomains[0], 4000, b);
    CHECK(p1 == p2);
    for (int i = 0; i < p1.rows(); ++i) {
        CHECK(p1(i, 0) >= -1.0);
        CHECK(p1(i, 0) <= 0.1);
    }

    RngStream big(7);
    auto pts = sample_uniform_box(Eigen::VectorXd::Constant(1, -1.0),
                                  Eigen::VectorXd::Constant(1, 1.0), 100000, big);
    CHECK(std::abs(pts.col(0).mean()) < 0.01);
}

TEST_CASE("test_grid: endpoints, counts, spacing") {
    auto g3 = test_grid(BoxDomain::interval(-1, 1), {3});
    REQUIRE(g3.rows() == 3);
    CHECK(g3(0, 0) == -1.0);
    CHECK(g3(1, 0) == 0.0);
    CHECK(g3(2, 0) == 1.0);

    auto g = test_grid(BoxDomain::square(-1, 1), {121, 121});
    REQUIRE(g.rows() == 14641);
    CHECK(g(0, 0) == -1.0);
    CHECK(g(0, 1) == -1.0);
    CHECK(g(14640, 0) == 1.0);
    CHECK(g(14640, 1) == 1.0);
    // spacing = extent/(n-1)
    const double h = 2.0 / 120;
    CHECK(std::abs(g(1, 1) - g(0, 1) - h) < 1e-15);
}

TEST_CASE("decomposition golden files") {
    struct Case {
        const char* name;
        Decomposition d;
    };
    const Case cases[] = {
        {"decomp_1d_n5.json", decompose_strips(BoxDomain::interval(-1, 1), 5, 0.2, 0)},
        {"decomp_2d_strips_n2.json", decompose_strips(BoxDomain::square(-1, 1), 2, 0.2, 0)},
        {"decomp_2d_strips_n5.json", decompose_strips(BoxDomain::square(-1, 1), 5, 0.2, 0)},
        {"decomp_2d_strips_8x1.json", decompose_grid(BoxDomain::square(-1, 1), 8, 1, 0.125, 0.125)},
        {"decomp_2d_grid_4x2.json", decompose_grid(BoxDomain::square(-1, 1), 4, 2, 0.25, 0.5)},
    };
    for (const auto& c : cases) {
        CAPTURE(c.name);
        const std::string path = std::string(FD3M_GOLDEN_DIR) + "/" + c.name;
        std::ifstream in(path);
        REQUIRE_MESSAGE(in.good(), "missing golden file; regenerate with tools/fd3m dump-decomposition");
        std::stringstream want;
        want << in.rdbuf();
        CHECK(decomposition_to_json(c.d) == want.str());
    }
}
