#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fd3m/autodiff.hpp"
#include "fd3m/errors.hpp"
#include "fd3m/network.hpp"
#include "fd3m/rng.hpp"

using namespace fd3m;

TEST_CASE("rff_map: zero matrix gives [1, 1, x, 0, 0]") {
    FourierFeatureMap ff;
    ff.B = Eigen::MatrixXd::Zero(2, 1);
    Eigen::VectorXd x(1);
    x << 0.7;
    Eigen::VectorXd out = rff_map(ff, x);
    REQUIRE(out.size() == 5);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 1.0);
    CHECK(out[2] == 0.7);
    CHECK(out[3] == 0.0);
    CHECK(out[4] == 0.0);
}

TEST_CASE("rff_map: quarter-period entry") {
    FourierFeatureMap ff;
    ff.B = Eigen::MatrixXd::Constant(1, 1, 0.25);
    Eigen::VectorXd x(1);
    x << 1.0;
    Eigen::VectorXd out = rff_map(ff, x); // [cos(pi/2), 1, sin(pi/2)]
    REQUIRE(out.size() == 3);
    CHECK(out[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(out[1] == 1.0);
    CHECK(out[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rff_map: trig blocks bounded, middle entries exact") {
    RngStream rng(1);
    FourierFeatureMap ff;
    ff.B = Eigen::MatrixXd::NullaryExpr(7, 2, [&](Eigen::Index, Eigen::Index) {
        return rng.normal(0.0, 10.0);
    });
    for (int t = 0; t < 50; ++t) {
        Eigen::VectorXd x(2);
        x << rng.uniform(-5, 5), rng.uniform(-5, 5);
        Eigen::VectorXd out = rff_map(ff, x);
        REQUIRE(out.size() == 2 * 7 + 2);
        CHECK(out.head(7).cwiseAbs().maxCoeff() <= 1.0);
        CHECK(out.tail(7).cwiseAbs().maxCoeff() <= 1.0);
        CHECK(out[7] == x[0]);
        CHECK(out[8] == x[1]);
    }
    Eigen::VectorXd bad(3);
    bad.setZero();
    CHECK_THROWS_AS(rff_map(ff, bad), std::invalid_argument);
}

TEST_CASE("mffnet_forward: head selecting one entry / constant head") {
    MffSpec spec;
    spec.input = 1;
    spec.hidden_layers = 1;
    spec.width = 4;
    spec.sigmas = {1.0};
    spec.normalizer = InputNormalizer::identity(1);
    MffNet net = init_network(spec, InitScheme::kaiming, 5);

    Eigen::VectorXd x(1);
    x << 0.37;
    // head picks the first concat entry
    net.head.W.setZero();
    net.head.W(0, 0) = 1.0;
    net.head.b.setZero();
    JetBatch gamma = rff_forward_jet_batch(net.subnets[0].features, net.normalizer, x.transpose(), 0);
    JetBatch h = mlp_forward_jet_batch(net.subnets[0].mlp, gamma, nullptr);
    CHECK(mffnet_forward(net, x) == h.val(0, 0));

    // all-zero head weights give the constant bias
    net.head.W.setZero();
    net.head.b[0] = 4.2;
    CHECK(mffnet_forward(net, x) == 4.2);
    Eigen::VectorXd y(1);
    y << -0.9;
    CHECK(mffnet_forward(net, y) == 4.2);
}

TEST_CASE("mffnet_forward: re-evaluation is reproducible to the bit") {
    MffSpec spec;
    spec.input = 2;
    spec.hidden_layers = 2;
    spec.width = 6;
    spec.sigmas = {1.0, 20.0};
    spec.normalizer = InputNormalizer::identity(2);
    MffNet net = init_network(spec, InitScheme::xavier, 123);
    RngStream rng(9);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd x(2);
        x << rng.uniform(-1, 1), rng.uniform(-1, 1);
        CHECK(mffnet_forward(net, x) == mffnet_forward(net, x));
    }
}

TEST_CASE("init_network: same seed twice is bitwise identical") {
    MffSpec spec;
    spec.input = 2;
    spec.hidden_layers = 2;
    spec.width = 5;
    spec.sigmas = {1.0, 5.0};
    spec.normalizer = InputNormalizer::identity(2);
    MffNet a = init_network(spec, InitScheme::kaiming, 777);
    MffNet b = init_network(spec, InitScheme::kaiming, 777);
    for (std::size_t n = 0; n < a.subnets.size(); ++n) {
        CHECK(a.subnets[n].features.B == b.subnets[n].features.B);
        for (std::size_t l = 0; l < a.subnets[n].mlp.layers.size(); ++l) {
            CHECK(a.subnets[n].mlp.layers[l].W == b.subnets[n].mlp.layers[l].W);
            CHECK(a.subnets[n].mlp.layers[l].b == b.subnets[n].mlp.layers[l].b);
        }
    }
    CHECK(a.head.W == b.head.W);
}

TEST_CASE("init_network: kaiming weight variance near 2/fan_in") {
    MlpSpec spec;
    spec.input = 100;
    spec.hidden = {1000};
    spec.output = 1;
    MlpParams net = init_network(spec, InitScheme::kaiming, 2024);
    const auto& W = net.layers[0].W; // 1000 x 100 = 1e5 samples
    const double mean = W.mean();
    const double var = (W.array() - mean).square().sum() / (W.size() - 1);
    CHECK(std::abs(var - 0.02) < 0.1 * 0.02);

    MlpParams xnet = init_network(spec, InitScheme::xavier, 2024);
    const auto& XW = xnet.layers[0].W;
    const double xvar = (XW.array() - XW.mean()).square().sum() / (XW.size() - 1);
    const double want = 2.0 / (100 + 1000);
    CHECK(std::abs(xvar - want) < 0.1 * want);
    CHECK(net.layers[0].b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("init_network: B sampled with the requested sigma") {
    MffSpec spec;
    spec.input = 2;
    spec.hidden_layers = 1;
    spec.width = 10;
    spec.fourier_rows = 5000; // 1e4 entries per B
    spec.sigmas = {30.0, 1.0};
    spec.normalizer = InputNormalizer::identity(2);
    MffNet net = init_network(spec, InitScheme::kaiming, 31);
    for (std::size_t n = 0; n < 2; ++n) {
        const auto& B = net.subnets[n].features.B;
        const double sd = std::sqrt((B.array() - B.mean()).square().sum() / (B.size() - 1));
        CHECK(std::abs(sd - spec.sigmas[n]) < 0.05 * spec.sigmas[n]);
    }
}

TEST_CASE("init_network: unknown scheme tag rejected") {
    CHECK_THROWS_AS(parse_init_scheme("glorot-uniform"), ConfigError);
    CHECK(parse_init_scheme("kaiming") == InitScheme::kaiming);
    CHECK(parse_init_scheme("xavier") == InitScheme::xavier);
}

TEST_CASE("B matrices carry no gradient entries") {
    MffSpec spec;
    spec.input = 1;
    spec.hidden_layers = 1;
    spec.width = 4;
    spec.sigmas = {1.0, 7.0};
    spec.normalizer = InputNormalizer::identity(1);
    MffNet net = init_network(spec, InitScheme::kaiming, 8);
    ParamGradient g = zero_gradient(net);
    CHECK(g.tensors.size() == 2 * 1 * 2 + 2); // per-subnet layer pairs + head pair
    long params = 0;
    for (const auto& t : g.tensors) params += t.size();
    long expected = 0;
    for (const auto& s : net.subnets)
        for (const auto& l : s.mlp.layers) expected += l.W.size() + l.b.size();
    expected += net.head.W.size() + net.head.b.size();
    CHECK(params == expected); // no room for B entries
}

TEST_CASE("input normalizer maps box corners to +-1 exactly") {
    Eigen::VectorXd lo(2), hi(2);
    lo << -0.7, -0.3;
    hi << -0.1, 0.9;
    InputNormalizer n = InputNormalizer::for_box(lo, hi);
    CHECK(n.map(0, -0.7) == -1.0);
    CHECK(n.map(0, -0.1) == 1.0);
    CHECK(n.map(1, -0.3) == -1.0);
    CHECK(n.map(1, 0.9) == 1.0);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
    MffSpec spec;
    spec.input = 2;
    spec.hidden_layers = 2;
    spec.width = 7;
    spec.sigmas = {1.0, 10.0};
    spec.normalizer = InputNormalizer::identity(2);
    MffNet net = init_network(spec, InitScheme::xavier, 55);
    const std::string path = (std::filesystem::temp_directory_path() / "fd3m_ckpt_test.json").string();
    save_checkpoint(net, path);
    MffNet back = load_mffnet_checkpoint(path);
    REQUIRE(back.subnets.size() == net.subnets.size());
    for (std::size_t n = 0; n < net.subnets.size(); ++n) {
        CHECK(back.subnets[n].features.B == net.subnets[n].features.B);
        CHECK(back.subnets[n].features.sigma == net.subnets[n].features.sigma);
        for (std::size_t l = 0; l < net.subnets[n].mlp.layers.size(); ++l) {
            CHECK(back.subnets[n].mlp.layers[l].W == net.subnets[n].mlp.layers[l].W);
            CHECK(back.subnets[n].mlp.layers[l].b == net.subnets[n].mlp.layers[l].b);
        }
    }
    CHECK(back.head.W == net.head.W);
    CHECK(back.head.b == net.head.b);
    CHECK(back.normalizer.lo == net.normalizer.lo);
    std::filesystem::remove(path);
}
