#include "fd3m/network.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "fd3m/autodiff.hpp"
#include "fd3m/errors.hpp"

namespace fd3m {

using nlohmann::json;

std::vector<ParamView> param_views(MlpParams& net) {
    std::vector<ParamView> out;
    out.reserve(2 * net.layers.size());
    for (auto& l : net.layers) {
        out.push_back(ParamView{l.W.data(), l.W.size()});
        out.push_back(ParamView{l.b.data(), l.b.size()});
    }
    return out;
}

std::vector<ParamView> param_views(MffNet& net) {
    std::vector<ParamView> out;
    for (auto& s : net.subnets) {
        auto sub = param_views(s.mlp);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    out.push_back(ParamView{net.head.W.data(), net.head.W.size()});
    out.push_back(ParamView{net.head.b.data(), net.head.b.size()});
    return out;
}

namespace {

void append_shapes(const MlpParams& net, std::vector<std::pair<long, long>>& shapes) {
    for (const auto& l : net.layers) {
        shapes.emplace_back(l.W.rows(), l.W.cols());
        shapes.emplace_back(l.b.size(), 1);
    }
}

} // namespace

std::vector<std::pair<long, long>> gradient_shapes(const MlpParams& net) {
    std::vector<std::pair<long, long>> shapes;
    append_shapes(net, shapes);
    return shapes;
}

std::vector<std::pair<long, long>> gradient_shapes(const MffNet& net) {
    std::vector<std::pair<long, long>> shapes;
    for (const auto& s : net.subnets) append_shapes(s.mlp, shapes);
    shapes.emplace_back(net.head.W.rows(), net.head.W.cols());
    shapes.emplace_back(net.head.b.size(), 1);
    return shapes;
}

InitScheme parse_init_scheme(const std::string& name) {
    if (name == "kaiming") return InitScheme::kaiming;
    if (name == "xavier") return InitScheme::xavier;
    throw ConfigError("unknown init scheme: '" + name + "' (expected kaiming or xavier)");
}

std::string to_string(InitScheme scheme) {
    return scheme == InitScheme::kaiming ? "kaiming" : "xavier";
}

namespace {

Layer init_layer(int out, int in, InitScheme scheme, RngStream& rng) {
    const double stddev = scheme == InitScheme::kaiming ? std::sqrt(2.0 / in)
                                                        : std::sqrt(2.0 / (in + out));
    Layer l;
    l.W.resize(out, in);
    // Column-major fill order; fixed so a seed pins the exact parameters.
    for (long c = 0; c < l.W.cols(); ++c)
        for (long r = 0; r < l.W.rows(); ++r) l.W(r, c) = rng.normal(0.0, stddev);
    l.b = Eigen::VectorXd::Zero(out);
    return l;
}

MlpParams init_mlp_with(const MlpSpec& spec, InitScheme scheme, RngStream& rng) {
    if (spec.input <= 0 || spec.output <= 0) throw ConfigError("network widths must be positive");
    for (int h : spec.hidden)
        if (h <= 0) throw ConfigError("network widths must be positive");
    MlpParams net;
    net.tanh_after_last = spec.tanh_after_last;
    int in = spec.input;
    for (int h : spec.hidden) {
        net.layers.push_back(init_layer(h, in, scheme, rng));
        in = h;
    }
    net.layers.push_back(init_layer(spec.output, in, scheme, rng));
    return net;
}

} // namespace

MlpParams init_network(const MlpSpec& spec, InitScheme scheme, std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, "init-mlp");
    return init_mlp_with(spec, scheme, rng);
}

MffNet init_network(const MffSpec& spec, InitScheme scheme, std::uint64_t seed) {
    if (spec.sigmas.empty()) throw ConfigError("MFFNet needs at least one subnet sigma");
    if (spec.width <= 0 || spec.hidden_layers <= 0) throw ConfigError("network widths must be positive");
    RngStream rng = RngStream::derive(seed, "init-mffnet");
    const int m = spec.fourier_rows > 0 ? spec.fourier_rows : spec.width;
    MffNet net;
    net.normalizer = spec.normalizer.dim() == spec.input ? spec.normalizer
                                                         : InputNormalizer::identity(spec.input);
    for (double sigma : spec.sigmas) {
        if (sigma <= 0.0) throw ConfigError("subnet sigma must be positive");
        RffSubnet sub;
        sub.features.sigma = sigma;
        sub.features.B.resize(m, spec.input);
        for (long c = 0; c < sub.features.B.cols(); ++c)
            for (long r = 0; r < sub.features.B.rows(); ++r)
                sub.features.B(r, c) = rng.normal(0.0, sigma);
        MlpSpec mlp_spec;
        mlp_spec.input = 2 * m + spec.input;
        mlp_spec.hidden.assign(spec.hidden_layers > 1 ? spec.hidden_layers - 1 : 0, spec.width);
        mlp_spec.output = spec.width;
        mlp_spec.tanh_after_last = true;
        sub.mlp = init_mlp_with(mlp_spec, scheme, rng);
        net.subnets.push_back(std::move(sub));
    }
    net.head = init_layer(1, static_cast<int>(spec.sigmas.size()) * spec.width, scheme, rng);
    return net;
}

Eigen::VectorXd rff_map(const FourierFeatureMap& features, const Eigen::VectorXd& x) {
    if (x.size() != features.dim())
        throw std::invalid_argument("rff_map: point dimension does not match feature matrix");
    const double two_pi = 6.283185307179586476925286766559;
    Eigen::VectorXd theta = two_pi * (features.B * x);
    Eigen::VectorXd out(features.output_dim());
    out.head(features.m()) = theta.array().cos();
    out.segment(features.m(), x.size()) = x;
    out.tail(features.m()) = theta.array().sin();
    return out;
}

double mlp_forward(const MlpParams& net, const Eigen::VectorXd& x) {
    return mlp_forward_batch(net, x.transpose())(0);
}

double mffnet_forward(const MffNet& net, const Eigen::VectorXd& x) {
    return mffnet_forward_batch(net, x.transpose())(0);
}

Eigen::VectorXd mlp_forward_batch(const MlpParams& net, const Eigen::MatrixXd& pts) {
    JetBatch out = mlp_forward_value_batch(net, pts, nullptr);
    if (out.width() != 1) throw std::invalid_argument("expected a scalar-output network");
    return out.val.col(0);
}

Eigen::VectorXd mffnet_forward_batch(const MffNet& net, const Eigen::MatrixXd& pts) {
    JetBatch out = mffnet_value_batch(net, pts, nullptr);
    return out.val.col(0);
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (long r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const long rows = static_cast<long>(j.size());
    const long cols = rows > 0 ? static_cast<long>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (long i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<long>(j.size()));
    for (long i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
    return v;
}

json mlp_to_json(const MlpParams& net) {
    json j;
    j["tanh_after_last"] = net.tanh_after_last;
    j["layers"] = json::array();
    for (const auto& l : net.layers)
        j["layers"].push_back(json{{"W", matrix_to_json(l.W)}, {"b", vector_to_json(l.b)}});
    return j;
}

MlpParams mlp_from_json(const json& j) {
    MlpParams net;
    net.tanh_after_last = j.at("tanh_after_last").get<bool>();
    for (const auto& lj : j.at("layers"))
        net.layers.push_back(Layer{matrix_from_json(lj.at("W")), vector_from_json(lj.at("b"))});
    return net;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(1) << "\n";
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return json::parse(in);
}

} // namespace

void save_checkpoint(const MffNet& net, const std::string& path) {
    json j;
    j["kind"] = "mffnet";
    j["normalizer"] = {{"lo", vector_to_json(net.normalizer.lo)},
                       {"hi", vector_to_json(net.normalizer.hi)}};
    j["subnets"] = json::array();
    for (const auto& s : net.subnets)
        j["subnets"].push_back(json{{"sigma", s.features.sigma},
                                    {"B", matrix_to_json(s.features.B)},
                                    {"mlp", mlp_to_json(s.mlp)}});
    j["head"] = {{"W", matrix_to_json(net.head.W)}, {"b", vector_to_json(net.head.b)}};
    write_json_file(j, path);
}

void save_checkpoint(const MlpParams& net, const std::string& path) {
    json j;
    j["kind"] = "mlp";
    j["mlp"] = mlp_to_json(net);
    write_json_file(j, path);
}

MffNet load_mffnet_checkpoint(const std::string& path) {
    json j = read_json_file(path);
    if (j.at("kind") != "mffnet") throw std::runtime_error("checkpoint is not an MFFNet: " + path);
    MffNet net;
    net.normalizer.lo = vector_from_json(j.at("normalizer").at("lo"));
    net.normalizer.hi = vector_from_json(j.at("normalizer").at("hi"));
    for (const auto& sj : j.at("subnets")) {
        RffSubnet s;
        s.features.sigma = sj.at("sigma").get<double>();
        s.features.B = matrix_from_json(sj.at("B"));
        s.mlp = mlp_from_json(sj.at("mlp"));
        net.subnets.push_back(std::move(s));
    }
    net.head.W = matrix_from_json(j.at("head").at("W"));
    net.head.b = vector_from_json(j.at("head").at("b"));
    return net;
}

MlpParams load_mlp_checkpoint(const std::string& path) {
    json j = read_json_file(path);
    if (j.at("kind") != "mlp") throw std::runtime_error("checkpoint is not an MLP: " + path);
    return mlp_from_json(j.at("mlp"));
}

} // namespace fd3m
