#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fd3m/rng.hpp"

namespace fd3m {

/// Affine map sending a box [lo, hi]^d onto [-1, 1]^d, applied to network
/// inputs. Written as 2*((x-lo)/(hi-lo)) - 1 so the box corners land on
/// +-1 exactly.
struct InputNormalizer {
    Eigen::VectorXd lo, hi;

    static InputNormalizer identity(int dim) {
        InputNormalizer n;
        n.lo = Eigen::VectorXd::Constant(dim, -1.0);
        n.hi = Eigen::VectorXd::Constant(dim, 1.0);
        return n;
    }
    static InputNormalizer for_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
        return InputNormalizer{lo, hi};
    }

    int dim() const { return static_cast<int>(lo.size()); }
    double scale(int axis) const { return 2.0 / (hi[axis] - lo[axis]); }
    double map(int axis, double x) const { return 2.0 * ((x - lo[axis]) / (hi[axis] - lo[axis])) - 1.0; }
};

struct Layer {
    Eigen::MatrixXd W; // out x in
    Eigen::VectorXd b; // out
};

/// Fully connected tanh network. When tanh_after_last is false the final
/// layer is linear (standalone FCN); when true every layer is activated
/// (the MFFNet subnets, whose outputs feed the shared linear head).
struct MlpParams {
    std::vector<Layer> layers;
    bool tanh_after_last = false;

    int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().W.cols()); }
    int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().W.rows()); }
    bool activated(std::size_t layer) const {
        return tanh_after_last || layer + 1 < layers.size();
    }
};

/// Random Fourier feature map x -> [cos(2 pi B x), x, sin(2 pi B x)].
/// B is sampled once from N(0, sigma^2) and frozen; it is not a parameter.
struct FourierFeatureMap {
    Eigen::MatrixXd B; // m x d
    double sigma = 1.0;

    int m() const { return static_cast<int>(B.rows()); }
    int dim() const { return static_cast<int>(B.cols()); }
    int output_dim() const { return 2 * m() + dim(); }
};

struct RffSubnet {
    FourierFeatureMap features;
    MlpParams mlp; // input 2m+d, all layers tanh-activated
};

/// Multi Fourier feature network: N subnets with distinct feature scales,
/// concatenated through one trainable linear head. Scalar output.
struct MffNet {
    std::vector<RffSubnet> subnets;
    Layer head; // 1 x (sum of subnet output widths)
    InputNormalizer normalizer;

    int input_dim() const { return normalizer.dim(); }
    int concat_width() const {
        int w = 0;
        for (const auto& s : subnets) w += s.mlp.output_dim();
        return w;
    }
};

/// Gradient (or Adam moment) container: one tensor per trainable parameter
/// tensor, in the owning network's tensor order. Biases are stored as
/// column matrices so the list is homogeneous.
struct ParamGradient {
    std::vector<Eigen::MatrixXd> tensors;

    void set_zero() {
        for (auto& t : tensors) t.setZero();
    }
    bool all_finite() const {
        for (const auto& t : tensors)
            if (!t.allFinite()) return false;
        return true;
    }
};

/// Flat elementwise view of one parameter tensor; the optimizer only needs
/// contiguous doubles, not shapes.
struct ParamView {
    double* data;
    long size;
};

std::vector<ParamView> param_views(MlpParams& net);
std::vector<ParamView> param_views(MffNet& net);

/// (rows, cols) of each gradient tensor, in tensor-list order
/// [W0, b0, W1, b1, ... , head W, head b]. B matrices are absent: they are
/// frozen hyper-structure, not parameters.
std::vector<std::pair<long, long>> gradient_shapes(const MlpParams& net);
std::vector<std::pair<long, long>> gradient_shapes(const MffNet& net);

/// Zeroed gradient shaped like the given network's trainable tensors.
template <class Net>
ParamGradient zero_gradient(const Net& net) {
    ParamGradient g;
    for (const auto& [r, c] : gradient_shapes(net)) g.tensors.emplace_back(Eigen::MatrixXd::Zero(r, c));
    return g;
}

enum class InitScheme { kaiming, xavier };

InitScheme parse_init_scheme(const std::string& name);
std::string to_string(InitScheme scheme);

struct MlpSpec {
    int input = 1;
    std::vector<int> hidden;
    int output = 1;
    bool tanh_after_last = false;
};

struct MffSpec {
    int input = 1;
    int hidden_layers = 1;
    int width = 10;                // neurons per hidden layer, per subnet
    std::vector<double> sigmas;    // one per subnet
    int fourier_rows = 0;          // rows of each B_n; 0 means width
    InputNormalizer normalizer;    // defaults to identity over [-1,1]^d
};

/// Reproducible initialization: weights from the named scheme, biases zero,
/// B_n from N(0, sigma_n^2). Layout of draws is fixed, so a seed pins every
/// parameter bit.
MlpParams init_network(const MlpSpec& spec, InitScheme scheme, std::uint64_t seed);
MffNet init_network(const MffSpec& spec, InitScheme scheme, std::uint64_t seed);

/// [cos(2 pi B x), x, sin(2 pi B x)] for a single point.
Eigen::VectorXd rff_map(const FourierFeatureMap& features, const Eigen::VectorXd& x);

/// Plain forward evaluation (no derivatives).
double mlp_forward(const MlpParams& net, const Eigen::VectorXd& x);
double mffnet_forward(const MffNet& net, const Eigen::VectorXd& x);

/// Batched forward over rows of pts (P x d), scalar output per row.
Eigen::VectorXd mlp_forward_batch(const MlpParams& net, const Eigen::MatrixXd& pts);
Eigen::VectorXd mffnet_forward_batch(const MffNet& net, const Eigen::MatrixXd& pts);

// Checkpoint round-trip. JSON with full decimal round-trip, so reloading
// reproduces every parameter bit-exactly.
void save_checkpoint(const MffNet& net, const std::string& path);
void save_checkpoint(const MlpParams& net, const std::string& path);
MffNet load_mffnet_checkpoint(const std::string& path);
MlpParams load_mlp_checkpoint(const std::string& path);

} // namespace fd3m
