#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fd3m/jet.hpp"
#include "fd3m/network.hpp"

namespace fd3m {

// Evaluation of tanh networks together with first and second spatial
// derivatives, and exact reverse-mode gradients of residual-style losses
// with respect to all trainable parameters.
//
// Derivatives are carried as diagonal jets: per layer activation we keep the
// value matrix plus, for each spatial axis j, the matrices of d/dx_j and
// d2/dx_j^2 entries. Each channel is a separate P x width matrix so the
// value channel goes through exactly the same elementwise code as a plain
// forward evaluation.

/// Batched jet of a layer activation: val, grad[j], lap[j] are all P x width.
/// dim == 0 means a value-only batch (no derivative channels).
struct JetBatch {
    Eigen::MatrixXd val;
    std::vector<Eigen::MatrixXd> grad;
    std::vector<Eigen::MatrixXd> lap;

    int points() const { return static_cast<int>(val.rows()); }
    int width() const { return static_cast<int>(val.cols()); }
    int dim() const { return static_cast<int>(grad.size()); }

    static JetBatch zeros(int points, int width, int dim) {
        JetBatch b;
        b.val = Eigen::MatrixXd::Zero(points, width);
        b.grad.assign(dim, Eigen::MatrixXd::Zero(points, width));
        b.lap.assign(dim, Eigen::MatrixXd::Zero(points, width));
        return b;
    }

    /// Jet of the input coordinates themselves: val = pts, grad_j = e_j.
    static JetBatch input(const Eigen::MatrixXd& pts);
};

/// tanh with matching first/second derivative factors, all derived from one
/// tanh evaluation: t1 = 1 - t^2, t2 = -2 t t1.
Eigen::ArrayXXd tanh_array(const Eigen::ArrayXXd& z);
double tanh_scalar(double z);

/// Saved forward state of one MLP pass, enough to run the reverse sweep.
struct MlpTape {
    std::vector<JetBatch> affine_in;  // input jet of each affine layer
    std::vector<JetBatch> pre_act;    // pre-activation jet of each activated layer
    std::vector<Eigen::MatrixXd> act_val; // tanh values of each activated layer
    JetBatch out;
};

/// Forward jet propagation through an MLP. The input jet may come from raw
/// coordinates or from a Fourier feature layer. Pass tape=nullptr to skip
/// saving reverse-sweep state.
JetBatch mlp_forward_jet_batch(const MlpParams& net, const JetBatch& in, MlpTape* tape);

/// Reverse sweep: adjoint of every channel of the MLP output. Accumulates
/// parameter gradients into grads[first_tensor..]; returns nothing for the
/// input (network inputs are never trainable here).
void mlp_backward(const MlpParams& net, const MlpTape& tape, const JetBatch& out_adjoint,
                  std::vector<Eigen::MatrixXd>& grad_tensors, std::size_t first_tensor);

/// Jet of the Fourier feature block [cos(2 pi B xn), xn, sin(2 pi B xn)]
/// where xn is the normalized input. B is frozen, so this layer has no
/// reverse sweep.
JetBatch rff_forward_jet_batch(const FourierFeatureMap& features, const InputNormalizer& norm,
                               const Eigen::MatrixXd& pts, int jet_dim);

struct MffTape {
    std::vector<MlpTape> subnet;
    JetBatch concat; // jet of the head input
};

/// Jet of the full MFFNet: scalar per point. jet_dim = 0 gives a value-only
/// evaluation through the identical elementwise pipeline.
JetBatch mffnet_forward_jet_batch(const MffNet& net, const Eigen::MatrixXd& pts, MffTape* tape);
void mffnet_backward(const MffNet& net, const MffTape& tape, const JetBatch& out_adjoint,
                     ParamGradient& grads);

/// Value-only batched forward passes with tape (used by the boundary term of
/// the global composite loss and by solution assembly).
JetBatch mlp_forward_value_batch(const MlpParams& net, const Eigen::MatrixXd& pts, MlpTape* tape);
JetBatch mffnet_value_batch(const MffNet& net, const Eigen::MatrixXd& pts, MffTape* tape);

/// Single-point jet of an MLP taking raw coordinates.
Jet forward_jet(const MlpParams& net, const Eigen::VectorXd& x);
/// Single-point jet of an MFFNet.
Jet forward_jet(const MffNet& net, const Eigen::VectorXd& x);

/// Gradient of J = (1/P) sum_p w_p (u(x_p) - y_p)^2 with respect to the
/// network parameters; returns J. Covers the boundary penalty of the global
/// loss and the plain value-fitting examples.
double value_mse_loss_gradient(const MlpParams& net, const Eigen::MatrixXd& pts,
                               const Eigen::VectorXd& targets, double weight, ParamGradient& grads);
double value_mse_loss_gradient(const MffNet& net, const Eigen::MatrixXd& pts,
                               const Eigen::VectorXd& targets, double weight, ParamGradient& grads);

/// Per-point residual weights for losses of the form
///   J = (1/P) sum_p | base_p + a_p u_p + sum_j b_{p,j} du_p/dx_j + c_p lap(u)_p |^2.
/// The arrays are produced by the caller (ansatz algebra or the raw PDE
/// operator); the gradient is exact reverse accumulation, not finite
/// differences.
struct ResidualWeights {
    Eigen::VectorXd base;            // P
    Eigen::VectorXd value_coeff;     // a_p
    Eigen::MatrixXd grad_coeff;      // P x d, b_{p,j}
    Eigen::VectorXd lap_coeff;       // c_p (same for every axis)
};

/// Returns the loss value, fills residual_out (caller-allocated P vector is
/// resized) and accumulates parameter gradients.
double residual_loss_gradient(const MffNet& net, const Eigen::MatrixXd& pts,
                              const ResidualWeights& w, ParamGradient& grads,
                              Eigen::VectorXd* residual_out = nullptr);
double residual_loss_gradient(const MlpParams& net, const Eigen::MatrixXd& pts,
                              const ResidualWeights& w, ParamGradient& grads,
                              Eigen::VectorXd* residual_out = nullptr);

} // namespace fd3m
