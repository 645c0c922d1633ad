#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fd3m/boundary.hpp"
#include "fd3m/geometry.hpp"
#include "fd3m/network.hpp"
#include "fd3m/optimizer.hpp"
#include "fd3m/problems.hpp"

namespace fd3m {

struct DecompositionSpec {
    Layout layout = Layout::strips;
    int n_sub = 2;   // strips (n_sub == 1 degenerates to a single subdomain)
    int axis = 0;
    int n1 = 0, n2 = 0; // grid
    double overlap = 0.2;
    double overlap2 = 0.2;

    Decomposition build(const BoxDomain& domain) const;
    int count() const { return layout == Layout::grid ? n1 * n2 : n_sub; }
};

struct EpochSchedule {
    enum class Cap { iterations, cumulative, per_iteration };
    long initial = 2500;
    long increment = 0;
    Cap cap = Cap::iterations;
    long cumulative_cap = 0;    // cap == cumulative
    long per_iteration_cap = 0; // cap == per_iteration

    /// Epochs for 0-based iteration k given epochs already spent; 0 means the
    /// budget is exhausted.
    long epochs_for(int k, long cumulative_done) const;
};

struct EvalSpec {
    int random_points = 2000; // 1D: uniform random test set, fixed per run
    int grid_per_axis = 121;  // 2D: tensor evaluation grid

    Eigen::MatrixXd points_for(const PdeProblem& problem, std::uint64_t seed) const;
};

enum class CheckpointPolicy { none, final, per_iteration };

/// How local network inputs are scaled. The feature scales sigma in the
/// benchmark configurations are calibrated against physical coordinates, so
/// keeping them (identity) preserves each subnet's intended frequency band;
/// subdomain_box rescales every strip onto [-1,1]^d first.
enum class InputScaling { identity, subdomain_box };

struct Fd3mConfig {
    DecompositionSpec decomposition;
    MffSpec net; // per-subnet architecture; normalizer is set per input_scaling
    InputScaling input_scaling = InputScaling::identity;
    InitScheme init = InitScheme::kaiming;
    LrSchedule lr;
    bool reset_lr_each_iteration = true;
    EpochSchedule epochs;
    int max_iterations = 20;
    double tolerance = 1e-4;
    int collocation_per_subdomain = 400;
    SnapshotMode snapshot_mode = SnapshotMode::exact;
    int cheb_nodes = 1024;
    std::uint64_t seed = 0;
    int workers = 1;
    std::vector<int> training_order; // empty = ascending subdomain index
    EvalSpec eval;
    CheckpointPolicy checkpoints = CheckpointPolicy::none;
    std::string checkpoint_dir;
};

struct IterationRecord {
    int iteration = 0; // 1-based
    long epochs = 0;
    double eta = 0.0;       // successive-iterate difference on the eval set
    double rel_error = 0.0; // against the exact solution on the eval set
    std::vector<double> subdomain_final_loss;
    std::vector<double> subdomain_rel_error; // on subdomain-restricted eval points
    double tabulation_error = 0.0;           // interface tabulation monitor, max over faces
    double wall_seconds = 0.0;
};

struct LossSample {
    int iteration;  // 0 for global runs
    int subdomain;  // -1 for global runs
    long epoch;     // within the iteration (global: absolute)
    double loss;
};

struct Fd3mResult {
    Decomposition decomposition;
    std::vector<LocalAnsatz> ansatz;
    std::vector<std::shared_ptr<const AnsatzSnapshot>> final_snapshots;
    std::vector<IterationRecord> iterations;
    std::vector<LossSample> loss_trace;
    Eigen::MatrixXd eval_points;
    Eigen::VectorXd final_values;
    double final_rel_error = 0.0;
    bool stopped_by_tolerance = false;
};

/// Per-subdomain trainer state. Adam moments persist across domain
/// decomposition iterations; only the learning-rate clock may reset.
struct LocalTrainer {
    AdamState adam;
    ScheduleClock clock;
    RngStream collocation;
};

/// Train one boundary-exact local ansatz on fresh uniform collocation sets,
/// minimizing the mean squared interior residual. Only the network (and its
/// linear head) change. Returns the per-epoch loss trace.
std::vector<double> train_local(LocalAnsatz& ansatz, LocalTrainer& trainer,
                                const PdeProblem& problem, const Subdomain& sub, long epochs,
                                const LrSchedule& lr, int collocation_count);

/// The full overlapping-decomposition loop: interface capture and particular
/// rebuild for every subdomain first, then (order-independent) per-subdomain
/// training, then assembly and the successive-difference stop test.
Fd3mResult fd3m_solve(const PdeProblem& problem, const Fd3mConfig& cfg);

/// Average of local solutions over subdomains whose closed box contains x.
double assemble(const std::vector<std::shared_ptr<const AnsatzSnapshot>>& locals,
                const Decomposition& decomp, const Eigen::VectorXd& x);
Eigen::VectorXd assemble_batch(const std::vector<std::shared_ptr<const AnsatzSnapshot>>& locals,
                               const Decomposition& decomp, const Eigen::MatrixXd& pts);

/// Discrete relative l2 difference: ||pred - ref|| / ||ref|| over samples.
double relative_error(const Eigen::VectorXd& pred, const Eigen::VectorXd& ref);
double relative_error(const std::function<double(const Eigen::VectorXd&)>& u_pred,
                      const std::function<double(const Eigen::VectorXd&)>& u_ref,
                      const Eigen::MatrixXd& points);

enum class GlobalNetKind { fcn, mffnet };

struct GlobalConfig {
    GlobalNetKind kind = GlobalNetKind::fcn;
    MlpSpec fcn;
    MffSpec mff;
    InitScheme init = InitScheme::kaiming;
    double penalty_weight = 100.0; // weight of the boundary misfit term
    int interior_points = 2000;
    int boundary_points = 2; // total across faces; 1D uses the two endpoints
    long epochs = 50000;
    LrSchedule lr;
    std::uint64_t seed = 0;
    EvalSpec eval;
    long error_eval_every = 0; // 0 = only at the end
};

struct GlobalResult {
    std::optional<MlpParams> fcn;
    std::optional<MffNet> mff;
    std::vector<LossSample> loss_trace;
    std::vector<std::pair<long, double>> error_trace; // (epoch, rel error)
    Eigen::MatrixXd eval_points;
    Eigen::VectorXd final_values;
    double final_rel_error = 0.0;

    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd value_batch(const Eigen::MatrixXd& pts) const;
};

/// Penalty-weighted composite training of a single global network:
/// mean squared interior residual plus penalty_weight times the mean squared
/// boundary misfit, fresh samples per epoch.
GlobalResult train_global(const PdeProblem& problem, const GlobalConfig& cfg);

} // namespace fd3m
