#include "fd3m/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

#include "fd3m/autodiff.hpp"
#include "fd3m/errors.hpp"

namespace fd3m {

Decomposition DecompositionSpec::build(const BoxDomain& domain) const {
    switch (layout) {
        case Layout::single:
            return Decomposition::single(domain);
        case Layout::strips:
            if (n_sub == 1) return Decomposition::single(domain);
            return decompose_strips(domain, n_sub, overlap, axis);
        case Layout::grid:
            return decompose_grid(domain, n1, n2, overlap, overlap2);
    }
    throw ConfigError("unknown decomposition layout");
}

long EpochSchedule::epochs_for(int k, long cumulative_done) const {
    long e = initial + static_cast<long>(k) * increment;
    switch (cap) {
        case Cap::iterations:
            return e;
        case Cap::per_iteration:
            return per_iteration_cap > 0 ? std::min(e, per_iteration_cap) : e;
        case Cap::cumulative: {
            if (cumulative_cap <= 0) return e;
            const long left = cumulative_cap - cumulative_done;
            return std::max<long>(0, std::min(e, left));
        }
    }
    return e;
}

Eigen::MatrixXd EvalSpec::points_for(const PdeProblem& problem, std::uint64_t seed) const {
    if (problem.dim() == 1) {
        RngStream rng = RngStream::derive(seed, "testpoints");
        return sample_uniform_box(problem.domain.lo, problem.domain.hi, random_points, rng);
    }
    return test_grid(problem.domain, std::vector<int>(problem.dim(), grid_per_axis));
}

double relative_error(const Eigen::VectorXd& pred, const Eigen::VectorXd& ref) {
    if (pred.size() != ref.size() || ref.size() == 0)
        throw std::invalid_argument("relative_error: point sets must match and be nonempty");
    const double denom = ref.norm();
    if (denom == 0.0) throw std::domain_error("relative_error: zero reference norm");
    return (pred - ref).norm() / denom;
}

double relative_error(const std::function<double(const Eigen::VectorXd&)>& u_pred,
                      const std::function<double(const Eigen::VectorXd&)>& u_ref,
                      const Eigen::MatrixXd& points) {
    if (points.rows() == 0) throw std::invalid_argument("relative_error: empty point set");
    Eigen::VectorXd a(points.rows()), b(points.rows());
    for (long i = 0; i < points.rows(); ++i) {
        const Eigen::VectorXd x = points.row(i);
        a[i] = u_pred(x);
        b[i] = u_ref(x);
    }
    return relative_error(a, b);
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

double assemble(const std::vector<std::shared_ptr<const AnsatzSnapshot>>& locals,
                const Decomposition& decomp, const Eigen::VectorXd& x) {
    double sum = 0.0;
    int hits = 0;
    for (const auto& s : decomp.subdomains) {
        if (!s.contains(x)) continue;
        sum += locals[s.index]->value(x);
        ++hits;
    }
    if (hits == 0) throw std::domain_error("assemble: point outside every subdomain");
    return sum / hits;
}

Eigen::VectorXd assemble_batch(const std::vector<std::shared_ptr<const AnsatzSnapshot>>& locals,
                               const Decomposition& decomp, const Eigen::MatrixXd& pts) {
    const long n = pts.rows();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    Eigen::VectorXi hits = Eigen::VectorXi::Zero(n);
    std::vector<long> rows;
    for (const auto& s : decomp.subdomains) {
        rows.clear();
        for (long i = 0; i < n; ++i)
            if (s.contains(pts.row(i).transpose())) rows.push_back(i);
        if (rows.empty()) continue;
        Eigen::MatrixXd sub_pts(rows.size(), pts.cols());
        for (std::size_t r = 0; r < rows.size(); ++r) sub_pts.row(r) = pts.row(rows[r]);
        const auto& snap = *locals[s.index];
        Eigen::VectorXd net_vals = mffnet_forward_batch(snap.net, sub_pts);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const Eigen::VectorXd x = sub_pts.row(r).transpose();
            double v = net_vals[r];
            if (snap.particular) v = snap.particular->value(x) + snap.dist.value(x) * v;
            sum[rows[r]] += v;
            hits[rows[r]] += 1;
        }
    }
    for (long i = 0; i < n; ++i) {
        if (hits[i] == 0) throw std::domain_error("assemble: point outside every subdomain");
        sum[i] /= hits[i];
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Local training
// ---------------------------------------------------------------------------

namespace {

// Residual weights of the boundary-exact ansatz u = phi + D*net:
//   r = (lap(phi) + c*phi - f) + (lap(D) + c*D)*net + 2 grad(D).grad(net) + D*lap(net)
ResidualWeights ansatz_residual_weights(const LocalAnsatz& ansatz, const PdeProblem& problem,
                                        const Eigen::MatrixXd& pts) {
    const long p = pts.rows();
    const int d = static_cast<int>(pts.cols());
    const double c = problem.reaction_coeff();
    ResidualWeights w;
    w.base.resize(p);
    w.value_coeff.resize(p);
    w.grad_coeff.resize(p, d);
    w.lap_coeff.resize(p);
    for (long i = 0; i < p; ++i) {
        const Eigen::VectorXd x = pts.row(i).transpose();
        const Jet phi = ansatz.particular->jet(x);
        const Jet dist = ansatz.dist.jet(x);
        w.base[i] = phi.laplacian() + c * phi.value - problem.source(x);
        w.value_coeff[i] = dist.laplacian() + c * dist.value;
        for (int a = 0; a < d; ++a) w.grad_coeff(i, a) = 2.0 * dist.grad[a];
        w.lap_coeff[i] = dist.value;
    }
    return w;
}

} // namespace

std::vector<double> train_local(LocalAnsatz& ansatz, LocalTrainer& trainer,
                                const PdeProblem& problem, const Subdomain& sub, long epochs,
                                const LrSchedule& lr, int collocation_count) {
    if (!ansatz.particular)
        throw std::logic_error("train_local: particular function not built for this iteration");
    std::vector<double> trace;
    trace.reserve(epochs);
    ParamGradient grads = zero_gradient(ansatz.net);
    for (long e = 0; e < epochs; ++e) {
        const Eigen::MatrixXd pts = sample_uniform(sub, collocation_count, trainer.collocation);
        const ResidualWeights w = ansatz_residual_weights(ansatz, problem, pts);
        grads.set_zero();
        const double loss = residual_loss_gradient(ansatz.net, pts, w, grads);
        const double rate = trainer.clock.lr(lr);
        if (!std::isfinite(loss))
            throw DivergedLossError("local training loss is not finite", ansatz.subdomain,
                                    ansatz.iteration, e, rate);
        adam_step(trainer.adam, param_views(ansatz.net), grads, rate);
        trainer.clock.tick();
        trace.push_back(loss);
    }
    return trace;
}

// ---------------------------------------------------------------------------
// F-D3M loop
// ---------------------------------------------------------------------------

namespace {

void run_training_tasks(const std::vector<int>& order, int workers,
                        const std::function<void(int)>& task) {
    if (workers <= 1 || order.size() <= 1) {
        for (int i : order) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(order.size());
    auto worker = [&]() {
        for (;;) {
            const std::size_t slot = next.fetch_add(1);
            if (slot >= order.size()) return;
            try {
                task(order[slot]);
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(workers, static_cast<int>(order.size()));
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

Fd3mResult fd3m_solve(const PdeProblem& problem, const Fd3mConfig& cfg) {
    Fd3mResult result;
    result.decomposition = cfg.decomposition.build(problem.domain);
    const Decomposition& decomp = result.decomposition;
    const int n_sub = decomp.size();

    std::vector<int> order = cfg.training_order;
    if (order.empty()) {
        order.resize(n_sub);
        for (int i = 0; i < n_sub; ++i) order[i] = i;
    } else {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < n_sub; ++i)
            if (sorted[i] != i) throw ConfigError("training_order must be a permutation of the subdomains");
    }

    std::vector<LocalTrainer> trainers;
    result.ansatz.clear();
    for (const auto& sub : decomp.subdomains) {
        MffSpec spec = cfg.net;
        spec.input = problem.dim();
        spec.normalizer = cfg.input_scaling == InputScaling::subdomain_box
                              ? InputNormalizer::for_box(sub.lo, sub.hi)
                              : InputNormalizer::identity(problem.dim());
        LocalAnsatz a;
        a.subdomain = sub.index;
        a.iteration = 0;
        a.dist = distance_function(sub);
        a.net = init_network(spec, cfg.init, RngStream::derive(cfg.seed, "subdomain-net", sub.index).raw());
        result.ansatz.push_back(std::move(a));
        LocalTrainer t;
        t.adam = AdamState::for_network(result.ansatz.back().net);
        t.collocation = RngStream::derive(cfg.seed, "collocation", sub.index);
        trainers.push_back(std::move(t));
    }

    result.eval_points = cfg.eval.points_for(problem, cfg.seed);
    Eigen::VectorXd exact_vals(result.eval_points.rows());
    for (long i = 0; i < result.eval_points.rows(); ++i)
        exact_vals[i] = problem.exact(result.eval_points.row(i).transpose());
    std::vector<std::vector<long>> sub_rows(n_sub);
    for (long i = 0; i < result.eval_points.rows(); ++i) {
        const Eigen::VectorXd x = result.eval_points.row(i).transpose();
        for (const auto& s : decomp.subdomains)
            if (s.contains(x)) sub_rows[s.index].push_back(i);
    }

    auto snapshot_all = [&]() {
        std::vector<std::shared_ptr<const AnsatzSnapshot>> snaps;
        snaps.reserve(n_sub);
        for (const auto& a : result.ansatz)
            snaps.push_back(std::make_shared<AnsatzSnapshot>(snapshot(a)));
        return snaps;
    };

    auto previous = snapshot_all(); // iteration-0 solutions: the raw networks
    Eigen::VectorXd prev_vals = assemble_batch(previous, decomp, result.eval_points);

    RngStream monitor_rng = RngStream::derive(cfg.seed, "capture-monitor");
    CaptureOptions capture_opts;
    capture_opts.mode = cfg.snapshot_mode;
    capture_opts.cheb_nodes = cfg.cheb_nodes;

    const bool want_checkpoints =
        cfg.checkpoints != CheckpointPolicy::none && !cfg.checkpoint_dir.empty();
    auto write_checkpoints = [&](const std::string& label) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::path(cfg.checkpoint_dir) / label;
        fs::create_directories(dir);
        for (const auto& a : result.ansatz)
            save_checkpoint(a.net, (dir / ("subdomain_" + std::to_string(a.subdomain) + ".json")).string());
    };

    long cumulative = 0;
    double eta = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.max_iterations && eta > cfg.tolerance; ++k) {
        const long epochs_k = cfg.epochs.epochs_for(k, cumulative);
        if (cfg.epochs.cap == EpochSchedule::Cap::cumulative && epochs_k == 0) break;
        const auto t0 = std::chrono::steady_clock::now();

        // Synchronization phase: freeze every interface and rebuild every
        // particular function before any subdomain trains.
        double tab_error = 0.0;
        for (int i = 0; i < n_sub; ++i) {
            const auto cap =
                capture_interfaces(decomp.subdomains[i], previous, capture_opts, &monitor_rng);
            tab_error = std::max(tab_error, cap.tabulation_error);
            result.ansatz[i].particular = build_particular(decomp.subdomains[i], problem, cap);
            result.ansatz[i].iteration = k + 1;
        }

        // Training phase: subdomains are independent given frozen interfaces,
        // so order and concurrency cannot change the result.
        std::vector<std::vector<double>> traces(n_sub);
        run_training_tasks(order, cfg.workers, [&](int i) {
            if (cfg.reset_lr_each_iteration) trainers[i].clock.reset();
            traces[i] = train_local(result.ansatz[i], trainers[i], problem, decomp.subdomains[i],
                                    epochs_k, cfg.lr, cfg.collocation_per_subdomain);
        });
        for (int i = 0; i < n_sub; ++i)
            for (long e = 0; e < static_cast<long>(traces[i].size()); ++e)
                result.loss_trace.push_back(LossSample{k + 1, i, e, traces[i][e]});

        auto current = snapshot_all();
        Eigen::VectorXd vals = assemble_batch(current, decomp, result.eval_points);
        eta = relative_error(vals, prev_vals);

        IterationRecord rec;
        rec.iteration = k + 1;
        rec.epochs = epochs_k;
        rec.eta = eta;
        rec.rel_error = relative_error(vals, exact_vals);
        rec.tabulation_error = tab_error;
        for (int i = 0; i < n_sub; ++i) {
            rec.subdomain_final_loss.push_back(traces[i].empty() ? 0.0 : traces[i].back());
            const auto& rows = sub_rows[i];
            Eigen::VectorXd pred(rows.size()), ref(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const Eigen::VectorXd x = result.eval_points.row(rows[r]).transpose();
                pred[r] = current[i]->value(x);
                ref[r] = exact_vals[rows[r]];
            }
            rec.subdomain_rel_error.push_back(relative_error(pred, ref));
        }
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.iterations.push_back(std::move(rec));

        previous = std::move(current);
        prev_vals = std::move(vals);
        cumulative += epochs_k;
        if (want_checkpoints && cfg.checkpoints == CheckpointPolicy::per_iteration)
            write_checkpoints("iteration_" + std::to_string(k + 1));
    }

    result.stopped_by_tolerance = eta <= cfg.tolerance;
    result.final_snapshots = previous;
    result.final_values = prev_vals;
    result.final_rel_error = result.iterations.empty()
                                 ? relative_error(prev_vals, exact_vals)
                                 : result.iterations.back().rel_error;
    if (want_checkpoints) write_checkpoints("final");
    return result;
}

// ---------------------------------------------------------------------------
// Global baselines
// ---------------------------------------------------------------------------

double GlobalResult::value(const Eigen::VectorXd& x) const {
    return fcn ? mlp_forward(*fcn, x) : mffnet_forward(*mff, x);
}

Eigen::VectorXd GlobalResult::value_batch(const Eigen::MatrixXd& pts) const {
    return fcn ? mlp_forward_batch(*fcn, pts) : mffnet_forward_batch(*mff, pts);
}

namespace {

// Fresh boundary samples: the two endpoints in 1D, per-face uniform draws in
// 2D with the total split evenly across the four faces.
Eigen::MatrixXd boundary_samples(const PdeProblem& problem, int total, RngStream& rng) {
    const auto& dom = problem.domain;
    if (problem.dim() == 1) {
        Eigen::MatrixXd pts(2, 1);
        pts(0, 0) = dom.lo[0];
        pts(1, 0) = dom.hi[0];
        return pts;
    }
    Eigen::MatrixXd pts(total, 2);
    long row = 0;
    for (int f = 0; f < 4; ++f) {
        const int count = total / 4 + (f < total % 4 ? 1 : 0);
        const int axis = f / 2;
        const double coord = f % 2 == 0 ? dom.lo[axis] : dom.hi[axis];
        for (int i = 0; i < count; ++i, ++row) {
            pts(row, axis) = coord;
            pts(row, 1 - axis) = rng.uniform(dom.lo[1 - axis], dom.hi[1 - axis]);
        }
    }
    return pts;
}

template <class Net>
Eigen::VectorXd eval_batch_of(const Net& net, const Eigen::MatrixXd& pts) {
    if constexpr (std::is_same_v<Net, MlpParams>)
        return mlp_forward_batch(net, pts);
    else
        return mffnet_forward_batch(net, pts);
}

template <class Net>
GlobalResult train_global_impl(const PdeProblem& problem, const GlobalConfig& cfg, Net net) {
    GlobalResult result;
    RngStream interior_rng = RngStream::derive(cfg.seed, "global-collocation");
    RngStream boundary_rng = RngStream::derive(cfg.seed, "global-boundary");

    result.eval_points = cfg.eval.points_for(problem, cfg.seed);
    Eigen::VectorXd exact_vals(result.eval_points.rows());
    for (long i = 0; i < result.eval_points.rows(); ++i)
        exact_vals[i] = problem.exact(result.eval_points.row(i).transpose());

    const double c = problem.reaction_coeff();
    ParamGradient grads = zero_gradient(net);
    AdamState adam = AdamState::for_network(net);
    ScheduleClock clock;

    for (long e = 0; e < cfg.epochs; ++e) {
        const Eigen::MatrixXd interior = sample_uniform_box(problem.domain.lo, problem.domain.hi,
                                                            cfg.interior_points, interior_rng);
        ResidualWeights w;
        w.base.resize(interior.rows());
        for (long i = 0; i < interior.rows(); ++i)
            w.base[i] = -problem.source(interior.row(i).transpose());
        w.value_coeff = Eigen::VectorXd::Constant(interior.rows(), c);
        w.grad_coeff = Eigen::MatrixXd::Zero(interior.rows(), problem.dim());
        w.lap_coeff = Eigen::VectorXd::Ones(interior.rows());

        const Eigen::MatrixXd bpts = boundary_samples(problem, cfg.boundary_points, boundary_rng);
        Eigen::VectorXd bvals(bpts.rows());
        for (long i = 0; i < bpts.rows(); ++i)
            bvals[i] = problem.boundary_value(bpts.row(i).transpose());

        grads.set_zero();
        const double loss_r = residual_loss_gradient(net, interior, w, grads);
        const double loss_b = cfg.penalty_weight > 0.0
                                  ? value_mse_loss_gradient(net, bpts, bvals, cfg.penalty_weight, grads)
                                  : 0.0;
        const double loss = loss_r + loss_b;
        const double rate = clock.lr(cfg.lr);
        if (!std::isfinite(loss))
            throw DivergedLossError("global training loss is not finite", -1, 0, e, rate);
        adam_step(adam, param_views(net), grads, rate);
        clock.tick();
        result.loss_trace.push_back(LossSample{0, -1, e, loss});

        if (cfg.error_eval_every > 0 && (e + 1) % cfg.error_eval_every == 0)
            result.error_trace.emplace_back(
                e + 1, relative_error(eval_batch_of(net, result.eval_points), exact_vals));
    }

    result.final_values = eval_batch_of(net, result.eval_points);
    result.final_rel_error = relative_error(result.final_values, exact_vals);
    if constexpr (std::is_same_v<Net, MlpParams>)
        result.fcn = std::move(net);
    else
        result.mff = std::move(net);
    return result;
}

} // namespace

GlobalResult train_global(const PdeProblem& problem, const GlobalConfig& cfg) {
    if (cfg.kind == GlobalNetKind::fcn) {
        MlpSpec spec = cfg.fcn;
        spec.input = problem.dim();
        spec.output = 1;
        spec.tanh_after_last = false;
        MlpParams net = init_network(spec, cfg.init, RngStream::derive(cfg.seed, "global-net").raw());
        return train_global_impl(problem, cfg, std::move(net));
    }
    MffSpec spec = cfg.mff;
    spec.input = problem.dim();
    spec.normalizer = InputNormalizer::identity(problem.dim());
    MffNet net = init_network(spec, cfg.init, RngStream::derive(cfg.seed, "global-net").raw());
    return train_global_impl(problem, cfg, std::move(net));
}

} // namespace fd3m
