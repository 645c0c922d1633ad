#pragma once

#include <array>
#include <memory>
#include <vector>

#include "fd3m/chebyshev.hpp"
#include "fd3m/geometry.hpp"
#include "fd3m/jet.hpp"
#include "fd3m/network.hpp"
#include "fd3m/problems.hpp"
#include "fd3m/rng.hpp"

namespace fd3m {

/// Scalar function of the free coordinate along one box side, with two
/// derivatives. Sources are either exterior data g or captured neighbor
/// traces; the particular-function blend consumes them uniformly.
class FaceTrace {
public:
    virtual ~FaceTrace() = default;
    virtual void eval(double t, double& v, double& d1, double& d2) const = 0;
    double value(double t) const {
        double v, d1, d2;
        eval(t, v, d1, d2);
        return v;
    }
};

/// Exterior data: the problem's g (restriction of the exact solution),
/// with analytic derivatives along the face.
class ExteriorTrace final : public FaceTrace {
public:
    ExteriorTrace(const PdeProblem& problem, int fixed_axis, double fixed_coord);
    void eval(double t, double& v, double& d1, double& d2) const override;

private:
    std::function<Jet(const Eigen::VectorXd&)> jet_fn_;
    int fixed_axis_;
    int free_axis_;
    double coord_;
    int dim_;
};

class ParticularFunction;

/// Frozen copy of a neighbor's local solution. The network parameters are
/// deep-copied at capture time; the particular function is shared because it
/// is itself immutable once built. Evaluating a snapshot is unaffected by
/// any later training of the neighbor.
struct AnsatzSnapshot {
    int subdomain = 0;
    int iteration = 0;
    std::shared_ptr<const ParticularFunction> particular; // null: raw initial network
    DistanceFunction dist;
    MffNet net;

    double value(const Eigen::VectorXd& x) const;
    Jet jet(const Eigen::VectorXd& x) const;
};

/// Pointwise average of the covering neighbors' frozen solutions, evaluated
/// through the stored parameter copies (exact but recursive through earlier
/// iterations' particular functions).
class SnapshotTrace final : public FaceTrace {
public:
    struct Segment {
        double t_lo, t_hi;
        std::vector<std::shared_ptr<const AnsatzSnapshot>> owners;
    };
    SnapshotTrace(int fixed_axis, double fixed_coord, std::vector<Segment> segments, int dim);
    void eval(double t, double& v, double& d1, double& d2) const override;

private:
    int fixed_axis_;
    int free_axis_;
    double coord_;
    int dim_;
    std::vector<Segment> segments_;
};

/// The same average tabulated per cover segment on Chebyshev nodes at
/// capture time. O(degree) per evaluation regardless of iteration count;
/// the capture step can monitor the tabulation error against the exact
/// trace at off-node points.
class ChebyshevTrace final : public FaceTrace {
public:
    explicit ChebyshevTrace(std::vector<ChebyshevSeries> segments);
    void eval(double t, double& v, double& d1, double& d2) const override;

private:
    std::vector<ChebyshevSeries> segments_;
};

/// Constant trace: 1D interface data (a point value) and test scaffolding.
class ConstantTrace final : public FaceTrace {
public:
    explicit ConstantTrace(double v) : v_(v) {}
    void eval(double, double& v, double& d1, double& d2) const override {
        v = v_;
        d1 = 0.0;
        d2 = 0.0;
    }

private:
    double v_;
};

/// Smooth function matching all boundary/interface data of one subdomain:
/// endpoint-linear in 1D, the transfinite four-face blend in 2D. The
/// trainable part of the ansatz vanishes on the boundary, so u_i restricted
/// to any face reproduces this function exactly.
class ParticularFunction {
public:
    static ParticularFunction linear_1d(double a, double b, double va, double vb);
    /// sides ordered left (axis0 low), right, bottom (axis1 low), top.
    static ParticularFunction transfinite_2d(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
                                             std::array<std::shared_ptr<const FaceTrace>, 4> sides);

    double value(const Eigen::VectorXd& x) const;
    Jet jet(const Eigen::VectorXd& x) const;
    int dim() const { return dim_; }

private:
    int dim_ = 1;
    // 1D
    double a_ = 0, b_ = 1, va_ = 0, vb_ = 0;
    // 2D
    Eigen::Vector2d lo2_, hi2_;
    std::array<std::shared_ptr<const FaceTrace>, 4> sides_;
    std::array<double, 4> corner_{}; // bottom(a), bottom(b), top(a), top(b)
};

/// Trainable boundary-exact local solution u_i = particular + dist * net.
/// Before the first particular function exists (iteration 0), the local
/// solution is the raw network itself.
struct LocalAnsatz {
    int subdomain = 0;
    int iteration = 0;
    std::shared_ptr<const ParticularFunction> particular;
    DistanceFunction dist;
    MffNet net;

    double value(const Eigen::VectorXd& x) const;
    Jet jet(const Eigen::VectorXd& x) const;
};

/// Deep-copied frozen view of the current local solution.
AnsatzSnapshot snapshot(const LocalAnsatz& ansatz);

/// Jet of particular(x) + dist(x) * net(x) by the product rule on component
/// jets; equals the plain ansatz value on the value channel.
Jet ansatz_eval_jet(const LocalAnsatz& ansatz, const Eigen::VectorXd& x);

enum class SnapshotMode { exact, chebyshev };

SnapshotMode parse_snapshot_mode(const std::string& name);
std::string to_string(SnapshotMode mode);

struct CaptureOptions {
    SnapshotMode mode = SnapshotMode::exact;
    int cheb_nodes = 512;    // per cover segment
    int monitor_points = 16; // tabulation-error probes per face; 0 disables
};

/// One interface side's captured data source.
struct InterfaceFunction {
    int side = 0; // side id within the owning subdomain
    std::shared_ptr<const FaceTrace> trace;
    int iteration = 0;
};

struct CaptureResult {
    std::vector<InterfaceFunction> faces;
    double tabulation_error = 0.0; // max deviation seen by the monitor probes
};

/// Freeze the interface data of one subdomain from the previous iteration's
/// local solutions. previous must hold a snapshot for every neighbor index;
/// a missing one is an iteration-ordering bug and throws.
CaptureResult capture_interfaces(const Subdomain& sub,
                                 const std::vector<std::shared_ptr<const AnsatzSnapshot>>& previous,
                                 const CaptureOptions& opts, RngStream* monitor_rng = nullptr);

ParticularFunction build_particular_1d(const Subdomain& sub, double left_value, double right_value);
ParticularFunction build_particular_2d(const Subdomain& sub,
                                       std::array<std::shared_ptr<const FaceTrace>, 4> sides);

/// Assemble the particular function for one subdomain: exterior sides take
/// g, interface sides take the captured traces.
std::shared_ptr<const ParticularFunction> build_particular(const Subdomain& sub,
                                                           const PdeProblem& problem,
                                                           const CaptureResult& captured);

} // namespace fd3m
