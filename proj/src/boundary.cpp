#include "fd3m/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fd3m/autodiff.hpp"
#include "fd3m/errors.hpp"

namespace fd3m {

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

ExteriorTrace::ExteriorTrace(const PdeProblem& problem, int fixed_axis, double fixed_coord)
    : jet_fn_(problem.exact_jet),
      fixed_axis_(fixed_axis),
      free_axis_(problem.dim() == 1 ? -1 : 1 - fixed_axis),
      coord_(fixed_coord),
      dim_(problem.dim()) {}

void ExteriorTrace::eval(double t, double& v, double& d1, double& d2) const {
    Eigen::VectorXd x(dim_);
    x[fixed_axis_] = coord_;
    if (free_axis_ >= 0) x[free_axis_] = t;
    const Jet j = jet_fn_(x);
    v = j.value;
    if (free_axis_ >= 0) {
        d1 = j.grad[free_axis_];
        d2 = j.lap_diag[free_axis_];
    } else {
        d1 = d2 = 0.0;
    }
}

SnapshotTrace::SnapshotTrace(int fixed_axis, double fixed_coord, std::vector<Segment> segments,
                             int dim)
    : fixed_axis_(fixed_axis),
      free_axis_(dim == 1 ? -1 : 1 - fixed_axis),
      coord_(fixed_coord),
      dim_(dim),
      segments_(std::move(segments)) {}

void SnapshotTrace::eval(double t, double& v, double& d1, double& d2) const {
    const Segment* seg = &segments_.back();
    for (const auto& s : segments_) {
        if (t <= s.t_hi) {
            seg = &s;
            break;
        }
    }
    Eigen::VectorXd x(dim_);
    x[fixed_axis_] = coord_;
    if (free_axis_ >= 0) x[free_axis_] = t;
    double vs = 0, g = 0, l = 0;
    for (const auto& owner : seg->owners) {
        const Jet j = owner->jet(x);
        vs += j.value;
        if (free_axis_ >= 0) {
            g += j.grad[free_axis_];
            l += j.lap_diag[free_axis_];
        }
    }
    const double inv = 1.0 / static_cast<double>(seg->owners.size());
    v = vs * inv;
    d1 = g * inv;
    d2 = l * inv;
}

ChebyshevTrace::ChebyshevTrace(std::vector<ChebyshevSeries> segments)
    : segments_(std::move(segments)) {
    if (segments_.empty()) throw std::invalid_argument("ChebyshevTrace needs segments");
}

void ChebyshevTrace::eval(double t, double& v, double& d1, double& d2) const {
    const ChebyshevSeries* seg = &segments_.back();
    for (const auto& s : segments_) {
        if (t <= s.hi()) {
            seg = &s;
            break;
        }
    }
    seg->eval(t, v, d1, d2);
}

// ---------------------------------------------------------------------------
// Particular function
// ---------------------------------------------------------------------------

ParticularFunction ParticularFunction::linear_1d(double a, double b, double va, double vb) {
    ParticularFunction p;
    p.dim_ = 1;
    p.a_ = a;
    p.b_ = b;
    p.va_ = va;
    p.vb_ = vb;
    return p;
}

ParticularFunction ParticularFunction::transfinite_2d(
    const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
    std::array<std::shared_ptr<const FaceTrace>, 4> sides) {
    for (const auto& s : sides)
        if (!s) throw std::invalid_argument("transfinite_2d: all four face traces required");
    ParticularFunction p;
    p.dim_ = 2;
    p.lo2_ = lo;
    p.hi2_ = hi;
    p.sides_ = std::move(sides);
    // Corner values of the bottom/top sources, fixed at build time.
    p.corner_[0] = p.sides_[2]->value(lo[0]);
    p.corner_[1] = p.sides_[2]->value(hi[0]);
    p.corner_[2] = p.sides_[3]->value(lo[0]);
    p.corner_[3] = p.sides_[3]->value(hi[0]);
    return p;
}

double ParticularFunction::value(const Eigen::VectorXd& x) const {
    if (dim_ == 1)
        return ((b_ - x[0]) * va_ + (x[0] - a_) * vb_) / (b_ - a_);
    const double a = lo2_[0], b = hi2_[0], c = lo2_[1], d = hi2_[1];
    const double w = b - a, h = d - c;
    const double lx = (b - x[0]) / w, rx = (x[0] - a) / w;
    const double by = (d - x[1]) / h, ty = (x[1] - c) / h;
    const double sl = sides_[0]->value(x[1]);
    const double sr = sides_[1]->value(x[1]);
    const double sb = sides_[2]->value(x[0]);
    const double st = sides_[3]->value(x[0]);
    return lx * sl + rx * sr + by * (sb - (lx * corner_[0] + rx * corner_[1])) +
           ty * (st - (lx * corner_[2] + rx * corner_[3]));
}

Jet ParticularFunction::jet(const Eigen::VectorXd& x) const {
    if (dim_ == 1) {
        Jet j(1);
        j.value = value(x);
        j.grad[0] = (vb_ - va_) / (b_ - a_);
        return j;
    }
    const double a = lo2_[0], b = hi2_[0], c = lo2_[1], d = hi2_[1];
    const double w = b - a, h = d - c;
    const double lx = (b - x[0]) / w, rx = (x[0] - a) / w;
    const double by = (d - x[1]) / h, ty = (x[1] - c) / h;
    const double dlx = -1.0 / w, drx = 1.0 / w;
    const double dby = -1.0 / h, dty = 1.0 / h;

    double sl, sl1, sl2, sr, sr1, sr2, sb, sb1, sb2, st, st1, st2;
    sides_[0]->eval(x[1], sl, sl1, sl2);
    sides_[1]->eval(x[1], sr, sr1, sr2);
    sides_[2]->eval(x[0], sb, sb1, sb2);
    sides_[3]->eval(x[0], st, st1, st2);

    const double lerp_b = lx * corner_[0] + rx * corner_[1];
    const double lerp_t = lx * corner_[2] + rx * corner_[3];
    const double dlerp_b = dlx * corner_[0] + drx * corner_[1];
    const double dlerp_t = dlx * corner_[2] + drx * corner_[3];

    Jet j(2);
    j.value = lx * sl + rx * sr + by * (sb - lerp_b) + ty * (st - lerp_t);
    j.grad[0] = dlx * sl + drx * sr + by * (sb1 - dlerp_b) + ty * (st1 - dlerp_t);
    j.grad[1] = lx * sl1 + rx * sr1 + dby * (sb - lerp_b) + dty * (st - lerp_t);
    j.lap_diag[0] = by * sb2 + ty * st2;
    j.lap_diag[1] = lx * sl2 + rx * sr2;
    return j;
}

// ---------------------------------------------------------------------------
// Ansatz and snapshots
// ---------------------------------------------------------------------------

namespace {

double ansatz_value_impl(const ParticularFunction* phi, const DistanceFunction& dist,
                         const MffNet& net, const Eigen::VectorXd& x) {
    if (!phi) return mffnet_forward(net, x);
    return phi->value(x) + dist.value(x) * mffnet_forward(net, x);
}

Jet ansatz_jet_impl(const ParticularFunction* phi, const DistanceFunction& dist, const MffNet& net,
                    const Eigen::VectorXd& x) {
    if (!phi) return forward_jet(net, x);
    return phi->jet(x) + dist.jet(x) * forward_jet(net, x);
}

} // namespace

double LocalAnsatz::value(const Eigen::VectorXd& x) const {
    return ansatz_value_impl(particular.get(), dist, net, x);
}

Jet LocalAnsatz::jet(const Eigen::VectorXd& x) const {
    return ansatz_jet_impl(particular.get(), dist, net, x);
}

double AnsatzSnapshot::value(const Eigen::VectorXd& x) const {
    return ansatz_value_impl(particular.get(), dist, net, x);
}

Jet AnsatzSnapshot::jet(const Eigen::VectorXd& x) const {
    return ansatz_jet_impl(particular.get(), dist, net, x);
}

AnsatzSnapshot snapshot(const LocalAnsatz& ansatz) {
    return AnsatzSnapshot{ansatz.subdomain, ansatz.iteration, ansatz.particular, ansatz.dist,
                          ansatz.net};
}

Jet ansatz_eval_jet(const LocalAnsatz& ansatz, const Eigen::VectorXd& x) { return ansatz.jet(x); }

// ---------------------------------------------------------------------------
// Interface capture
// ---------------------------------------------------------------------------

SnapshotMode parse_snapshot_mode(const std::string& name) {
    if (name == "exact") return SnapshotMode::exact;
    if (name == "chebyshev") return SnapshotMode::chebyshev;
    throw ConfigError("unknown snapshot mode: '" + name + "' (expected exact or chebyshev)");
}

std::string to_string(SnapshotMode mode) {
    return mode == SnapshotMode::exact ? "exact" : "chebyshev";
}

CaptureResult capture_interfaces(const Subdomain& sub,
                                 const std::vector<std::shared_ptr<const AnsatzSnapshot>>& previous,
                                 const CaptureOptions& opts, RngStream* monitor_rng) {
    for (int j : sub.neighbors) {
        if (j >= static_cast<int>(previous.size()) || !previous[j])
            throw std::logic_error("capture_interfaces: missing previous-iteration solution for neighbor " +
                                   std::to_string(j));
    }

    CaptureResult result;
    const int dim = sub.dim();
    for (int side = 0; side < 2 * dim; ++side) {
        const SideInfo& info = sub.sides[side];
        if (info.kind != SideKind::interface) continue;
        const int axis = Subdomain::side_axis(side);
        const double coord = sub.side_coord(side);

        std::vector<SnapshotTrace::Segment> segments;
        for (const auto& seg : info.segments) {
            SnapshotTrace::Segment s{seg.t_lo, seg.t_hi, {}};
            for (int j : seg.owners) s.owners.push_back(previous[j]);
            segments.push_back(std::move(s));
        }
        auto exact = std::make_shared<SnapshotTrace>(axis, coord, segments, dim);

        std::shared_ptr<const FaceTrace> trace = exact;
        if (dim == 1) {
            // A 1D interface is a single point; capture collapses to its value.
            trace = std::make_shared<ConstantTrace>(exact->value(coord));
        } else if (opts.mode == SnapshotMode::chebyshev) {
            std::vector<ChebyshevSeries> fitted;
            for (const auto& seg : segments) {
                fitted.push_back(ChebyshevSeries::fit(
                    [&](double t) { return exact->value(t); }, seg.t_lo, seg.t_hi, opts.cheb_nodes));
            }
            auto cheb = std::make_shared<ChebyshevTrace>(std::move(fitted));
            if (monitor_rng && opts.monitor_points > 0) {
                for (const auto& seg : segments) {
                    for (int q = 0; q < opts.monitor_points; ++q) {
                        const double t = monitor_rng->uniform(seg.t_lo, seg.t_hi);
                        result.tabulation_error =
                            std::max(result.tabulation_error, std::abs(cheb->value(t) - exact->value(t)));
                    }
                }
            }
            trace = cheb;
        }
        result.faces.push_back(InterfaceFunction{side, trace, previous[sub.neighbors.front()]->iteration});
    }
    return result;
}

ParticularFunction build_particular_1d(const Subdomain& sub, double left_value, double right_value) {
    return ParticularFunction::linear_1d(sub.lo[0], sub.hi[0], left_value, right_value);
}

ParticularFunction build_particular_2d(const Subdomain& sub,
                                       std::array<std::shared_ptr<const FaceTrace>, 4> sides) {
    return ParticularFunction::transfinite_2d(sub.lo.head<2>(), sub.hi.head<2>(), std::move(sides));
}

std::shared_ptr<const ParticularFunction> build_particular(const Subdomain& sub,
                                                           const PdeProblem& problem,
                                                           const CaptureResult& captured) {
    const int dim = sub.dim();
    std::vector<std::shared_ptr<const FaceTrace>> traces(2 * dim);
    for (int side = 0; side < 2 * dim; ++side) {
        if (sub.sides[side].kind == SideKind::exterior)
            traces[side] = std::make_shared<ExteriorTrace>(problem, Subdomain::side_axis(side),
                                                           sub.side_coord(side));
    }
    for (const auto& f : captured.faces) traces[f.side] = f.trace;
    for (int side = 0; side < 2 * dim; ++side)
        if (!traces[side])
            throw std::logic_error("build_particular: no data source for side " + std::to_string(side));

    if (dim == 1) {
        return std::make_shared<ParticularFunction>(build_particular_1d(
            sub, traces[0]->value(sub.lo[0]), traces[1]->value(sub.hi[0])));
    }
    return std::make_shared<ParticularFunction>(build_particular_2d(
        sub, {traces[0], traces[1], traces[2], traces[3]}));
}

} // namespace fd3m
