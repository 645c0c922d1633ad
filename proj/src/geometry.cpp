#include "fd3m/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "fd3m/errors.hpp"

namespace fd3m {

using nlohmann::json;

BoxDomain BoxDomain::interval(double a, double b) {
    BoxDomain d;
    d.lo = Eigen::VectorXd::Constant(1, a);
    d.hi = Eigen::VectorXd::Constant(1, b);
    return d;
}

BoxDomain BoxDomain::square(double a, double b) {
    BoxDomain d;
    d.lo = Eigen::VectorXd::Constant(2, a);
    d.hi = Eigen::VectorXd::Constant(2, b);
    return d;
}

bool BoxDomain::contains(const Eigen::VectorXd& x) const {
    for (int j = 0; j < dim(); ++j)
        if (x[j] < lo[j] || x[j] > hi[j]) return false;
    return true;
}

bool Subdomain::contains(const Eigen::VectorXd& x) const {
    for (int j = 0; j < dim(); ++j)
        if (x[j] < lo[j] || x[j] > hi[j]) return false;
    return true;
}

std::vector<int> Decomposition::containing(const Eigen::VectorXd& x) const {
    std::vector<int> out;
    for (const auto& s : subdomains)
        if (s.contains(x)) out.push_back(s.index);
    return out;
}

Decomposition Decomposition::single(const BoxDomain& domain) {
    Decomposition d;
    d.domain = domain;
    d.layout = Layout::single;
    Subdomain s;
    s.index = 0;
    s.lo = domain.lo;
    s.hi = domain.hi;
    s.sides.assign(2 * domain.dim(), SideInfo{SideKind::exterior, {}});
    d.subdomains.push_back(std::move(s));
    return d;
}

namespace {

bool open_overlap(const Subdomain& a, const Subdomain& b) {
    for (int j = 0; j < a.dim(); ++j)
        if (std::max(a.lo[j], b.lo[j]) >= std::min(a.hi[j], b.hi[j])) return false;
    return true;
}

// Classify sides and derive cover segments + interface descriptors. Sides
// whose coordinate equals the domain bound are exterior; every other side
// must be fully covered by neighbors going strictly past it on the normal
// axis, otherwise the particular function has no data there.
void finish_decomposition(Decomposition& d) {
    const int dim = d.domain.dim();
    for (auto& s : d.subdomains) {
        s.neighbors.clear();
        for (const auto& o : d.subdomains)
            if (o.index != s.index && open_overlap(s, o)) s.neighbors.push_back(o.index);
        std::sort(s.neighbors.begin(), s.neighbors.end());
    }

    for (auto& s : d.subdomains) {
        s.sides.assign(2 * dim, SideInfo{});
        s.interface_faces.clear();
        for (int side = 0; side < 2 * dim; ++side) {
            const int axis = Subdomain::side_axis(side);
            const double coord = s.side_coord(side);
            SideInfo& info = s.sides[side];
            const double dom_bound = side % 2 == 0 ? d.domain.lo[axis] : d.domain.hi[axis];
            if (coord == dom_bound) {
                info.kind = SideKind::exterior;
                continue;
            }
            info.kind = SideKind::interface;

            if (dim == 1) {
                CoverSegment seg{coord, coord, {}};
                for (int j : s.neighbors) {
                    const auto& o = d.subdomains[j];
                    if (o.lo[0] < coord && coord < o.hi[0]) seg.owners.push_back(j);
                }
                if (seg.owners.empty())
                    throw ConfigError("interface endpoint of subdomain " + std::to_string(s.index) +
                                      " not inside any neighbor");
                info.segments.push_back(seg);
                for (int j : seg.owners)
                    s.interface_faces.push_back(InterfaceFace{j, axis, coord, coord, coord});
                continue;
            }

            const int free = 1 - axis;
            const double f_lo = s.lo[free], f_hi = s.hi[free];
            struct Cover {
                int j;
                double lo, hi;
            };
            std::vector<Cover> covers;
            for (int j : s.neighbors) {
                const auto& o = d.subdomains[j];
                if (!(o.lo[axis] < coord && coord < o.hi[axis])) continue;
                const double c_lo = std::max(f_lo, o.lo[free]);
                const double c_hi = std::min(f_hi, o.hi[free]);
                if (c_lo < c_hi) covers.push_back(Cover{j, c_lo, c_hi});
            }
            std::vector<double> cuts{f_lo, f_hi};
            for (const auto& c : covers) {
                cuts.push_back(c.lo);
                cuts.push_back(c.hi);
            }
            std::sort(cuts.begin(), cuts.end());
            const double merge_tol = 1e-13 * std::max(1.0, std::abs(f_hi - f_lo));
            cuts.erase(std::unique(cuts.begin(), cuts.end(),
                                   [&](double a, double b) { return std::abs(a - b) <= merge_tol; }),
                       cuts.end());
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                if (cuts[k] < f_lo - merge_tol || cuts[k + 1] > f_hi + merge_tol) continue;
                CoverSegment seg{cuts[k], cuts[k + 1], {}};
                const double mid = 0.5 * (seg.t_lo + seg.t_hi);
                for (const auto& c : covers)
                    if (c.lo <= mid && mid <= c.hi) seg.owners.push_back(c.j);
                if (seg.owners.empty())
                    throw ConfigError("interface side of subdomain " + std::to_string(s.index) +
                                      " has a stretch not covered by any neighbor");
                info.segments.push_back(std::move(seg));
            }
            for (const auto& c : covers)
                s.interface_faces.push_back(InterfaceFace{c.j, axis, coord, c.lo, c.hi});
        }
        std::sort(s.interface_faces.begin(), s.interface_faces.end(),
                  [](const InterfaceFace& a, const InterfaceFace& b) {
                      return std::tie(a.neighbor, a.axis, a.coord) < std::tie(b.neighbor, b.axis, b.coord);
                  });
    }
}

// The strip bound formula on one axis, 1-based slot index.
std::pair<double, double> strip_bounds(double lo, double hi, int n, double w, int i) {
    const double step = (hi - lo) / n;
    const double left = std::max(lo, lo + (i - 1) * step - 0.5 * w);
    const double right = std::min(hi, lo + i * step + 0.5 * w);
    return {left, right};
}

void validate_overlap(double extent, int n, double w) {
    if (w <= 0.0) throw ConfigError("overlap width must be positive");
    if (w >= extent / n)
        throw ConfigError("overlap width " + std::to_string(w) +
                          " too large for " + std::to_string(n) + " subdomains (a subdomain would swallow its neighbor)");
}

} // namespace

Decomposition decompose_strips(const BoxDomain& domain, int n_sub, double overlap_width, int axis) {
    if (n_sub < 2) throw ConfigError("decompose_strips needs at least 2 subdomains");
    if (axis < 0 || axis >= domain.dim()) throw ConfigError("strip axis out of range");
    validate_overlap(domain.extent(axis), n_sub, overlap_width);

    Decomposition d;
    d.domain = domain;
    d.layout = Layout::strips;
    for (int i = 1; i <= n_sub; ++i) {
        Subdomain s;
        s.index = i - 1;
        s.lo = domain.lo;
        s.hi = domain.hi;
        auto [l, r] = strip_bounds(domain.lo[axis], domain.hi[axis], n_sub, overlap_width, i);
        s.lo[axis] = l;
        s.hi[axis] = r;
        d.subdomains.push_back(std::move(s));
    }
    finish_decomposition(d);
    return d;
}

Decomposition decompose_grid(const BoxDomain& domain, int n1, int n2, double w1, double w2) {
    if (domain.dim() != 2) throw ConfigError("decompose_grid expects a 2D domain");
    if (n1 < 1 || n2 < 1 || n1 * n2 < 2) throw ConfigError("grid decomposition needs at least 2 subdomains");
    validate_overlap(domain.extent(0), n1, w1);
    if (n2 > 1) validate_overlap(domain.extent(1), n2, w2);

    Decomposition d;
    d.domain = domain;
    d.layout = Layout::grid;
    for (int r = 1; r <= n2; ++r) {
        for (int c = 1; c <= n1; ++c) {
            Subdomain s;
            s.index = (r - 1) * n1 + (c - 1);
            s.lo = domain.lo;
            s.hi = domain.hi;
            auto [l, rt] = strip_bounds(domain.lo[0], domain.hi[0], n1, w1, c);
            s.lo[0] = l;
            s.hi[0] = rt;
            if (n2 > 1) {
                auto [b, t] = strip_bounds(domain.lo[1], domain.hi[1], n2, w2, r);
                s.lo[1] = b;
                s.hi[1] = t;
            }
            d.subdomains.push_back(std::move(s));
        }
    }
    finish_decomposition(d);
    return d;
}

double DistanceFunction::value(const Eigen::VectorXd& x) const {
    double p = 1.0;
    for (int j = 0; j < lo.size(); ++j) p *= (x[j] - lo[j]) * (x[j] - hi[j]);
    return p;
}

Jet DistanceFunction::jet(const Eigen::VectorXd& x) const {
    const int d = static_cast<int>(lo.size());
    Jet out(d);
    Eigen::VectorXd q(d), dq(d);
    for (int j = 0; j < d; ++j) {
        q[j] = (x[j] - lo[j]) * (x[j] - hi[j]);
        dq[j] = 2.0 * x[j] - lo[j] - hi[j];
    }
    double prod = 1.0;
    for (int j = 0; j < d; ++j) prod *= q[j];
    out.value = prod;
    for (int a = 0; a < d; ++a) {
        double rest = 1.0;
        for (int j = 0; j < d; ++j)
            if (j != a) rest *= q[j];
        out.grad[a] = dq[a] * rest;
        out.lap_diag[a] = 2.0 * rest;
    }
    return out;
}

DistanceFunction distance_function(const Subdomain& sub) { return DistanceFunction{sub.lo, sub.hi}; }

Eigen::MatrixXd sample_uniform_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int count,
                                   RngStream& rng) {
    if (count <= 0) throw std::invalid_argument("sample count must be positive");
    Eigen::MatrixXd pts(count, lo.size());
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < lo.size(); ++j) pts(i, j) = rng.uniform(lo[j], hi[j]);
    return pts;
}

Eigen::MatrixXd sample_uniform(const Subdomain& sub, int count, RngStream& rng) {
    return sample_uniform_box(sub.lo, sub.hi, count, rng);
}

Eigen::MatrixXd test_grid(const BoxDomain& domain, const std::vector<int>& resolution) {
    if (static_cast<int>(resolution.size()) != domain.dim())
        throw std::invalid_argument("test_grid: resolution rank does not match domain");
    long total = 1;
    for (int n : resolution) {
        if (n < 2) throw std::invalid_argument("test_grid: need at least 2 points per axis");
        total *= n;
    }
    Eigen::MatrixXd pts(total, domain.dim());
    std::vector<int> idx(domain.dim(), 0);
    for (long row = 0; row < total; ++row) {
        for (int j = 0; j < domain.dim(); ++j) {
            const double t = static_cast<double>(idx[j]) / (resolution[j] - 1);
            pts(row, j) = domain.lo[j] + (domain.hi[j] - domain.lo[j]) * t;
        }
        for (int j = domain.dim() - 1; j >= 0; --j) { // last axis fastest
            if (++idx[j] < resolution[j]) break;
            idx[j] = 0;
        }
    }
    return pts;
}

std::string decomposition_to_json(const Decomposition& d) {
    json out;
    out["dim"] = d.domain.dim();
    out["layout"] = d.layout == Layout::single ? "single" : (d.layout == Layout::strips ? "strips" : "grid");
    out["domain"] = {{"lo", std::vector<double>(d.domain.lo.begin(), d.domain.lo.end())},
                     {"hi", std::vector<double>(d.domain.hi.begin(), d.domain.hi.end())}};
    out["subdomains"] = json::array();
    for (const auto& s : d.subdomains) {
        json js;
        js["index"] = s.index;
        js["lo"] = std::vector<double>(s.lo.begin(), s.lo.end());
        js["hi"] = std::vector<double>(s.hi.begin(), s.hi.end());
        js["neighbors"] = s.neighbors;
        js["exterior_sides"] = json::array();
        for (int side = 0; side < static_cast<int>(s.sides.size()); ++side)
            if (s.sides[side].kind == SideKind::exterior) js["exterior_sides"].push_back(side);
        js["interfaces"] = json::array();
        for (const auto& f : s.interface_faces)
            js["interfaces"].push_back(json{{"neighbor", f.neighbor},
                                            {"axis", f.axis},
                                            {"coord", f.coord},
                                            {"range", {f.t_lo, f.t_hi}}});
        out["subdomains"].push_back(std::move(js));
    }
    return out.dump(1);
}

} // namespace fd3m
