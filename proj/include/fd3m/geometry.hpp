#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "fd3m/jet.hpp"
#include "fd3m/rng.hpp"

namespace fd3m {

struct BoxDomain {
    Eigen::VectorXd lo, hi;

    static BoxDomain interval(double a, double b);
    static BoxDomain square(double a, double b);

    int dim() const { return static_cast<int>(lo.size()); }
    double extent(int axis) const { return hi[axis] - lo[axis]; }
    bool contains(const Eigen::VectorXd& x) const; // closed box
};

enum class SideKind { exterior, interface };

/// Sub-range of an interface side whose covering neighbor set is constant.
/// Points on it take the average of the covering neighbors' traces.
struct CoverSegment {
    double t_lo = 0.0, t_hi = 0.0; // along the side's free axis; t_lo == t_hi in 1D
    std::vector<int> owners;       // covering neighbor indices, ascending
};

struct SideInfo {
    SideKind kind = SideKind::exterior;
    std::vector<CoverSegment> segments; // interface sides only
};

/// One piece of this subdomain's boundary lying inside neighbor j's open
/// box: fixed axis + coordinate, range along the free axis.
struct InterfaceFace {
    int neighbor = -1;
    int axis = 0;
    double coord = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
};

struct Subdomain {
    int index = 0;
    Eigen::VectorXd lo, hi;
    std::vector<int> neighbors;                // Lambda_i, ascending, excludes index
    std::vector<SideInfo> sides;               // 2*dim entries, order: axis0-low, axis0-high, axis1-low, ...
    std::vector<InterfaceFace> interface_faces;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Eigen::VectorXd& x) const; // closed box
    double side_coord(int side) const { return side % 2 == 0 ? lo[side / 2] : hi[side / 2]; }
    static int side_axis(int side) { return side / 2; }
};

enum class Layout { single, strips, grid };

struct Decomposition {
    BoxDomain domain;
    Layout layout = Layout::single;
    std::vector<Subdomain> subdomains;

    int size() const { return static_cast<int>(subdomains.size()); }
    /// Indices of all subdomains whose closed box contains x.
    std::vector<int> containing(const Eigen::VectorXd& x) const;

    static Decomposition single(const BoxDomain& domain);
};

/// Overlapping strips along one axis. Subdomain bounds follow
///   left_i  = max(lo, lo + (i-1) * L/n - w/2)
///   right_i = min(hi, lo + i * L/n + w/2)
/// with L the domain extent on the axis. Neighbor sets come from the
/// open-box nonempty-intersection test.
Decomposition decompose_strips(const BoxDomain& domain, int n_sub, double overlap_width, int axis);

/// Tensor product of the strip formula on both axes of a 2D box; subdomain
/// index runs rows-of-axis-1 slow, axis-0 fast.
Decomposition decompose_grid(const BoxDomain& domain, int n1, int n2, double w1, double w2);

/// Product distance polynomial: prod_j (x_j - lo_j)(x_j - hi_j). Vanishes
/// identically on the subdomain boundary; smooth everywhere.
struct DistanceFunction {
    Eigen::VectorXd lo, hi;

    double value(const Eigen::VectorXd& x) const;
    Jet jet(const Eigen::VectorXd& x) const;
};

DistanceFunction distance_function(const Subdomain& sub);

/// Fresh i.i.d. uniform points in a box, one row per point.
Eigen::MatrixXd sample_uniform_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int count,
                                   RngStream& rng);
Eigen::MatrixXd sample_uniform(const Subdomain& sub, int count, RngStream& rng);

/// Equispaced tensor grid including both endpoints, last axis fastest.
Eigen::MatrixXd test_grid(const BoxDomain& domain, const std::vector<int>& resolution);

/// JSON dump of bounds, neighbor sets and interface descriptors (golden-file
/// surface).
std::string decomposition_to_json(const Decomposition& d);

} // namespace fd3m
