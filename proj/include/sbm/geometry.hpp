#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>

namespace sbm {

using Vec = Eigen::VectorXd;
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;

struct BoundingBox {
    Vec lo, hi;
    bool contains(ConstVecRef x) const {
        return (x.array() >= lo.array()).all() &&
               (x.array() <= hi.array()).all();
    }
};

// Smoothness data: every boundary point admits tangent interior and exterior
// balls of radius R, with graph Lipschitz constant Lambda.
struct Characteristics {
    double R = 1.0;
    double Lambda = 1.0;
};

// A domain is its signed distance oracle (positive inside, negative
// outside) plus metadata. The built-in constructions are exact piecewise
// closed forms; membership tests, boundary projection and the
// bridge-correction distances all read from the same oracle.
struct Domain {
    int dim = 0;
    std::function<double(ConstVecRef)> signed_distance;
    std::optional<Characteristics> characteristics;
    BoundingBox bounding_box;
    bool bounded = true;
    std::string name;

    bool inside(ConstVecRef x) const { return signed_distance(x) > 0.0; }
};

Domain make_ball(const Vec& center, double radius);
Domain make_halfspace(const Vec& normal, double offset);
Domain make_box(const Vec& lo, const Vec& hi);
// One-dimensional interval (a,b) as a domain.
Domain make_interval(double a, double b);

// The box (-side,side)^d minus a slab of the given thickness lying under
// the hyperplane x_d = 0 and reaching laterally to `slit_reach`. With
// smoothing == 0 the construction is the sharp set difference. With
// smoothing > 0 all edges are rounded at that radius and the slab is
// retracted from the far walls by 4*smoothing so the two boundary sheets
// stay disjoint; the result then satisfies two-sided ball probes of radius
// `smoothing` everywhere.
Domain make_slit_box(int dim, double side, double slab_thickness,
                     double slit_reach, double smoothing);

// Intersection via the min of signed distances (exact on the common
// interior away from boundary creases; sign is exact everywhere).
Domain intersect(const Domain& a, const Domain& b, const std::string& name);

// Gradient of the signed distance by central differences (closed-form
// oracles are exact enough that h = 1e-6 gives unit-norm gradients).
Vec sdf_gradient(const Domain& d, ConstVecRef x, double h = 1e-6);

// Nearest boundary point: x - sd(x) * grad sd(x), iterated twice.
Vec project_to_boundary(const Domain& d, ConstVecRef x);

// Local graph coordinates over a boundary point of a C^{1,1} domain.
// rho(y) = height of y above the boundary graph along the inward normal
// through the lateral offset of y.
class GraphBox {
 public:
    GraphBox(const Domain& parent, const Vec& q, double r1, double r2);

    // Height above the local graph and lateral offset, in the frame at Q.
    double rho(ConstVecRef y) const;
    double lateral_norm(ConstVecRef y) const;
    bool member(ConstVecRef y) const;

    const Vec& base_point() const { return q_; }
    const Vec& inward_normal() const { return normal_; }
    double r1() const { return r1_; }
    double r2() const { return r2_; }

    // A point at prescribed height on the inward normal ray through Q.
    Vec point_at_height(double t) const;

 private:
    const Domain* parent_;
    Vec q_;
    Vec normal_;
    Eigen::MatrixXd frame_;  // columns: d-1 tangents, then inward normal
    double r1_, r2_;
};

// Domain spec strings: "ball:r=1", "ball:r=1,cx=0.5", "halfspace",
// "slitbox:side=100,thickness=0.5,reach=49,smooth=0", "interval:a=0,b=1",
// "box:halfside=2".
Domain parse_domain(const std::string& spec, int dim);

}  // namespace sbm
