#pragma once

#include "mfq/core.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mfq {

// One smooth boundary piece of a 2D domain, parameterized over [t0, t1].
// velocity is the non-normalized derivative of at; the arc length element is
// its norm. Closed patches wrap around (at(t0) == at(t1)).
struct Patch2 {
    double t0 = 0.0, t1 = 1.0;
    bool closed = false;
    std::function<Pt<2>(double)> at;
    std::function<Pt<2>(double)> velocity;
    std::function<Pt<2>(double)> normal;
};

// One smooth boundary piece of a 3D domain over the parameter rectangle
// [u0, u1] x [v0, v1].
struct Patch3 {
    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
    std::function<Pt<3>(double, double)> at;
    std::function<Pt<3>(double, double)> normal;
    std::function<double(double, double)> area_element;
};

template <int D>
struct PatchFor;
template <>
struct PatchFor<2> {
    using type = Patch2;
};
template <>
struct PatchFor<3> {
    using type = Patch3;
};

template <int D>
struct BoundarySample {
    Pt<D> point;
    Pt<D> normal;
};

// Implicit domain with optional parametric boundary patches. phi is negative
// inside; the stored box strictly contains the closure (tight extent padded
// by 10% per side) and is the box sampled by node generation and spanned by
// the spline space.
template <int D>
class Domain {
  public:
    virtual ~Domain() = default;

    virtual double phi(const Pt<D>& p) const = 0;
    virtual Pt<D> grad_phi(const Pt<D>& p) const = 0;

    // True within 1e-9 of a corner or edge locus where grad_phi is not a
    // valid normal; such points must take their normals from patch data.
    virtual bool near_corner(const Pt<D>&) const { return false; }

    // Structured boundary node placement at spacing h for domains whose
    // patches admit one (3D builtins). Empty means the generic path applies:
    // arc-length marching in 2D, rejection sampling plus projection when no
    // patches exist.
    virtual std::vector<BoundarySample<D>> structured_boundary(double, std::uint64_t) const {
        return {};
    }

    std::string name;
    Box<D> box;
    std::optional<double> measure_interior;
    std::optional<double> measure_boundary;
    Pt<D> witness = Pt<D>::Zero();
    Pt<D> x0 = Pt<D>::Zero();
    Pt<D> runge_center = Pt<D>::Zero();
    std::vector<typename PatchFor<D>::type> patches;
};

template <int D>
inline bool inside(const Domain<D>& d, const Pt<D>& p) {
    return d.phi(p) < 0.0;
}

// Damped Newton projection onto the zero set along grad_phi. Returns nothing
// if |phi| fails to reach 1e-12*(1+|p|) within 50 iterations or the gradient
// vanishes.
template <int D>
std::optional<Pt<D>> project_to_boundary(const Domain<D>& d, const Pt<D>& p);

// Outward unit normal from the gradient; throws near tagged corner loci.
template <int D>
Pt<D> boundary_normal(const Domain<D>& d, const Pt<D>& p);

std::unique_ptr<Domain<2>> make_domain2(const std::string& name);
std::unique_ptr<Domain<3>> make_domain3(const std::string& name);

// 2 or 3 for a builtin name, 0 otherwise.
int domain_dim(const std::string& name);
std::vector<std::string> builtin_domain_names();

}  // namespace mfq
