#include "mfq/geometry.hpp"

#include "mfq/integrate.hpp"

#include <cmath>
#include <stdexcept>

namespace mfq {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Perimeter of the (1, 3/4) ellipse and surface area of the (1, 0.7, 0.7)
// spheroid, precomputed to full precision with an adaptive quadrature oracle
// and verified against the patch integral in the test suite.
constexpr double kEllipsePerimeter = 5.5258730401773763;
constexpr double kSpheroidArea = 7.9774261098703985;

template <int D>
Box<D> padded_box(const Pt<D>& lo, const Pt<D>& hi) {
    Box<D> b;
    const Pt<D> c = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    b.lo = c - 1.1 * half;
    b.hi = c + 1.1 * half;
    return b;
}

class Ellipse final : public Domain<2> {
  public:
    static constexpr double b = 0.75;
    Ellipse() {
        name = "ellipse";
        box = padded_box<2>({-1.0, -b}, {1.0, b});
        measure_interior = 0.75 * kPi;
        measure_boundary = kEllipsePerimeter;
        witness = x0 = runge_center = Pt<2>::Zero();
        Patch2 pa;
        pa.t0 = 0.0;
        pa.t1 = 2.0 * kPi;
        pa.closed = true;
        pa.at = [](double t) { return Pt<2>(std::cos(t), b * std::sin(t)); };
        pa.velocity = [](double t) { return Pt<2>(-std::sin(t), b * std::cos(t)); };
        pa.normal = [](double t) {
            Pt<2> g(std::cos(t), std::sin(t) / b);
            return Pt<2>(g / g.norm());
        };
        patches.push_back(std::move(pa));
    }
    double phi(const Pt<2>& p) const override {
        return p[0] * p[0] + (p[1] / b) * (p[1] / b) - 1.0;
    }
    Pt<2> grad_phi(const Pt<2>& p) const override {
        return {2.0 * p[0], 2.0 * p[1] / (b * b)};
    }
};

class DiskSector final : public Domain<2> {
  public:
    DiskSector() {
        name = "disk-sector";
        box = padded_box<2>({-1.0, -1.0}, {1.0, 1.0});
        measure_interior = 0.75 * kPi;
        measure_boundary = 2.0 + 1.5 * kPi;
        witness = x0 = runge_center = Pt<2>(0.5 * std::cos(0.75 * kPi), 0.5 * std::sin(0.75 * kPi));
        Patch2 arc;
        arc.t0 = 0.0;
        arc.t1 = 1.5 * kPi;
        arc.at = [](double t) { return Pt<2>(std::cos(t), std::sin(t)); };
        arc.velocity = [](double t) { return Pt<2>(-std::sin(t), std::cos(t)); };
        arc.normal = [](double t) { return Pt<2>(std::cos(t), std::sin(t)); };
        patches.push_back(std::move(arc));
        Patch2 seg1;
        seg1.t0 = 0.0;
        seg1.t1 = 1.0;
        seg1.at = [](double t) { return Pt<2>(0.0, -1.0 + t); };
        seg1.velocity = [](double) { return Pt<2>(0.0, 1.0); };
        seg1.normal = [](double) { return Pt<2>(1.0, 0.0); };
        patches.push_back(std::move(seg1));
        Patch2 seg2;
        seg2.t0 = 0.0;
        seg2.t1 = 1.0;
        seg2.at = [](double t) { return Pt<2>(t, 0.0); };
        seg2.velocity = [](double) { return Pt<2>(1.0, 0.0); };
        seg2.normal = [](double) { return Pt<2>(0.0, -1.0); };
        patches.push_back(std::move(seg2));
    }
    double phi(const Pt<2>& p) const override {
        return std::max(p.norm() - 1.0, std::min(p[0], -p[1]));
    }
    Pt<2> grad_phi(const Pt<2>& p) const override {
        const double r = p.norm();
        if (r - 1.0 >= std::min(p[0], -p[1])) {
            const double rr = std::max(r, 1e-300);
            return {p[0] / rr, p[1] / rr};
        }
        return p[0] < -p[1] ? Pt<2>(1.0, 0.0) : Pt<2>(0.0, -1.0);
    }
    bool near_corner(const Pt<2>& p) const override {
        const Pt<2> corners[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, -1.0}};
        for (const auto& c : corners)
            if ((p - c).norm() <= 1e-9) return true;
        return false;
    }
};

class CassiniOval final : public Domain<2> {
  public:
    static constexpr double a = 0.95;
    static constexpr double bq = 1.0;  // b^4 with b = 1
    CassiniOval() {
        name = "cassini";
        const double xext = std::sqrt(a * a + 1.0);
        const double yext = 1.0 / (2.0 * a);
        box = padded_box<2>({-xext, -yext}, {xext, yext});
        witness = x0 = runge_center = Pt<2>::Zero();
        Patch2 pa;
        pa.t0 = 0.0;
        pa.t1 = 2.0 * kPi;
        pa.closed = true;
        pa.at = [](double t) {
            const double r = radius(t);
            return Pt<2>(r * std::cos(t), r * std::sin(t));
        };
        pa.velocity = [](double t) { return velocity_at(t); };
        pa.normal = [](double t) {
            const Pt<2> v = velocity_at(t);
            Pt<2> n(v[1], -v[0]);
            return Pt<2>(n / n.norm());
        };
        patches.push_back(std::move(pa));
    }
    static double radius(double t) {
        const double s = std::sin(2.0 * t);
        return std::sqrt(a * a * std::cos(2.0 * t) + std::sqrt(bq - a * a * a * a * s * s));
    }
    static Pt<2> velocity_at(double t) {
        const double s = std::sin(2.0 * t), c = std::cos(2.0 * t);
        const double w = std::sqrt(bq - a * a * a * a * s * s);
        const double r = radius(t);
        const double dr2 = -2.0 * a * a * s - 2.0 * a * a * a * a * s * c / w;
        const double dr = dr2 / (2.0 * r);
        return {dr * std::cos(t) - r * std::sin(t), dr * std::sin(t) + r * std::cos(t)};
    }
    double phi(const Pt<2>& p) const override {
        const double u = (p[0] + a) * (p[0] + a) + p[1] * p[1];
        const double v = (p[0] - a) * (p[0] - a) + p[1] * p[1];
        return u * v - bq;
    }
    Pt<2> grad_phi(const Pt<2>& p) const override {
        const double u = (p[0] + a) * (p[0] + a) + p[1] * p[1];
        const double v = (p[0] - a) * (p[0] - a) + p[1] * p[1];
        return {2.0 * (p[0] + a) * v + 2.0 * (p[0] - a) * u, 2.0 * p[1] * (u + v)};
    }
};

class Ellipsoid final : public Domain<3> {
  public:
    static constexpr double b = 0.7;
    Ellipsoid() {
        name = "ellipsoid";
        box = padded_box<3>({-1.0, -b, -b}, {1.0, b, b});
        measure_interior = 4.0 / 3.0 * kPi * b * b;
        measure_boundary = kSpheroidArea;
        witness = x0 = runge_center = Pt<3>::Zero();
        Patch3 pa;
        pa.u0 = 0.0;
        pa.u1 = kPi;
        pa.v0 = 0.0;
        pa.v1 = 2.0 * kPi;
        pa.at = [](double u, double v) {
            return Pt<3>(std::cos(u), b * std::sin(u) * std::cos(v), b * std::sin(u) * std::sin(v));
        };
        pa.normal = [](double u, double v) {
            Pt<3> g(std::cos(u), std::sin(u) * std::cos(v) / b, std::sin(u) * std::sin(v) / b);
            return Pt<3>(g / g.norm());
        };
        pa.area_element = [](double u, double) {
            const double su = std::sin(u), cu = std::cos(u);
            return b * su * std::sqrt(b * b * cu * cu + su * su);
        };
        patches.push_back(std::move(pa));
    }
    double phi(const Pt<3>& p) const override {
        return p[0] * p[0] + (p[1] / b) * (p[1] / b) + (p[2] / b) * (p[2] / b) - 1.0;
    }
    Pt<3> grad_phi(const Pt<3>& p) const override {
        return {2.0 * p[0], 2.0 * p[1] / (b * b), 2.0 * p[2] / (b * b)};
    }
    std::vector<BoundarySample<3>> structured_boundary(double h, std::uint64_t seed) const override {
        const auto speed = [](double u) {
            const double su = std::sin(u), cu = std::cos(u);
            return std::sqrt(su * su + b * b * cu * cu);
        };
        const double meridian = adaptive_gk15(speed, 0.0, kPi, 1e-12, 1e-12).value;
        const int nu = std::max(1, static_cast<int>(std::lround(meridian / h)));
        std::vector<BoundarySample<3>> out;
        for (int j = 0; j <= nu; ++j) {
            const double target = meridian * j / nu;
            double lo = 0.0, hi = kPi;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (adaptive_gk15(speed, 0.0, mid, 1e-12, 1e-12).value < target ? lo : hi) = mid;
            }
            const double u = (j == 0) ? 0.0 : (j == nu ? kPi : 0.5 * (lo + hi));
            const double rho = b * std::sin(u);
            const int nv = std::max(1, static_cast<int>(std::lround(2.0 * kPi * rho / h)));
            if (rho < 0.25 * h) {
                const Pt<3> p = patches[0].at(u, 0.0);
                out.push_back({p, patches[0].normal(u, 0.0)});
                continue;
            }
            const double off = hash01(seed, static_cast<std::uint64_t>(j));
            for (int k = 0; k < nv; ++k) {
                const double v = 2.0 * kPi * (k + off) / nv;
                out.push_back({patches[0].at(u, v), patches[0].normal(u, v)});
            }
        }
        return out;
    }
};

class LShape3D final : public Domain<3> {
  public:
    LShape3D() {
        name = "lshape3d";
        box = padded_box<3>({-1.0, -1.0, -1.0 / 3.0}, {1.0, 1.0, 1.0 / 3.0});
        measure_interior = 2.0;
        measure_boundary = 34.0 / 3.0;
        witness = x0 = runge_center = Pt<3>(0.5, 0.5, 0.0);
        const double zt = 1.0 / 3.0;
        // Top and bottom faces split into two rectangles each, four full or
        // partial side faces, and the two faces of the notch.
        add_rect(2, zt, Pt<3>(0, 0, 1), 0, -1.0, 1.0, 1, 0.0, 1.0);
        add_rect(2, zt, Pt<3>(0, 0, 1), 0, 0.0, 1.0, 1, -1.0, 0.0);
        add_rect(2, -zt, Pt<3>(0, 0, -1), 0, -1.0, 1.0, 1, 0.0, 1.0);
        add_rect(2, -zt, Pt<3>(0, 0, -1), 0, 0.0, 1.0, 1, -1.0, 0.0);
        add_rect(0, 1.0, Pt<3>(1, 0, 0), 1, -1.0, 1.0, 2, -zt, zt);
        add_rect(1, 1.0, Pt<3>(0, 1, 0), 0, -1.0, 1.0, 2, -zt, zt);
        add_rect(0, -1.0, Pt<3>(-1, 0, 0), 1, 0.0, 1.0, 2, -zt, zt);
        add_rect(1, -1.0, Pt<3>(0, -1, 0), 0, 0.0, 1.0, 2, -zt, zt);
        add_rect(0, 0.0, Pt<3>(-1, 0, 0), 1, -1.0, 0.0, 2, -zt, zt);
        add_rect(1, 0.0, Pt<3>(0, -1, 0), 0, -1.0, 0.0, 2, -zt, zt);
    }
    double phi(const Pt<3>& p) const override {
        const double f = std::max(std::abs(p[2]) - 1.0 / 3.0,
                                  std::max(std::abs(p[0]) - 1.0, std::abs(p[1]) - 1.0));
        return std::max(f, std::min(-p[0], -p[1]));
    }
    Pt<3> grad_phi(const Pt<3>& p) const override {
        const double terms[4] = {std::abs(p[0]) - 1.0, std::abs(p[1]) - 1.0,
                                 std::abs(p[2]) - 1.0 / 3.0, std::min(-p[0], -p[1])};
        int best = 0;
        for (int i = 1; i < 4; ++i)
            if (terms[i] > terms[best]) best = i;
        switch (best) {
            case 0: return {p[0] >= 0 ? 1.0 : -1.0, 0.0, 0.0};
            case 1: return {0.0, p[1] >= 0 ? 1.0 : -1.0, 0.0};
            case 2: return {0.0, 0.0, p[2] >= 0 ? 1.0 : -1.0};
            default: return -p[0] <= -p[1] ? Pt<3>(-1.0, 0.0, 0.0) : Pt<3>(0.0, -1.0, 0.0);
        }
    }
    bool near_corner(const Pt<3>& p) const override { return patches_containing(p) >= 2; }
    std::vector<BoundarySample<3>> structured_boundary(double h, std::uint64_t) const override {
        // Grids are cut from global per-axis lattices so nodes on shared face
        // edges coincide exactly and collapse in the seam deduplication.
        const int nx = 2 * std::max(1, static_cast<int>(std::lround(1.0 / h)));
        const double step[3] = {2.0 / nx, 2.0 / nx,
                                (2.0 / 3.0) / std::max(1, static_cast<int>(std::lround(2.0 / 3.0 / h)))};
        std::vector<BoundarySample<3>> out;
        for (const auto& f : faces_) {
            const int n1 = std::max(1, static_cast<int>(std::lround((f.hi1 - f.lo1) / step[f.ax1])));
            const int n2 = std::max(1, static_cast<int>(std::lround((f.hi2 - f.lo2) / step[f.ax2])));
            for (int i = 0; i <= n1; ++i)
                for (int j = 0; j <= n2; ++j) {
                    Pt<3> p;
                    p[f.axis] = f.plane;
                    p[f.ax1] = f.lo1 + (f.hi1 - f.lo1) * i / n1;
                    p[f.ax2] = f.lo2 + (f.hi2 - f.lo2) * j / n2;
                    out.push_back({p, f.nrm});
                }
        }
        return out;
    }

  private:
    struct Face {
        int axis;
        double plane;
        Pt<3> nrm;
        int ax1, ax2;
        double lo1, hi1, lo2, hi2;
    };
    std::vector<Face> faces_;

    void add_rect(int axis, double plane, const Pt<3>& nrm, int ax1, double lo1, double hi1,
                  int ax2, double lo2, double hi2) {
        faces_.push_back({axis, plane, nrm, ax1, ax2, lo1, hi1, lo2, hi2});
        const Face f = faces_.back();
        Patch3 pa;
        pa.u0 = lo1;
        pa.u1 = hi1;
        pa.v0 = lo2;
        pa.v1 = hi2;
        pa.at = [f](double u, double v) {
            Pt<3> p;
            p[f.axis] = f.plane;
            p[f.ax1] = u;
            p[f.ax2] = v;
            return p;
        };
        pa.normal = [n = nrm](double, double) { return n; };
        pa.area_element = [](double, double) { return 1.0; };
        patches.push_back(std::move(pa));
    }
    int patches_containing(const Pt<3>& p) const {
        int count = 0;
        for (const auto& f : faces_) {
            if (std::abs(p[f.axis] - f.plane) > 1e-9) continue;
            if (p[f.ax1] < f.lo1 - 1e-9 || p[f.ax1] > f.hi1 + 1e-9) continue;
            if (p[f.ax2] < f.lo2 - 1e-9 || p[f.ax2] > f.hi2 + 1e-9) continue;
            ++count;
        }
        return count;
    }
};

class Torus final : public Domain<3> {
  public:
    static constexpr double R = 1.0;
    static constexpr double r = 0.32;
    Torus() {
        name = "torus";
        const double e = R + r;
        box = padded_box<3>({-e, -e, -r}, {e, e, r});
        measure_interior = 2.0 * kPi * kPi * R * r * r;
        measure_boundary = 4.0 * kPi * kPi * R * r;
        witness = x0 = runge_center = Pt<3>(1.0, 0.0, 0.0);
        Patch3 pa;
        pa.u0 = 0.0;
        pa.u1 = 2.0 * kPi;
        pa.v0 = 0.0;
        pa.v1 = 2.0 * kPi;
        pa.at = [](double u, double v) {
            const double rho = R + r * std::cos(v);
            return Pt<3>(rho * std::cos(u), rho * std::sin(u), r * std::sin(v));
        };
        pa.normal = [](double u, double v) {
            return Pt<3>(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
        };
        pa.area_element = [](double, double v) { return r * (R + r * std::cos(v)); };
        patches.push_back(std::move(pa));
    }
    double phi(const Pt<3>& p) const override {
        const double rho = std::hypot(p[0], p[1]);
        return (rho - R) * (rho - R) + p[2] * p[2] - r * r;
    }
    Pt<3> grad_phi(const Pt<3>& p) const override {
        const double rho = std::max(std::hypot(p[0], p[1]), 1e-300);
        const double c = 2.0 * (rho - R) / rho;
        return {c * p[0], c * p[1], 2.0 * p[2]};
    }
    std::vector<BoundarySample<3>> structured_boundary(double h, std::uint64_t seed) const override {
        const int nv = std::max(1, static_cast<int>(std::lround(2.0 * kPi * r / h)));
        std::vector<BoundarySample<3>> out;
        for (int iv = 0; iv < nv; ++iv) {
            const double v = 2.0 * kPi * iv / nv;
            const double circ = 2.0 * kPi * (R + r * std::cos(v));
            const int nu = std::max(1, static_cast<int>(std::lround(circ / h)));
            const double off = hash01(seed, static_cast<std::uint64_t>(iv));
            for (int iu = 0; iu < nu; ++iu) {
                const double u = 2.0 * kPi * (iu + off) / nu;
                out.push_back({patches[0].at(u, v), patches[0].normal(u, v)});
            }
        }
        return out;
    }
};

class DecoTetrahedron final : public Domain<3> {
  public:
    DecoTetrahedron() : a_(std::cbrt(40.0)) {
        name = "decotet";
        // Safe tight extent over the sampled maximum boundary coordinate
        // (about 1.062), kept at 1.1 so the padded box is reproducible.
        const double e = 1.1;
        box = padded_box<3>({-e, -e, -e}, {e, e, e});
        witness = x0 = runge_center = Pt<3>(1.0 / a_, -2.5 / a_, 1.0 / a_);
    }
    double phi(const Pt<3>& p) const override {
        const double x = a_ * p[0], y = a_ * p[1], z = a_ * p[2];
        const double quartic = sq(x - 2.0) * sq(x + 2.0) + sq(y - 2.0) * sq(y + 2.0) +
                               sq(z - 2.0) * sq(z + 2.0);
        return quartic + 3.0 * (x * x * y * y + y * y * z * z + z * z * x * x) + 6.0 * x * y * z -
               10.0 * (x * x + y * y + z * z) + 15.0;
    }
    Pt<3> grad_phi(const Pt<3>& p) const override {
        const double x = a_ * p[0], y = a_ * p[1], z = a_ * p[2];
        return {a_ * (2.0 * (x - 2.0) * sq(x + 2.0) + 2.0 * sq(x - 2.0) * (x + 2.0) +
                      6.0 * x * (y * y + z * z) + 6.0 * y * z - 20.0 * x),
                a_ * (2.0 * (y - 2.0) * sq(y + 2.0) + 2.0 * sq(y - 2.0) * (y + 2.0) +
                      6.0 * y * (x * x + z * z) + 6.0 * x * z - 20.0 * y),
                a_ * (2.0 * (z - 2.0) * sq(z + 2.0) + 2.0 * sq(z - 2.0) * (z + 2.0) +
                      6.0 * z * (x * x + y * y) + 6.0 * x * y - 20.0 * z)};
    }

  private:
    static double sq(double t) { return t * t; }
    double a_;
};

}  // namespace

template <int D>
std::optional<Pt<D>> project_to_boundary(const Domain<D>& d, const Pt<D>& p) {
    const double tol = 1e-12 * (1.0 + p.norm());
    Pt<D> x = p;
    for (int iter = 0; iter < 50; ++iter) {
        const double f = d.phi(x);
        if (std::abs(f) <= tol) return x;
        const Pt<D> g = d.grad_phi(x);
        const double gg = g.squaredNorm();
        if (gg < 1e-300) return std::nullopt;
        const Pt<D> step = (f / gg) * g;
        double lam = 1.0;
        bool advanced = false;
        for (int j = 0; j < 30; ++j) {
            const Pt<D> xn = x - lam * step;
            if (std::abs(d.phi(xn)) < std::abs(f)) {
                x = xn;
                advanced = true;
                break;
            }
            lam *= 0.5;
        }
        if (!advanced) return std::nullopt;
    }
    return std::abs(d.phi(x)) <= tol ? std::optional<Pt<D>>(x) : std::nullopt;
}

template <int D>
Pt<D> boundary_normal(const Domain<D>& d, const Pt<D>& p) {
    if (d.near_corner(p))
        throw std::domain_error("boundary_normal: corner locus of " + d.name +
                                " requires patch-provided normals");
    const Pt<D> g = d.grad_phi(p);
    const double n = g.norm();
    if (n < 1e-300) throw std::domain_error("boundary_normal: vanishing gradient");
    return g / n;
}

template std::optional<Pt<2>> project_to_boundary<2>(const Domain<2>&, const Pt<2>&);
template std::optional<Pt<3>> project_to_boundary<3>(const Domain<3>&, const Pt<3>&);
template Pt<2> boundary_normal<2>(const Domain<2>&, const Pt<2>&);
template Pt<3> boundary_normal<3>(const Domain<3>&, const Pt<3>&);

std::unique_ptr<Domain<2>> make_domain2(const std::string& name) {
    if (name == "ellipse") return std::make_unique<Ellipse>();
    if (name == "disk-sector") return std::make_unique<DiskSector>();
    if (name == "cassini") return std::make_unique<CassiniOval>();
    throw std::invalid_argument("make_domain2: unknown 2D domain '" + name + "'");
}

std::unique_ptr<Domain<3>> make_domain3(const std::string& name) {
    if (name == "ellipsoid") return std::make_unique<Ellipsoid>();
    if (name == "lshape3d") return std::make_unique<LShape3D>();
    if (name == "torus") return std::make_unique<Torus>();
    if (name == "decotet") return std::make_unique<DecoTetrahedron>();
    throw std::invalid_argument("make_domain3: unknown 3D domain '" + name + "'");
}

int domain_dim(const std::string& name) {
    if (name == "ellipse" || name == "disk-sector" || name == "cassini") return 2;
    if (name == "ellipsoid" || name == "lshape3d" || name == "torus" || name == "decotet") return 3;
    return 0;
}

std::vector<std::string> builtin_domain_names() {
    return {"ellipse", "disk-sector", "cassini", "ellipsoid", "lshape3d", "torus", "decotet"};
}

}  // namespace mfq
