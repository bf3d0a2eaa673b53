#include "mfq/nodegen.hpp"

#include "mfq/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mfq {

std::string generator_tag_name(GeneratorTag tag) {
    switch (tag) {
        case GeneratorTag::AdvancingFront: return "advancing-front";
        case GeneratorTag::CartesianGrid: return "grid";
        case GeneratorTag::Halton: return "halton";
        default: return "random";
    }
}

GeneratorTag generator_tag_from_name(const std::string& name) {
    if (name == "advancing-front") return GeneratorTag::AdvancingFront;
    if (name == "grid") return GeneratorTag::CartesianGrid;
    if (name == "halton") return GeneratorTag::Halton;
    if (name == "random") return GeneratorTag::Random;
    throw std::invalid_argument("unknown node generator '" + name + "'");
}

namespace {

// Uniform cell grid for fixed-radius neighbor rejection. Radii up to the
// cell size are covered by scanning the 3^D neighborhood.
template <int D>
class CellGrid {
  public:
    explicit CellGrid(double cell) : cell_(cell) {}

    void insert(const Pt<D>& p) { buckets_[key(p)].push_back(p); }

    bool any_within(const Pt<D>& p, double r) const {
        const double r2 = r * r;
        long long c[D];
        for (int k = 0; k < D; ++k) c[k] = coord(p[k]);
        long long nb[D];
        const int total = D == 2 ? 9 : 27;
        for (int m = 0; m < total; ++m) {
            int rem = m;
            for (int k = 0; k < D; ++k) {
                nb[k] = c[k] + rem % 3 - 1;
                rem /= 3;
            }
            const auto it = buckets_.find(mix(nb));
            if (it == buckets_.end()) continue;
            for (const auto& q : it->second)
                if ((q - p).squaredNorm() < r2) return true;
        }
        return false;
    }

  private:
    long long coord(double x) const { return static_cast<long long>(std::floor(x / cell_)); }
    std::uint64_t key(const Pt<D>& p) const {
        long long c[D];
        for (int k = 0; k < D; ++k) c[k] = coord(p[k]);
        return mix(c);
    }
    static std::uint64_t mix(const long long* c) {
        std::uint64_t x = 0;
        for (int k = 0; k < D; ++k) x = splitmix64(x ^ static_cast<std::uint64_t>(c[k]));
        return x;
    }

    double cell_;
    std::unordered_map<std::uint64_t, std::vector<Pt<D>>> buckets_;
};

double radical_inverse(std::uint64_t k, int base) {
    double f = 1.0, r = 0.0;
    while (k > 0) {
        f /= base;
        r += f * static_cast<double>(k % base);
        k /= base;
    }
    return r;
}

// Boundary nodes of a 2D domain by arc-length marching at spacing h along
// each patch. Patch endpoints are emitted exactly; closed patches wrap.
std::vector<BoundarySample<2>> march_boundary(const Domain<2>& d, double h) {
    std::vector<BoundarySample<2>> out;
    for (const auto& pa : d.patches) {
        const auto speed = [&pa](double t) { return pa.velocity(t).norm(); };
        constexpr int kPanels = 2048;
        std::vector<double> cum(kPanels + 1, 0.0);
        const double dt = (pa.t1 - pa.t0) / kPanels;
        for (int i = 1; i <= kPanels; ++i)
            cum[i] = cum[i - 1] +
                     detail::gk15_panel(speed, pa.t0 + (i - 1) * dt, pa.t0 + i * dt).kronrod;
        const double len = cum[kPanels];
        const int n = std::max(1, static_cast<int>(std::lround(len / h)));
        const int count = pa.closed ? n : n + 1;
        for (int m = 0; m < count; ++m) {
            double t;
            if (m == 0) {
                t = pa.t0;
            } else if (!pa.closed && m == count - 1) {
                t = pa.t1;
            } else {
                const double s = len * m / n;
                int i = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), s) -
                                         cum.begin()) -
                        1;
                i = std::min(std::max(i, 0), kPanels - 1);
                double lo = pa.t0 + i * dt, hi = pa.t0 + (i + 1) * dt;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double arc =
                        cum[i] + detail::gk15_panel(speed, pa.t0 + i * dt, mid).kronrod;
                    (arc < s ? lo : hi) = mid;
                }
                t = 0.5 * (lo + hi);
            }
            out.push_back({pa.at(t), pa.normal(t)});
        }
    }
    return out;
}

template <int D>
std::vector<BoundarySample<D>> dedup_seams(const std::vector<BoundarySample<D>>& raw) {
    std::vector<BoundarySample<D>> out;
    CellGrid<D> grid(1e-8);
    for (const auto& bs : raw) {
        if (grid.any_within(bs.point, 1e-9)) continue;
        grid.insert(bs.point);
        out.push_back(bs);
    }
    return out;
}

template <int D>
std::vector<BoundarySample<D>> boundary_nodes(const Domain<D>& d, double h, std::uint64_t seed) {
    if constexpr (D == 2) {
        (void)seed;
        return dedup_seams<2>(march_boundary(d, h));
    } else {
        return dedup_seams<3>(d.structured_boundary(h, seed));
    }
}

template <int D>
std::vector<Pt<D>> front_directions(std::uint64_t seed, std::uint64_t i);

template <>
std::vector<Pt<2>> front_directions<2>(std::uint64_t seed, std::uint64_t i) {
    constexpr double kTwoPi = 6.28318530717958647692;
    const double ang = kTwoPi * hash01(seed, i);
    std::vector<Pt<2>> dirs(6);
    for (int k = 0; k < 6; ++k)
        dirs[k] = Pt<2>(std::cos(kTwoPi * k / 6 + ang), std::sin(kTwoPi * k / 6 + ang));
    return dirs;
}

template <>
std::vector<Pt<3>> front_directions<3>(std::uint64_t seed, std::uint64_t i) {
    constexpr double kTwoPi = 6.28318530717958647692;
    static const std::vector<Pt<3>> ico = [] {
        const double g = 0.5 * (1.0 + std::sqrt(5.0));
        std::vector<Pt<3>> v;
        for (int s1 : {1, -1})
            for (int s2 : {1, -1}) {
                v.emplace_back(0.0, s1, s2 * g);
                v.emplace_back(s1, s2 * g, 0.0);
                v.emplace_back(s1 * g, 0.0, s2);
            }
        for (auto& p : v) p.normalize();
        return v;
    }();
    const double a = kTwoPi * hash01(seed, 3 * i);
    const double b = kTwoPi * hash01(seed, 3 * i + 1);
    const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
    Eigen::Matrix3d rz, ry;
    rz << ca, -sa, 0, sa, ca, 0, 0, 0, 1;
    ry << cb, 0, sb, 0, 1, 0, -sb, 0, cb;
    const Eigen::Matrix3d rot = rz * ry;
    std::vector<Pt<3>> dirs(ico.size());
    for (std::size_t k = 0; k < ico.size(); ++k) dirs[k] = rot * ico[k];
    return dirs;
}

}  // namespace

template <int D>
std::vector<Pt<D>> halton_points(std::uint64_t seed, int n, const Box<D>& box) {
    static constexpr int kBases[3] = {2, 3, 5};
    const std::uint64_t offset = 1009 * seed;
    std::vector<Pt<D>> out(std::max(n, 0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < D; ++k)
            out[i][k] = box.lo[k] +
                        (box.hi[k] - box.lo[k]) * radical_inverse(offset + i + 1, kBases[k]);
    return out;
}

template <int D>
NodeSet<D> rejection_sample(const Domain<D>& d, double h, GeneratorTag mode, std::uint64_t seed) {
    if (h <= 0.0) throw std::invalid_argument("rejection_sample: h must be positive");
    const Box<D>& box = d.box;
    const long long n_target = std::llround(box.volume() * std::pow(h, -D));

    std::vector<Pt<D>> candidates;
    if (mode == GeneratorTag::CartesianGrid) {
        Pt<D> shift;
        for (int k = 0; k < D; ++k) shift[k] = h * hash01(seed, static_cast<std::uint64_t>(k));
        int counts[D];
        for (int k = 0; k < D; ++k)
            counts[k] = static_cast<int>(std::floor((box.hi[k] - box.lo[k] - shift[k]) / h)) + 1;
        if constexpr (D == 2) {
            for (int i = 0; i < counts[0]; ++i)
                for (int j = 0; j < counts[1]; ++j)
                    candidates.push_back(
                        {box.lo[0] + shift[0] + i * h, box.lo[1] + shift[1] + j * h});
        } else {
            for (int i = 0; i < counts[0]; ++i)
                for (int j = 0; j < counts[1]; ++j)
                    for (int l = 0; l < counts[2]; ++l)
                        candidates.push_back({box.lo[0] + shift[0] + i * h,
                                              box.lo[1] + shift[1] + j * h,
                                              box.lo[2] + shift[2] + l * h});
        }
    } else if (mode == GeneratorTag::Halton) {
        candidates = halton_points<D>(seed, static_cast<int>(n_target), box);
    } else if (mode == GeneratorTag::Random) {
        const std::uint64_t stream = seed ^ 0x94d049bb133111ebULL;
        candidates.resize(n_target);
        for (long long i = 0; i < n_target; ++i)
            for (int k = 0; k < D; ++k)
                candidates[i][k] =
                    box.lo[k] + (box.hi[k] - box.lo[k]) *
                                    hash01(stream, static_cast<std::uint64_t>(i) * D + k);
    } else {
        throw std::invalid_argument("rejection_sample: advancing-front is not a sampling mode");
    }

    NodeSet<D> ns;
    ns.h = h;
    ns.seed = seed;
    ns.tag = mode;
    CellGrid<D> grid(h);
    for (const auto& p : candidates) {
        const double f = d.phi(p);
        const Pt<D> g = d.grad_phi(p);
        const double dist = std::abs(f) / std::max(g.norm(), 1e-300);
        if (f < 0.0 && dist > h) {
            ns.interior.push_back(p);
        } else if (dist <= h) {
            const auto proj = project_to_boundary(d, p);
            if (!proj) continue;
            if (grid.any_within(*proj, h)) continue;
            grid.insert(*proj);
            const Pt<D> gn = d.grad_phi(*proj);
            ns.boundary.push_back({*proj, gn / gn.norm()});
        }
    }
    return ns;
}

template <int D>
NodeSet<D> advancing_front(const Domain<D>& d, double h, std::uint64_t seed) {
    if (h <= 0.0) throw std::invalid_argument("advancing_front: h must be positive");
    std::vector<BoundarySample<D>> bnd = boundary_nodes<D>(d, h, seed);
    if (bnd.empty()) {
        // No parametric description: boundary nodes from rejection sampling,
        // projection, and thinning; the front still grows from them.
        NodeSet<D> rej = rejection_sample<D>(d, h, GeneratorTag::Halton, seed);
        bnd = std::move(rej.boundary);
    }
    if (bnd.empty()) throw std::runtime_error("advancing_front: no boundary nodes for " + d.name);

    std::vector<Pt<D>> pts;
    pts.reserve(bnd.size() * 4);
    CellGrid<D> grid(h);
    for (const auto& bs : bnd) {
        pts.push_back(bs.point);
        grid.insert(bs.point);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Pt<D> p = pts[i];
        for (const Pt<D>& dir : front_directions<D>(seed, static_cast<std::uint64_t>(i))) {
            const Pt<D> c = p + h * dir;
            const double f = d.phi(c);
            if (f >= 0.0) continue;
            const Pt<D> g = d.grad_phi(c);
            if (std::abs(f) / std::max(g.norm(), 1e-300) < 0.5 * h) continue;
            if (grid.any_within(c, 0.9 * h)) continue;
            pts.push_back(c);
            grid.insert(c);
        }
    }

    NodeSet<D> ns;
    ns.h = h;
    ns.seed = seed;
    ns.tag = GeneratorTag::AdvancingFront;
    ns.interior.assign(pts.begin() + static_cast<std::ptrdiff_t>(bnd.size()), pts.end());
    ns.boundary = std::move(bnd);
    return ns;
}

template <int D>
NodeSet<D> make_X(const Domain<D>& d, double h, std::uint64_t seed, double ratio) {
    return advancing_front<D>(d, ratio * h, seed + 1000);
}

template <int D>
KdTree<D>::KdTree(std::vector<Pt<D>> points) : points_(std::move(points)) {
    if (points_.empty()) return;
    std::vector<int> idx(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) idx[i] = static_cast<int>(i);
    nodes_.reserve(points_.size());
    root_ = build(idx, 0, static_cast<int>(points_.size()), 0);
}

template <int D>
int KdTree<D>::build(std::vector<int>& idx, int lo, int hi, int depth) {
    if (lo >= hi) return -1;
    const int axis = depth % D;
    const int mid = (lo + hi) / 2;
    std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                     [&](int a, int b) {
                         const double xa = points_[a][axis], xb = points_[b][axis];
                         return xa < xb || (xa == xb && a < b);
                     });
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back({-1, -1, axis, idx[mid]});
    const int left = build(idx, lo, mid, depth + 1);
    const int right = build(idx, mid + 1, hi, depth + 1);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

template <int D>
void KdTree<D>::search(int node, const Pt<D>& p, int k,
                       std::vector<std::pair<double, int>>& heap) const {
    if (node < 0) return;
    const Node& nd = nodes_[node];
    const Pt<D>& x = points_[nd.index];
    const std::pair<double, int> cand((x - p).squaredNorm(), nd.index);
    if (static_cast<int>(heap.size()) < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
    } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
    }
    const double diff = p[nd.axis] - x[nd.axis];
    const int near = diff < 0 ? nd.left : nd.right;
    const int far = diff < 0 ? nd.right : nd.left;
    search(near, p, k, heap);
    if (static_cast<int>(heap.size()) < k || diff * diff <= heap.front().first)
        search(far, p, k, heap);
}

template <int D>
std::vector<int> KdTree<D>::knn(const Pt<D>& p, int k) const {
    if (k > size()) throw std::invalid_argument("knn: k exceeds index size");
    std::vector<std::pair<double, int>> heap;
    heap.reserve(k);
    search(root_, p, k, heap);
    std::sort(heap.begin(), heap.end());
    std::vector<int> out(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].second;
    return out;
}

template <int D>
void write_nodes_csv(const NodeSet<D>& ns, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << D << ',' << generator_tag_name(ns.tag) << '\n';
    for (const auto& p : ns.interior) {
        for (int k = 0; k < D; ++k) f << fmt_g17(p[k]) << ',';
        f << "interior\n";
    }
    for (const auto& bs : ns.boundary) {
        for (int k = 0; k < D; ++k) f << fmt_g17(bs.point[k]) << ',';
        f << "boundary";
        for (int k = 0; k < D; ++k) f << ',' << fmt_g17(bs.normal[k]);
        f << '\n';
    }
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

int node_csv_dim(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty node file '" + path + "'");
    const auto fields = split_csv(line);
    const int dim = std::atoi(fields[0].c_str());
    if (dim != 2 && dim != 3) throw std::runtime_error("bad node file header in '" + path + "'");
    return dim;
}

template <int D>
NodeSet<D> read_nodes_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty node file '" + path + "'");
    auto header = split_csv(line);
    if (header.size() < 2 || std::atoi(header[0].c_str()) != D)
        throw std::runtime_error("node file dimension mismatch in '" + path + "'");
    NodeSet<D> ns;
    ns.tag = generator_tag_from_name(header[1]);
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        const auto bad = [&] {
            return std::runtime_error("malformed node row at line " + std::to_string(lineno) +
                                      " of '" + path + "'");
        };
        if (fields.size() < static_cast<std::size_t>(D + 1)) throw bad();
        Pt<D> p;
        for (int k = 0; k < D; ++k) p[k] = std::strtod(fields[k].c_str(), nullptr);
        const std::string& kind = fields[D];
        if (kind == "interior") {
            if (fields.size() != static_cast<std::size_t>(D + 1)) throw bad();
            ns.interior.push_back(p);
        } else if (kind == "boundary") {
            if (fields.size() != static_cast<std::size_t>(2 * D + 1)) throw bad();
            Pt<D> n;
            for (int k = 0; k < D; ++k) n[k] = std::strtod(fields[D + 1 + k].c_str(), nullptr);
            ns.boundary.push_back({p, n});
        } else {
            throw bad();
        }
    }
    return ns;
}

template std::vector<Pt<2>> halton_points<2>(std::uint64_t, int, const Box<2>&);
template std::vector<Pt<3>> halton_points<3>(std::uint64_t, int, const Box<3>&);
template NodeSet<2> rejection_sample<2>(const Domain<2>&, double, GeneratorTag, std::uint64_t);
template NodeSet<3> rejection_sample<3>(const Domain<3>&, double, GeneratorTag, std::uint64_t);
template NodeSet<2> advancing_front<2>(const Domain<2>&, double, std::uint64_t);
template NodeSet<3> advancing_front<3>(const Domain<3>&, double, std::uint64_t);
template NodeSet<2> make_X<2>(const Domain<2>&, double, std::uint64_t, double);
template NodeSet<3> make_X<3>(const Domain<3>&, double, std::uint64_t, double);
template class KdTree<2>;
template class KdTree<3>;
template void write_nodes_csv<2>(const NodeSet<2>&, const std::string&);
template void write_nodes_csv<3>(const NodeSet<3>&, const std::string&);
template NodeSet<2> read_nodes_csv<2>(const std::string&);
template NodeSet<3> read_nodes_csv<3>(const std::string&);

}  // namespace mfq
