#pragma once

#include "mfq/core.hpp"
#include "mfq/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mfq {

enum class GeneratorTag { AdvancingFront, CartesianGrid, Halton, Random };

std::string generator_tag_name(GeneratorTag tag);
GeneratorTag generator_tag_from_name(const std::string& name);

// Quadrature node set: strictly interior nodes plus boundary nodes carrying
// outward unit normals. Closed sets (the default) use interior followed by
// boundary nodes as the interior-integral nodes Y.
template <int D>
struct NodeSet {
    std::vector<Pt<D>> interior;
    std::vector<BoundarySample<D>> boundary;
    double h = 0.0;
    std::uint64_t seed = 0;
    bool closed = true;
    GeneratorTag tag = GeneratorTag::AdvancingFront;

    int n_Y() const {
        return static_cast<int>(interior.size()) +
               (closed ? static_cast<int>(boundary.size()) : 0);
    }
    int n_Z() const { return static_cast<int>(boundary.size()); }

    std::vector<Pt<D>> quadrature_nodes() const {
        std::vector<Pt<D>> out = interior;
        if (closed)
            for (const auto& bs : boundary) out.push_back(bs.point);
        return out;
    }
};

// First n Halton points (bases 2, 3[, 5]) with a seed-derived index offset,
// mapped affinely into the box.
template <int D>
std::vector<Pt<D>> halton_points(std::uint64_t seed, int n, const Box<D>& box);

template <int D>
NodeSet<D> rejection_sample(const Domain<D>& d, double h, GeneratorTag mode, std::uint64_t seed);

template <int D>
NodeSet<D> advancing_front(const Domain<D>& d, double h, std::uint64_t seed);

// Discretization node set X at spacing ratio*h, generated like the closed
// node set but from an offset seed stream so X and Y stay uncorrelated.
template <int D>
NodeSet<D> make_X(const Domain<D>& d, double h, std::uint64_t seed, double ratio = 1.6);

// Exact k-nearest-neighbor index with deterministic (distance, index)
// tie-breaking.
template <int D>
class KdTree {
  public:
    explicit KdTree(std::vector<Pt<D>> points);

    int size() const { return static_cast<int>(points_.size()); }
    const Pt<D>& point(int i) const { return points_[i]; }

    // Indices of the k nearest points, sorted by (distance, index).
    std::vector<int> knn(const Pt<D>& p, int k) const;

  private:
    struct Node {
        int left = -1, right = -1;
        int axis = 0;
        int index = 0;
    };
    int build(std::vector<int>& idx, int lo, int hi, int depth);
    void search(int node, const Pt<D>& p, int k,
                std::vector<std::pair<double, int>>& heap) const;

    std::vector<Pt<D>> points_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

template <int D>
void write_nodes_csv(const NodeSet<D>& ns, const std::string& path);

int node_csv_dim(const std::string& path);

template <int D>
NodeSet<D> read_nodes_csv(const std::string& path);

}  // namespace mfq
