#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>

namespace mfq {

template <int D>
using Pt = Eigen::Matrix<double, D, 1>;

template <int D>
struct Box {
    Pt<D> lo, hi;

    Pt<D> extent() const { return hi - lo; }
    double volume() const { return extent().prod(); }
    bool contains(const Pt<D>& p) const {
        for (int k = 0; k < D; ++k)
            if (p[k] < lo[k] || p[k] > hi[k]) return false;
        return true;
    }
};

// Deterministic 64-bit mixer used everywhere randomness is needed, so that
// node sets are bit-identical across runs and platforms.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform double in [0,1) derived from a seed and a counter.
inline double hash01(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + i * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return static_cast<double>(x) * 0x1.0p-64;
}

// Floating-point formatting for all file output: 17 significant digits
// round-trip doubles exactly.
std::string fmt_g17(double x);

}  // namespace mfq
