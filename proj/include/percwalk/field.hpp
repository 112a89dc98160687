#pragma once

#include <cstdint>

#include "percwalk/lattice.hpp"

namespace percwalk {

// 64-bit mixing finalizer (splitmix64). Full avalanche: every input bit
// affects every output bit with probability ~1/2.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) { return mix64(h ^ mix64(v)); }

// Map a signed coordinate into the hash stream.
inline uint64_t zigzag64(int64_t v) {
    return (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63);
}

// The single source of randomness. One seed defines U(e) for every edge of
// the infinite lattice, lazily; configurations at all p are coupled through
// this field.
struct FieldSeed {
    uint64_t seed = 0;
};

// Seed for replicate i, derived so replicate sets extend without recomputation.
inline FieldSeed replicate_seed(FieldSeed master, uint64_t i) {
    return FieldSeed{hash_combine(master.seed, 0x7265706cULL ^ i)};
}

// Named sub-stream of a master seed (internal calibration runs etc.).
inline FieldSeed derived_stream(FieldSeed master, uint64_t tag) {
    return FieldSeed{hash_combine(master.seed, 0x73747265616dULL ^ tag)};
}

// U(e) in (0,1): a pure deterministic counter-based function of
// (seed, canonical edge). The edge key is (lower endpoint, axis). The raw
// overload is the allocation-free form used by solver inner loops.
inline double edge_uniform_raw(FieldSeed field, int dim, const int64_t* lower, int axis) {
    uint64_t h = hash_combine(field.seed, 0x65646765ULL);  // domain tag
    h = hash_combine(h, static_cast<uint64_t>(dim));
    for (int i = 0; i < dim; ++i) h = hash_combine(h, zigzag64(lower[i]));
    h = hash_combine(h, static_cast<uint64_t>(axis));
    // 53 uniform bits, shifted into the open interval (0,1)
    return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

inline double edge_uniform(FieldSeed field, const Edge& e) {
    return edge_uniform_raw(field, e.a.dim(), e.a.c.data(), e.axis());
}

// omega_p(e) via the inverse-CDF coupling: the Bernoulli(p) distribution
// function is 1-p on [0,1), so its pseudo-inverse sends s to 1 iff s > 1-p.
inline bool is_open_raw(FieldSeed field, int dim, const int64_t* lower, int axis, double p) {
    return edge_uniform_raw(field, dim, lower, axis) > 1.0 - p;
}

inline bool is_open(FieldSeed field, const Edge& e, double p) {
    return edge_uniform(field, e) > 1.0 - p;
}

// A percolation configuration: one field seed plus a retention parameter.
// Immutable and freely shareable across threads.
struct OpenConfig {
    FieldSeed field;
    double p = 0.0;

    bool open(const Edge& e) const { return is_open(field, e, p); }
};

}  // namespace percwalk
