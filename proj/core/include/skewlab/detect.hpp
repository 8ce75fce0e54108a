#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "skewlab/point_set.hpp"
#include "skewlab/table.hpp"

namespace skewlab {

// Witness of a non-trivial skew corner (x,y), (x,y+a), (x+a,y') with a != 0.
struct SkewCornerWitness {
    std::int64_t x = 0, y = 0, yprime = 0, a = 0;
    bool operator==(const SkewCornerWitness&) const = default;
};

// Witness of a six-point configuration x, x+y, x+2y, x+y+a, x+2y+2a, x+a
// in a 1-D set, non-trivial meaning a != 0 (y = 0 is permitted).
struct SixPointWitness {
    std::int64_t x = 0, y = 0, a = 0;
    bool operator==(const SixPointWitness&) const = default;
};

// A subset of [n] = {1,...,n}.
struct IntSet1 {
    std::int64_t n = 1;
    std::set<std::int64_t> elements;

    bool contains(std::int64_t v) const {
        return v >= 1 && v <= n && elements.count(v) > 0;
    }
};

// Lexicographically least (x,y,a,y') witness, or absent if A has no
// non-trivial skew corner.
std::optional<SkewCornerWitness> find_skew_corner(const PointSet2& A);

// Number of tuples (x,y,a,y'), a != 0, with all three points in A.
std::uint64_t count_skew_corners(const PointSet2& A);

// Exact average of f1(x,y) f2(x,y+a) f3(x+a,y') over (Z/NZ)^4.
// All three tables must live on the full torus of the same modulus.
double skew_form(const FunctionTable2& f1, const FunctionTable2& f2,
                 const FunctionTable2& f3);

// Lexicographically least (x,y,a) six-point witness in B, or absent.
std::optional<SixPointWitness> find_six_point_config(const IntSet1& B);

bool is_valid_six_point_witness(const SixPointWitness& w, const IntSet1& B);

// A = {(x,y) in [n]x[n] : y >= 1, x+2y <= n, and x, x+y, x+2y in B}.
PointSet2 lift_to_skew_instance(const IntSet1& B);

// Maps a skew corner of lift_to_skew_instance(B) to the six-point witness
// whose values are the union of the three lifted AP3s. Throws if w is not
// a corner of the lifted instance.
SixPointWitness map_witness(const SkewCornerWitness& w, const IntSet1& B);

}  // namespace skewlab
