#pragma once

#include <cstdint>
#include <compare>
#include <stdexcept>
#include <string>

namespace skewlab {

// Two ambient settings: the integer grid [n] x [n] with 1-based
// coordinates and no wraparound, and the torus (Z/NZ)^2 with residue
// coordinates 0..N-1 and arithmetic mod N.
enum class DomainKind { grid, cyclic };

struct Domain {
    DomainKind kind = DomainKind::grid;
    std::int64_t size = 1;

    Domain() = default;
    Domain(DomainKind k, std::int64_t n) : kind(k), size(n) {
        if (n < 1) throw std::invalid_argument("Domain: size must be >= 1");
    }

    static Domain grid(std::int64_t n) { return Domain(DomainKind::grid, n); }
    static Domain cyclic(std::int64_t n) { return Domain(DomainKind::cyclic, n); }

    bool contains(std::int64_t c) const {
        return kind == DomainKind::grid ? (c >= 1 && c <= size)
                                        : (c >= 0 && c < size);
    }

    // Reduces a coordinate into the domain; throws for out-of-range grid
    // coordinates (grid arithmetic never wraps).
    std::int64_t normalize(std::int64_t c) const {
        if (kind == DomainKind::cyclic) {
            std::int64_t r = c % size;
            return r < 0 ? r + size : r;
        }
        if (!contains(c)) throw std::out_of_range("grid coordinate out of [1,n]");
        return c;
    }

    bool operator==(const Domain&) const = default;

    std::string kind_name() const {
        return kind == DomainKind::grid ? "grid" : "cyclic";
    }
};

struct Point2 {
    std::int64_t x = 0;
    std::int64_t y = 0;
    auto operator<=>(const Point2&) const = default;
};

}  // namespace skewlab
