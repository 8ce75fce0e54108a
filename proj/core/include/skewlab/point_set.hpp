#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "skewlab/domain.hpp"

namespace skewlab {

// A finite set of 2-D points over a grid [n]x[n] or torus (Z/NZ)^2.
// Immutable after construction; points are deduplicated and kept sorted.
class PointSet2 {
public:
    PointSet2() = default;

    PointSet2(Domain dom, std::vector<Point2> pts) : dom_(dom) {
        for (auto& p : pts) {
            if (!dom_.contains(p.x) || !dom_.contains(p.y))
                throw std::invalid_argument("PointSet2: point outside domain");
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        pts_ = std::move(pts);
        for (const auto& p : pts_) cols_[p.x].push_back(p.y);
    }

    const Domain& domain() const { return dom_; }
    const std::vector<Point2>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }

    bool contains(std::int64_t x, std::int64_t y) const {
        auto it = cols_.find(x);
        if (it == cols_.end()) return false;
        return std::binary_search(it->second.begin(), it->second.end(), y);
    }
    bool contains(const Point2& p) const { return contains(p.x, p.y); }

    // y-coordinates present in column x, ascending. Empty if no points.
    const std::vector<std::int64_t>& column(std::int64_t x) const {
        static const std::vector<std::int64_t> kEmpty;
        auto it = cols_.find(x);
        return it == cols_.end() ? kEmpty : it->second;
    }

    std::size_t column_count(std::int64_t x) const { return column(x).size(); }

    // Columns that contain at least one point, ascending.
    std::vector<std::int64_t> occupied_columns() const {
        std::vector<std::int64_t> xs;
        xs.reserve(cols_.size());
        for (const auto& [x, ys] : cols_) xs.push_back(x);
        return xs;
    }

    // Reflects all y-coordinates (grid: y -> n+1-y; cyclic: y -> -y mod N).
    PointSet2 reflect_y() const {
        std::vector<Point2> out;
        out.reserve(pts_.size());
        for (const auto& p : pts_) {
            std::int64_t y = dom_.kind == DomainKind::grid
                                 ? dom_.size + 1 - p.y
                                 : (dom_.size - p.y) % dom_.size;
            out.push_back({p.x, y});
        }
        return PointSet2(dom_, std::move(out));
    }

    bool operator==(const PointSet2& o) const {
        return dom_ == o.dom_ && pts_ == o.pts_;
    }

private:
    Domain dom_ = Domain::grid(1);
    std::vector<Point2> pts_;
    std::map<std::int64_t, std::vector<std::int64_t>> cols_;
};

}  // namespace skewlab
