#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "swv/errors.hpp"
#include "swv/matrix.hpp"

namespace swv {

struct Subsystem {
    int id;
    Mat a;
};

/**
 * @brief A finite family of linear subsystems plus the admissible transitions.
 *
 * Subsystem ids are 1..N with no gaps, every dynamics matrix is d x d, finite,
 * and full rank, and every edge (p, q) connects two distinct known ids.
 */
class SubsystemFamily {
public:
    SubsystemFamily(std::vector<Subsystem> subsystems, std::vector<std::pair<int, int>> edges) {
        if (subsystems.empty()) throw ConfigError("family needs at least one subsystem");
        std::sort(subsystems.begin(), subsystems.end(),
                  [](const Subsystem& a, const Subsystem& b) { return a.id < b.id; });
        const int n = static_cast<int>(subsystems.size());
        dim_ = subsystems.front().a.rows();
        for (int k = 0; k < n; ++k) {
            const Subsystem& s = subsystems[static_cast<std::size_t>(k)];
            if (s.id != k + 1)
                throw ConfigError("subsystem ids must be 1.." + std::to_string(n) +
                                  " without gaps");
            if (!s.a.square() || s.a.rows() != dim_)
                throw DimensionMismatchError("subsystem " + std::to_string(s.id) +
                                             " is not " + std::to_string(dim_) + "x" +
                                             std::to_string(dim_));
            if (!s.a.all_finite())
                throw ConfigError("subsystem " + std::to_string(s.id) + " has non-finite entries");
            if (std::abs(determinant(s.a)) <= 1e-12)
                throw ConfigError("subsystem " + std::to_string(s.id) + " is rank deficient");
            modes_.push_back(s.a);
        }

        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        for (const auto& [p, q] : edges) {
            if (p < 1 || p > n || q < 1 || q > n)
                throw ConfigError("edge (" + std::to_string(p) + "," + std::to_string(q) +
                                  ") references an unknown subsystem");
            if (p == q)
                throw ConfigError("self-loop edge (" + std::to_string(p) + "," +
                                  std::to_string(q) + ") is not allowed");
        }
        edges_ = std::move(edges);
    }

    std::size_t dim() const { return dim_; }
    int count() const { return static_cast<int>(modes_.size()); }

    bool has_mode(int id) const { return id >= 1 && id <= count(); }

    const Mat& mode(int id) const {
        if (!has_mode(id)) throw UnknownModeError("unknown subsystem id " + std::to_string(id));
        return modes_[static_cast<std::size_t>(id - 1)];
    }

    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    bool has_edge(int p, int q) const {
        return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(p, q));
    }

    std::vector<int> out_neighbors(int p) const {
        std::vector<int> out;
        for (const auto& [from, to] : edges_)
            if (from == p) out.push_back(to);
        return out;
    }

private:
    std::size_t dim_ = 0;
    std::vector<Mat> modes_;
    std::vector<std::pair<int, int>> edges_;
};

} // namespace swv
