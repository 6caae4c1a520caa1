#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <unordered_map>
#include <vector>

namespace dicke {

using ContourPoint = std::array<double, 2>;
using Polyline = std::vector<ContourPoint>;

namespace detail {

// Grid edge identifier; dir 0 = along axis0 from (i,j) to (i+1,j),
// dir 1 = along axis1 from (i,j) to (i,j+1).
inline long edge_key(int i, int j, int dir, int n1) {
    return (static_cast<long>(i) * n1 + j) * 2 + dir;
}

} // namespace detail

// Marching-squares level set of a scalar field sampled on a rectangular grid.
// field(i, j) lives at coordinates (xs[i], ys[j]); cells touching a NaN sample
// emit nothing.  Segments are stitched into ordered polylines; output
// coordinates are in axis units (linear interpolation along cell edges).
inline std::vector<Polyline> marching_squares(const Eigen::MatrixXd& field,
                                              const std::vector<double>& xs,
                                              const std::vector<double>& ys, double level) {
    const int n0 = static_cast<int>(xs.size());
    const int n1 = static_cast<int>(ys.size());
    std::vector<Polyline> out;
    if (n0 < 2 || n1 < 2) return out;

    std::unordered_map<long, ContourPoint> points;
    std::vector<std::array<long, 2>> segments;
    std::unordered_map<long, std::vector<int>> adjacency;

    auto interp = [&](int i0, int j0, int i1, int j1) -> ContourPoint {
        const double f0 = field(i0, j0), f1 = field(i1, j1);
        const double t = (level - f0) / (f1 - f0);
        return {xs[i0] + t * (xs[i1] - xs[i0]), ys[j0] + t * (ys[j1] - ys[j0])};
    };
    auto add_segment = [&](long ea, ContourPoint pa, long eb, ContourPoint pb) {
        points.emplace(ea, pa);
        points.emplace(eb, pb);
        const int id = static_cast<int>(segments.size());
        segments.push_back({ea, eb});
        adjacency[ea].push_back(id);
        adjacency[eb].push_back(id);
    };

    for (int i = 0; i + 1 < n0; ++i) {
        for (int j = 0; j + 1 < n1; ++j) {
            const double fa = field(i, j), fb = field(i + 1, j);
            const double fc = field(i + 1, j + 1), fd = field(i, j + 1);
            if (std::isnan(fa) || std::isnan(fb) || std::isnan(fc) || std::isnan(fd)) continue;
            int c = 0;
            if (fa > level) c |= 1;
            if (fb > level) c |= 2;
            if (fc > level) c |= 4;
            if (fd > level) c |= 8;
            if (c == 0 || c == 15) continue;
            const long eAB = detail::edge_key(i, j, 0, n1);
            const long eBC = detail::edge_key(i + 1, j, 1, n1);
            const long eCD = detail::edge_key(i, j + 1, 0, n1);
            const long eDA = detail::edge_key(i, j, 1, n1);
            const auto pAB = [&] { return interp(i, j, i + 1, j); };
            const auto pBC = [&] { return interp(i + 1, j, i + 1, j + 1); };
            const auto pCD = [&] { return interp(i, j + 1, i + 1, j + 1); };
            const auto pDA = [&] { return interp(i, j, i, j + 1); };
            switch (c) {
                case 1: case 14: add_segment(eAB, pAB(), eDA, pDA()); break;
                case 2: case 13: add_segment(eAB, pAB(), eBC, pBC()); break;
                case 3: case 12: add_segment(eBC, pBC(), eDA, pDA()); break;
                case 4: case 11: add_segment(eBC, pBC(), eCD, pCD()); break;
                case 6: case 9:  add_segment(eAB, pAB(), eCD, pCD()); break;
                case 7: case 8:  add_segment(eCD, pCD(), eDA, pDA()); break;
                case 5: case 10: {
                    // saddle: disambiguate with the cell-center average
                    const bool center_above = 0.25 * (fa + fb + fc + fd) > level;
                    const bool join_ac = (c == 5) == center_above;
                    if (join_ac) {
                        add_segment(eAB, pAB(), eBC, pBC());
                        add_segment(eCD, pCD(), eDA, pDA());
                    } else {
                        add_segment(eAB, pAB(), eDA, pDA());
                        add_segment(eBC, pBC(), eCD, pCD());
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // stitch segments sharing grid edges into polylines
    std::vector<bool> used(segments.size(), false);
    auto next_unused = [&](long edge, int exclude) -> int {
        for (int id : adjacency[edge])
            if (!used[id] && id != exclude) return id;
        return -1;
    };
    for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
        if (used[s]) continue;
        used[s] = true;
        std::vector<long> chain = {segments[s][0], segments[s][1]};
        for (int end = 0; end < 2; ++end) {
            for (;;) {
                const long tip = end == 0 ? chain.back() : chain.front();
                const int id = next_unused(tip, -1);
                if (id < 0) break;
                used[id] = true;
                const long other = segments[id][0] == tip ? segments[id][1] : segments[id][0];
                if (end == 0)
                    chain.push_back(other);
                else
                    chain.insert(chain.begin(), other);
            }
        }
        Polyline line;
        line.reserve(chain.size());
        for (long e : chain) line.push_back(points.at(e));
        out.push_back(std::move(line));
    }
    return out;
}

} // namespace dicke
