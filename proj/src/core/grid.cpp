#include "core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace cevfb {

Grid::Grid(GridMode mode, std::vector<double> nodes, std::size_t uniform_prefix,
           double coarse_spacing)
    : mode_(mode),
      nodes_(std::move(nodes)),
      uniform_prefix_(uniform_prefix),
      coarse_spacing_(coarse_spacing) {}

std::size_t Grid::find_node(double x) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
    auto best = npos;
    double best_dist = 0.0;
    for (auto cand : {it, it == nodes_.begin() ? it : std::prev(it)}) {
        if (cand == nodes_.end()) continue;
        const double d = std::abs(*cand - x);
        if (best == npos || d < best_dist) {
            best = static_cast<std::size_t>(cand - nodes_.begin());
            best_dist = d;
        }
    }
    if (best == npos) return npos;
    const double local = best + 1 < nodes_.size() ? spacing(best + 1) : spacing(best);
    return best_dist <= 1e-9 * local ? best : npos;
}

namespace {

void check_spec(const GridSpec& spec) {
    auto bad = [](const std::string& what) { fail(ErrorCode::GridSpec, what); };
    if (!(spec.h > 0.0) || !std::isfinite(spec.h)) bad("h must be positive");
    if (!(spec.x_max > 0.0) || !std::isfinite(spec.x_max)) bad("x_max must be positive");
    if (spec.h > spec.x_max) bad("h exceeds the domain");
    if (spec.mode == GridMode::Refined) {
        if (!(spec.refine_ratio > 0.0 && spec.refine_ratio <= 1.0)) {
            bad("refinement ratio must lie in (0, 1]");
        }
        if (spec.fine_intervals < 8) bad("refined grids need at least 8 fine intervals");
    }
    for (std::size_t i = 0; i < spec.gamma.size(); ++i) {
        if (!(spec.gamma[i] > 0.0)) bad("gamma offsets must be positive");
        if (i > 0 && !(spec.gamma[i] > spec.gamma[i - 1])) {
            bad("gamma offsets must be strictly increasing");
        }
    }
}

}  // namespace

Grid build(const GridSpec& spec) {
    check_spec(spec);
    std::vector<double> nodes;
    const double h = spec.h;
    const double stop = spec.x_max - 1e-12 * spec.x_max;

    if (spec.mode == GridMode::Uniform) {
        auto m = static_cast<std::size_t>(std::llround(spec.x_max / h));
        if (static_cast<double>(m) * h < stop) ++m;
        nodes.reserve(m + 1);
        for (std::size_t i = 0; i <= m; ++i) nodes.push_back(static_cast<double>(i) * h);
        if (nodes.size() < 6) fail(ErrorCode::GridSpec, "grid too coarse for the boundary stencils");
        Grid grid(GridMode::Uniform, std::move(nodes), m, h);
        gamma_nodes(grid, spec);
        return grid;
    }

    const double ha = spec.refine_ratio * h;
    const auto nf = static_cast<std::size_t>(spec.fine_intervals);
    for (std::size_t i = 0; i <= nf; ++i) nodes.push_back(static_cast<double>(i) * ha);
    const double patch = static_cast<double>(nf) * ha;
    for (std::size_t j = 1; nodes.back() < stop; ++j) {
        nodes.push_back(patch + static_cast<double>(j) * h);
    }
    if (nodes.size() < 6) fail(ErrorCode::GridSpec, "grid too coarse for the boundary stencils");
    Grid grid(GridMode::Refined, std::move(nodes), nf, h);
    gamma_nodes(grid, spec);
    return grid;
}

std::array<std::size_t, 4> gamma_nodes(const Grid& grid, const GridSpec& spec) {
    std::array<std::size_t, 4> idx{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double target = spec.gamma[i] * spec.h;
        idx[i] = grid.find_node(target);
        if (idx[i] == Grid::npos || idx[i] == 0 || idx[i] >= grid.unknowns()) {
            std::ostringstream os;
            os << "gamma offset " << spec.gamma[i] << "*h = " << target
               << " is not an interior grid node";
            fail(ErrorCode::GridSpec, os.str());
        }
    }
    return idx;
}

}  // namespace cevfb
