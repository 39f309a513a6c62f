#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace cevfb {

enum class GridMode { Uniform, Refined };

/// Spatial mesh request on [0, x_max] in log-moneyness. `gamma` holds the
/// staggered sampling offsets of the boundary-derivative estimator in units
/// of the coarse spacing.
struct GridSpec {
    double h = 0.1;
    double x_max = 3.0;
    GridMode mode = GridMode::Uniform;
    double refine_ratio = 0.25;
    int fine_intervals = 8;
    std::array<double, 4> gamma{1.0, 2.0, 3.0, 4.0};
};

class Grid {
public:
    /// Nodes x_0 = 0 < ... < x_M with x_M >= x_max. The last node carries the
    /// far-field Dirichlet zero, so the value system has M unknowns.
    Grid(GridMode mode, std::vector<double> nodes, std::size_t uniform_prefix,
         double coarse_spacing);

    GridMode mode() const { return mode_; }
    std::span<const double> nodes() const { return nodes_; }
    double x(std::size_t i) const { return nodes_[i]; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t unknowns() const { return nodes_.size() - 1; }

    /// h_i = x_i - x_{i-1}, i >= 1.
    double spacing(std::size_t i) const { return nodes_[i] - nodes_[i - 1]; }

    /// Number of equal intervals starting at x_0.
    std::size_t uniform_prefix() const { return uniform_prefix_; }
    double boundary_spacing() const { return nodes_[1] - nodes_[0]; }
    double coarse_spacing() const { return coarse_spacing_; }

    /// Index of the node at coordinate `x` (within 1e-9 of the local
    /// spacing), or npos.
    std::size_t find_node(double x) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    GridMode mode_;
    std::vector<double> nodes_;
    std::size_t uniform_prefix_;
    double coarse_spacing_;
};

/// Throws GridSpec on invalid or non-aligned specs.
Grid build(const GridSpec& spec);

/// Node indices of gamma_i * h. Throws GridSpec when an offset is not a node.
std::array<std::size_t, 4> gamma_nodes(const Grid& grid, const GridSpec& spec);

}  // namespace cevfb
