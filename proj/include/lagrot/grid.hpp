#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace lagrot {

using NodeIndex = std::array<int, 3>;

/// Uniform rectangular grid with isotropic spacing. Axes beyond `dim` are
/// inert (shape 1). Node order is row major with the last axis fastest.
struct Grid {
    int dim = 0;
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    double spacing = 0.0;
    std::array<int, 3> shape{1, 1, 1};

    Grid() = default;
    Grid(int dim_, std::array<double, 3> origin_, double spacing_, std::array<int, 3> shape_);

    std::int64_t node_count() const {
        std::int64_t n = 1;
        for (int a = 0; a < dim; ++a) n *= shape[a];
        return n;
    }

    std::int64_t index(const NodeIndex& iv) const {
        std::int64_t k = 0;
        for (int a = 0; a < dim; ++a) k = k * shape[a] + iv[a];
        return k;
    }

    NodeIndex unindex(std::int64_t k) const {
        NodeIndex iv{0, 0, 0};
        for (int a = dim - 1; a >= 0; --a) {
            iv[a] = static_cast<int>(k % shape[a]);
            k /= shape[a];
        }
        return iv;
    }

    std::array<double, 3> coord(const NodeIndex& iv) const {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) x[a] = origin[a] + spacing * iv[a];
        return x;
    }

    double axis_max(int a) const { return origin[a] + spacing * (shape[a] - 1); }

    bool is_interior(const NodeIndex& iv) const {
        for (int a = 0; a < dim; ++a)
            if (iv[a] == 0 || iv[a] == shape[a] - 1) return false;
        return true;
    }

    bool is_boundary(const NodeIndex& iv) const { return !is_interior(iv); }

    bool same_layout(const Grid& o) const;
};

/// 1D grid helper.
Grid make_grid_1d(double lo, double hi, int n);
/// Isotropic box grid [lo,hi]^dim with n nodes per axis.
Grid make_grid_box(int dim, double lo, double hi, int n);

/// Iterate all node multi-indices in row-major order (small helper for tests
/// and non-hot paths; hot loops index linearly).
std::vector<NodeIndex> all_nodes(const Grid& g);

}  // namespace lagrot
