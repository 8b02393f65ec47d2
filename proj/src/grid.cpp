#include "lagrot/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lagrot/field.hpp"

namespace lagrot {

Grid::Grid(int dim_, std::array<double, 3> origin_, double spacing_, std::array<int, 3> shape_)
    : dim(dim_), origin(origin_), spacing(spacing_), shape(shape_) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Grid: dim must be 1, 2, or 3");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("Grid: spacing must be positive and finite");
    for (int a = 0; a < dim; ++a) {
        if (shape[a] < 3)
            throw std::invalid_argument("Grid: shape must be >= 3 per axis, got " +
                                        std::to_string(shape[a]));
        if (!std::isfinite(origin[a])) throw std::invalid_argument("Grid: origin must be finite");
    }
    for (int a = dim; a < 3; ++a) {
        shape[a] = 1;
        origin[a] = 0.0;
    }
}

bool Grid::same_layout(const Grid& o) const {
    if (dim != o.dim) return false;
    if (std::abs(spacing - o.spacing) > 1e-12 * spacing) return false;
    for (int a = 0; a < dim; ++a) {
        if (shape[a] != o.shape[a]) return false;
        if (std::abs(origin[a] - o.origin[a]) > 1e-12 * (1.0 + std::abs(origin[a]))) return false;
    }
    return true;
}

Grid make_grid_1d(double lo, double hi, int n) {
    if (n < 3) throw std::invalid_argument("make_grid_1d: need n >= 3");
    return Grid(1, {lo, 0, 0}, (hi - lo) / (n - 1), {n, 1, 1});
}

Grid make_grid_box(int dim, double lo, double hi, int n) {
    if (n < 3) throw std::invalid_argument("make_grid_box: need n >= 3");
    std::array<double, 3> o{0, 0, 0};
    std::array<int, 3> s{1, 1, 1};
    for (int a = 0; a < dim; ++a) {
        o[a] = lo;
        s[a] = n;
    }
    return Grid(dim, o, (hi - lo) / (n - 1), s);
}

std::vector<NodeIndex> all_nodes(const Grid& g) {
    std::vector<NodeIndex> out;
    out.reserve(static_cast<size_t>(g.node_count()));
    for (std::int64_t k = 0; k < g.node_count(); ++k) out.push_back(g.unindex(k));
    return out;
}

ScalarField::ScalarField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<std::int64_t>(values.size()) != grid.node_count())
        throw std::invalid_argument("ScalarField: values length != node count");
    require_finite(values, "ScalarField");
}

ScalarField::ScalarField(Grid g) : grid(g), values(static_cast<size_t>(g.node_count()), 0.0) {}

VectorField::VectorField(Grid g, int ncomp_)
    : grid(g), ncomp(ncomp_), values(static_cast<size_t>(g.node_count()) * ncomp_, 0.0) {
    if (ncomp < 1) throw std::invalid_argument("VectorField: ncomp must be >= 1");
}

VectorField::VectorField(Grid g, int ncomp_, std::vector<double> v)
    : grid(g), ncomp(ncomp_), values(std::move(v)) {
    if (ncomp < 1) throw std::invalid_argument("VectorField: ncomp must be >= 1");
    if (static_cast<std::int64_t>(values.size()) != grid.node_count() * ncomp)
        throw std::invalid_argument("VectorField: values length != node count * ncomp");
    require_finite(values, "VectorField");
}

MatrixField::MatrixField(Grid g)
    : grid(g), values(static_cast<size_t>(g.node_count()) * SymMat::tri_size(g.dim), 0.0) {}

MatrixField::MatrixField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<std::int64_t>(values.size()) != grid.node_count() * tri_size())
        throw std::invalid_argument("MatrixField: values length != node count * tri size");
    require_finite(values, "MatrixField");
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
            throw std::invalid_argument(std::string(what) + ": non-finite value at flat index " +
                                        std::to_string(i));
}

double SymMat::frobenius() const {
    double s = 0;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) s += at(a, b) * at(a, b);
    return std::sqrt(s);
}

namespace {

struct InterpWeights {
    std::int64_t base;          // linear index of lower corner
    std::array<int, 3> lo;      // lower corner multi-index
    std::array<double, 3> t;    // fractional offsets
};

InterpWeights locate(const Grid& g, const double* p, double slack, const char* what) {
    InterpWeights w{};
    for (int a = 0; a < g.dim; ++a) {
        double q = (p[a] - g.origin[a]) / g.spacing;
        const double n1 = static_cast<double>(g.shape[a] - 1);
        if (q < -slack / g.spacing || q > n1 + slack / g.spacing)
            throw std::domain_error(std::string(what) + ": point outside grid domain on axis " +
                                    std::to_string(a));
        q = std::min(std::max(q, 0.0), n1);
        int i = static_cast<int>(q);
        if (i > g.shape[a] - 2) i = g.shape[a] - 2;
        w.lo[a] = i;
        w.t[a] = q - i;
    }
    w.base = g.index({w.lo[0], w.lo[1], w.lo[2]});
    return w;
}

// Nested lerp over the 2^dim cell corners: constants interpolate exactly.
double lerp_corners(const double* v, std::int64_t base, const std::array<std::int64_t, 3>& stride,
                    const std::array<double, 3>& t, int dim, std::int64_t comp_stride,
                    int comp) {
    auto value = [&](int c0, int c1, int c2) {
        const std::int64_t k = base + c0 * stride[0] + c1 * stride[1] + c2 * stride[2];
        return v[k * comp_stride + comp];
    };
    auto lerp = [](double a, double b, double w) { return a + w * (b - a); };
    if (dim == 1) return lerp(value(0, 0, 0), value(1, 0, 0), t[0]);
    if (dim == 2)
        return lerp(lerp(value(0, 0, 0), value(0, 1, 0), t[1]),
                    lerp(value(1, 0, 0), value(1, 1, 0), t[1]), t[0]);
    return lerp(lerp(lerp(value(0, 0, 0), value(0, 0, 1), t[2]),
                     lerp(value(0, 1, 0), value(0, 1, 1), t[2]), t[1]),
                lerp(lerp(value(1, 0, 0), value(1, 0, 1), t[2]),
                     lerp(value(1, 1, 0), value(1, 1, 1), t[2]), t[1]), t[0]);
}

std::array<std::int64_t, 3> axis_strides(const Grid& g) {
    std::array<std::int64_t, 3> s{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        std::int64_t st = 1;
        for (int b = g.dim - 1; b > a; --b) st *= g.shape[b];
        s[a] = st;
    }
    return s;
}

}  // namespace

double interp_scalar(const ScalarField& f, const double* p, double slack) {
    InterpWeights w = locate(f.grid, p, slack, "interp_scalar");
    return lerp_corners(f.values.data(), w.base, axis_strides(f.grid), w.t, f.grid.dim, 1, 0);
}

void interp_vector(const VectorField& f, const double* p, double slack, double* out) {
    InterpWeights w = locate(f.grid, p, slack, "interp_vector");
    const auto s = axis_strides(f.grid);
    for (int c = 0; c < f.ncomp; ++c)
        out[c] = lerp_corners(f.values.data(), w.base, s, w.t, f.grid.dim, f.ncomp, c);
}

SymMat interp_matrix(const MatrixField& f, const double* p, double slack) {
    InterpWeights w = locate(f.grid, p, slack, "interp_matrix");
    const auto s = axis_strides(f.grid);
    SymMat m = SymMat::zero(f.grid.dim);
    const int ts = f.tri_size();
    for (int t = 0; t < ts; ++t)
        m.tri[t] = lerp_corners(f.values.data(), w.base, s, w.t, f.grid.dim, ts, t);
    return m;
}

double interp_scalar_quadratic(const ScalarField& f, const double* p, double slack) {
    const Grid& g = f.grid;
    std::array<int, 3> center{0, 0, 0};
    std::array<std::array<double, 3>, 3> wt{};  // [axis][offset -1,0,+1]
    for (int a = 0; a < g.dim; ++a) {
        double q = (p[a] - g.origin[a]) / g.spacing;
        const double n1 = static_cast<double>(g.shape[a] - 1);
        if (q < -slack / g.spacing || q > n1 + slack / g.spacing)
            throw std::domain_error("interp_scalar_quadratic: point outside grid domain");
        q = std::min(std::max(q, 0.0), n1);
        int i = static_cast<int>(q + 0.5);
        i = std::clamp(i, 1, g.shape[a] - 2);
        const double t = q - i;  // in [-1, 1], usually [-1/2, 1/2]
        center[a] = i;
        wt[a] = {0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)};
    }
    const auto stride = axis_strides(g);
    const std::int64_t base = g.index({center[0], center[1], center[2]});
    double v = 0;
    const int span1 = g.dim > 1 ? 3 : 1, span2 = g.dim > 2 ? 3 : 1;
    for (int o0 = 0; o0 < 3; ++o0)
        for (int o1 = 0; o1 < span1; ++o1)
            for (int o2 = 0; o2 < span2; ++o2) {
                double w = wt[0][o0];
                if (g.dim > 1) w *= wt[1][o1];
                if (g.dim > 2) w *= wt[2][o2];
                const std::int64_t k = base + (o0 - 1) * stride[0] +
                                       (g.dim > 1 ? (o1 - 1) * stride[1] : 0) +
                                       (g.dim > 2 ? (o2 - 1) * stride[2] : 0);
                v += w * f.values[k];
            }
    return v;
}

}  // namespace lagrot
