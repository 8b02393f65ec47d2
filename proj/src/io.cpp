#include "lagrot/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lagrot {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    fs::path tmp = dir / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for write: " + tmp.string());
        out << text;
        if (!out.good()) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

namespace {

std::string gridfield_json(const Grid& g, const std::string& kind,
                           const std::vector<double>& values) {
    std::ostringstream os;
    os << "{\n  \"dim\": " << g.dim << ",\n  \"origin\": [";
    for (int a = 0; a < g.dim; ++a) os << (a ? ", " : "") << format_double(g.origin[a]);
    os << "],\n  \"spacing\": " << format_double(g.spacing) << ",\n  \"shape\": [";
    for (int a = 0; a < g.dim; ++a) os << (a ? ", " : "") << g.shape[a];
    os << "],\n  \"kind\": \"" << kind << "\",\n  \"values\": [";
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) os << ", ";
        if (i % 8 == 0 && i) os << "\n    ";
        os << format_double(values[i]);
    }
    os << "]\n}\n";
    return os.str();
}

nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

Grid grid_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.contains("dim") || !j.contains("origin") || !j.contains("spacing") ||
        !j.contains("shape"))
        throw std::runtime_error("missing grid keys in " + path);
    const int dim = j.at("dim").get<int>();
    if (dim < 1 || dim > 3) throw std::runtime_error("bad dim in " + path);
    std::array<double, 3> origin{0, 0, 0};
    std::array<int, 3> shape{1, 1, 1};
    const auto& jo = j.at("origin");
    const auto& js = j.at("shape");
    if (static_cast<int>(jo.size()) != dim || static_cast<int>(js.size()) != dim)
        throw std::runtime_error("origin/shape length != dim in " + path);
    for (int a = 0; a < dim; ++a) {
        origin[a] = jo[a].get<double>();
        shape[a] = js[a].get<int>();
    }
    return Grid(dim, origin, j.at("spacing").get<double>(), shape);
}

}  // namespace

void write_scalar_field(const std::string& path, const ScalarField& f) {
    atomic_write_text(path, gridfield_json(f.grid, "scalar", f.values));
}

void write_vector_field(const std::string& path, const VectorField& f) {
    atomic_write_text(path, gridfield_json(f.grid, "vector", f.values));
}

void write_matrix_field(const std::string& path, const MatrixField& f) {
    atomic_write_text(path, gridfield_json(f.grid, "matrix", f.values));
}

GridFieldFile read_gridfield(const std::string& path) {
    const nlohmann::json j = parse_file(path);
    GridFieldFile out;
    out.grid = grid_from_json(j, path);
    if (!j.contains("kind") || !j.contains("values"))
        throw std::runtime_error("missing kind/values in " + path);
    out.kind = j.at("kind").get<std::string>();
    out.values = j.at("values").get<std::vector<double>>();
    return out;
}

ScalarField read_scalar_field(const std::string& path) {
    GridFieldFile f = read_gridfield(path);
    if (f.kind != "scalar") throw std::runtime_error(path + ": expected kind=scalar");
    return ScalarField(f.grid, std::move(f.values));
}

VectorField read_vector_field(const std::string& path) {
    GridFieldFile f = read_gridfield(path);
    if (f.kind != "vector") throw std::runtime_error(path + ": expected kind=vector");
    const std::int64_t n = f.grid.node_count();
    if (n == 0 || f.values.size() % n != 0)
        throw std::runtime_error(path + ": vector values not a multiple of node count");
    const int ncomp = static_cast<int>(f.values.size() / n);
    return VectorField(f.grid, ncomp, std::move(f.values));
}

MatrixField read_matrix_field(const std::string& path) {
    GridFieldFile f = read_gridfield(path);
    if (f.kind != "matrix") throw std::runtime_error(path + ": expected kind=matrix");
    return MatrixField(f.grid, std::move(f.values));
}

Grid read_grid(const std::string& path) {
    return grid_from_json(parse_file(path), path);
}

}  // namespace lagrot
