#pragma once

#include <string>

#include "lagrot/field.hpp"

namespace lagrot {

/// GridField file:
///   {"dim":d,"origin":[...],"spacing":h,"shape":[...],
///    "kind":"scalar|vector|matrix","values":[row-major flat array]}
/// Floats carry 17 significant digits. Writes go to a temp file in the same
/// directory and are renamed into place.
void write_scalar_field(const std::string& path, const ScalarField& f);
void write_vector_field(const std::string& path, const VectorField& f);
void write_matrix_field(const std::string& path, const MatrixField& f);

struct GridFieldFile {
    Grid grid;
    std::string kind;  // scalar | vector | matrix
    std::vector<double> values;
};

GridFieldFile read_gridfield(const std::string& path);
ScalarField read_scalar_field(const std::string& path);
VectorField read_vector_field(const std::string& path);
MatrixField read_matrix_field(const std::string& path);

/// Grid-only JSON (same schema, "values"/"kind" optional and ignored).
Grid read_grid(const std::string& path);

/// Temp-file-then-rename text write; no partial files on failure.
void atomic_write_text(const std::string& path, const std::string& text);

/// %.17g formatting used for all floats in GridField files.
std::string format_double(double v);

}  // namespace lagrot
