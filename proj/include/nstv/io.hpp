#pragma once

#include <filesystem>
#include <string>

#include "nstv/metrics.hpp"
#include "nstv/solver.hpp"

namespace nstv::io {

namespace fs = std::filesystem;

// --- images -----------------------------------------------------------------

/// Cell field as an image matrix, row 0 at the top (x2 = 1).
Matrix<double> field_image(const Grid& grid, const Vector<double>& cells);
Matrix<double> face1_image(const Grid& grid, const Vector<double>& w1);
Matrix<double> face2_image(const Grid& grid, const Vector<double>& w2);

/// Binary 8-bit PGM (P5) with a JSON sidecar <path>.json carrying the value
/// range used for the scaling.
void write_pgm(const fs::path& path, const Matrix<double>& image);

// --- CSV --------------------------------------------------------------------

void write_field_csv(const fs::path& path, const SourceField<double>& f);
void write_boundary_csv(const fs::path& path, const Grid& grid,
                        const std::vector<int>& observed, const Vector<double>& values);
void write_weights_csv(const fs::path& path, const WeightField<double>& w);
void write_matrix_csv(const fs::path& path, const Matrix<double>& m);

// --- operator cache -----------------------------------------------------------

/// <base>.json header (grid, conductivity, observation cells, boundary
/// ordering) plus <base>.bin with row-major float64 matrix entries.
void export_operator(const std::string& basepath, const ForwardOperator<double>& op);
ForwardOperator<double> import_operator(const std::string& basepath);

// --- reports -----------------------------------------------------------------

std::string solve_report_to_json(const SolveReport<double>& rep);
void write_text(const fs::path& path, const std::string& text);

}  // namespace nstv::io
