#include "nstv/io.hpp"

#include <json.hpp>

#include <fstream>

namespace nstv::io {

using nlohmann::json;

Matrix<double> field_image(const Grid& grid, const Vector<double>& cells) {
  if (grid.dim == 1) {
    Matrix<double> img(1, grid.n);
    for (int i = 0; i < grid.n; ++i) img(0, i) = cells[i];
    return img;
  }
  Matrix<double> img(grid.n, grid.n);
  for (int iy = 0; iy < grid.n; ++iy)
    for (int ix = 0; ix < grid.n; ++ix) img(grid.n - 1 - iy, ix) = cells[grid.cell_index(ix, iy)];
  return img;
}

Matrix<double> face1_image(const Grid& grid, const Vector<double>& w1) {
  if (grid.dim == 1) {
    Matrix<double> img(1, grid.n - 1);
    for (int i = 0; i + 1 < grid.n; ++i) img(0, i) = w1[i];
    return img;
  }
  Matrix<double> img(grid.n, grid.n - 1);
  for (int iy = 0; iy < grid.n; ++iy)
    for (int ix = 0; ix + 1 < grid.n; ++ix)
      img(grid.n - 1 - iy, ix) = w1[face1_index(grid, ix, iy)];
  return img;
}

Matrix<double> face2_image(const Grid& grid, const Vector<double>& w2) {
  Matrix<double> img(grid.n - 1, grid.n);
  for (int iy = 0; iy + 1 < grid.n; ++iy)
    for (int ix = 0; ix < grid.n; ++ix)
      img(grid.n - 2 - iy, ix) = w2[face2_index(grid, ix, iy)];
  return img;
}

void write_pgm(const fs::path& path, const Matrix<double>& image) {
  const double lo = image.minCoeff();
  const double hi = image.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path.string());
  out << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  for (Index r = 0; r < image.rows(); ++r)
    for (Index c = 0; c < image.cols(); ++c) {
      const double v = (image(r, c) - lo) / span;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }

  json side;
  side["min"] = lo;
  side["max"] = hi;
  side["rows"] = image.rows();
  side["cols"] = image.cols();
  write_text(path.string() + ".json", side.dump(2) + "\n");
}

namespace {

std::ofstream open_text(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(17);
  return out;
}

}  // namespace

void write_field_csv(const fs::path& path, const SourceField<double>& f) {
  auto out = open_text(path);
  const Grid& g = f.grid;
  out << "ix,iy,x1,x2,value\n";
  for (int i = 0; i < g.cell_count(); ++i)
    out << g.cell_ix(i) << ',' << g.cell_iy(i) << ',' << g.center(g.cell_ix(i)) << ','
        << (g.dim == 2 ? g.center(g.cell_iy(i)) : 0.0) << ',' << f.values[i] << '\n';
}

void write_boundary_csv(const fs::path& path, const Grid& grid, const std::vector<int>& observed,
                        const Vector<double>& values) {
  auto out = open_text(path);
  out << "sample,cell,x1,x2,value\n";
  for (size_t j = 0; j < observed.size(); ++j) {
    const int c = observed[j];
    out << j << ',' << c << ',' << grid.center(grid.cell_ix(c)) << ','
        << (grid.dim == 2 ? grid.center(grid.cell_iy(c)) : 0.0) << ',' << values[j] << '\n';
  }
}

void write_weights_csv(const fs::path& path, const WeightField<double>& w) {
  auto out = open_text(path);
  const Grid& g = w.grid;
  out << "axis,index,ix,iy,x1,x2,weight\n";
  if (g.dim == 1) {
    for (int f = 0; f < g.n - 1; ++f)
      out << "1," << f << ',' << f << ",0," << face_coordinate_1d(g, f) << ",0," << w.w1[f]
          << '\n';
  } else {
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix + 1 < g.n; ++ix) {
        const int f = face1_index(g, ix, iy);
        out << "1," << f << ',' << ix << ',' << iy << ',' << (ix + 1) * g.h() << ','
            << g.center(iy) << ',' << w.w1[f] << '\n';
      }
    for (int iy = 0; iy + 1 < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        const int f = face2_index(g, ix, iy);
        out << "2," << f << ',' << ix << ',' << iy << ',' << g.center(ix) << ','
            << (iy + 1) * g.h() << ',' << w.w2[f] << '\n';
      }
  }
  for (int j = 0; j < w.w_boundary.size(); ++j) {
    const int c = g.boundary_indices[j];
    out << "boundary," << j << ',' << g.cell_ix(c) << ',' << g.cell_iy(c) << ','
        << g.center(g.cell_ix(c)) << ',' << (g.dim == 2 ? g.center(g.cell_iy(c)) : 0.0) << ','
        << w.w_boundary[j] << '\n';
  }
}

void write_matrix_csv(const fs::path& path, const Matrix<double>& m) {
  auto out = open_text(path);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
}

void export_operator(const std::string& basepath, const ForwardOperator<double>& op) {
  json header;
  header["dim"] = op.grid.dim;
  header["n"] = op.grid.n;
  header["conductivity"] = to_string(op.conductivity);
  header["observed"] = op.observed;
  header["boundary_ordering"] = "ccw-from-bottom-left";
  header["rows"] = op.rows();
  header["cols"] = op.cols();
  header["format"] = "float64-le-row-major";
  header["data_file"] = fs::path(basepath + ".bin").filename().string();
  write_text(basepath + ".json", header.dump(2) + "\n");

  fs::path bin(basepath + ".bin");
  if (bin.has_parent_path()) fs::create_directories(bin.parent_path());
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw std::runtime_error("export_operator: cannot open " + bin.string());
  for (int r = 0; r < op.rows(); ++r)
    out.write(reinterpret_cast<const char*>(op.matrix.row(r).eval().data()),
              static_cast<std::streamsize>(sizeof(double)) * op.cols());
}

ForwardOperator<double> import_operator(const std::string& basepath) {
  std::ifstream in(basepath + ".json");
  if (!in) throw std::runtime_error("import_operator: missing header " + basepath + ".json");
  json header = json::parse(in);

  ForwardOperator<double> op;
  op.grid = build_grid(header.at("dim").get<int>(), header.at("n").get<int>());
  op.observed = header.at("observed").get<std::vector<int>>();
  const std::string kind = header.at("conductivity").get<std::string>();
  if (kind == "isotropic") op.conductivity = ConductivityKind::isotropic;
  else if (kind == "d1") op.conductivity = ConductivityKind::d1;
  else if (kind == "d2") op.conductivity = ConductivityKind::d2;
  else op.conductivity = ConductivityKind::custom;

  const int rows = header.at("rows").get<int>();
  const int cols = header.at("cols").get<int>();
  if (rows != static_cast<int>(op.observed.size()) || cols != op.grid.cell_count())
    throw std::runtime_error("import_operator: inconsistent header " + basepath);

  std::ifstream bin(fs::path(basepath).parent_path() /
                        header.at("data_file").get<std::string>(),
                    std::ios::binary);
  if (!bin) throw std::runtime_error("import_operator: missing data for " + basepath);
  op.matrix.resize(rows, cols);
  std::vector<double> row(cols);
  for (int r = 0; r < rows; ++r) {
    bin.read(reinterpret_cast<char*>(row.data()),
             static_cast<std::streamsize>(sizeof(double)) * cols);
    if (!bin) throw std::runtime_error("import_operator: truncated data for " + basepath);
    for (int c = 0; c < cols; ++c) op.matrix(r, c) = row[c];
  }

  // rebuild the PDE factorization for direct solves when the conductivity is
  // one of the named kinds
  if (op.conductivity != ConductivityKind::custom) {
    auto cond = conductivity_field<double>(op.conductivity, op.grid);
    SparseMatrix<double> S = second_order_operator(op.grid, cond, GreensBc::neumann);
    SparseMatrix<double> Id(S.rows(), S.cols());
    Id.setIdentity();
    S = S + Id;
    auto llt = std::make_shared<Eigen::SimplicialLLT<SparseMatrix<double>>>();
    llt->compute(S);
    op.system = std::make_shared<const SparseMatrix<double>>(std::move(S));
    op.system_factor = std::move(llt);
  }
  return op;
}

std::string solve_report_to_json(const SolveReport<double>& rep) {
  json j;
  j["stop_reason"] = to_string(rep.stop_reason);
  j["bregman_iters_used"] = rep.bregman_iters_used;
  j["final_residual"] = rep.final_residual;
  j["noise_norm"] = rep.noise_norm;
  j["morozov_threshold"] = rep.morozov_threshold;
  j["bregman_dual_norm"] = rep.bregman_dual_norm;
  j["total_admm_iterations"] = rep.total_admm_iterations;
  j["admm_all_converged"] = rep.admm_all_converged;
  j["objective_trajectory"] = rep.objective_trajectory;
  j["data_residual_trajectory"] = rep.data_residual_trajectory;
  j["effective_alpha"] = rep.config.alpha;
  j["effective_beta"] = rep.config.beta;
  return j.dump(2) + "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_text(path);
  out << text;
}

}  // namespace nstv::io
