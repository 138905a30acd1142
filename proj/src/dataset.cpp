#include "blockprec/dataset.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <Eigen/Cholesky>

#include "blockprec/errors.hpp"
#include "blockprec/pdcore.hpp"
#include "blockprec/rng.hpp"

namespace blockprec {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
    ++a;
  }
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
    --b;
  }
  return s.substr(a, b - a);
}

}  // namespace

Dataset ingest_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("ingest_csv: cannot open '" + path + "'");
  }
  Dataset d;
  d.provenance = path;
  std::string line;
  int file_line = 0;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++file_line;
    if (trim(line).empty()) {
      continue;
    }
    const std::vector<std::string> cells = split_csv_line(line);
    if (has_header && d.names.empty() && rows.empty()) {
      for (const std::string& c : cells) {
        d.names.push_back(trim(c));
      }
      width = cells.size();
      continue;
    }
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw ParseError("ingest_csv: line " + std::to_string(file_line) + ": expected " +
                       std::to_string(width) + " fields, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::string cell = trim(cells[k]);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
        throw ParseError("ingest_csv: line " + std::to_string(file_line) + ", column " +
                         std::to_string(k + 1) + ": not a finite number: '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) {
    throw ParseError("ingest_csv: need at least 2 data rows, got " + std::to_string(rows.size()));
  }
  d.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      d.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  if (d.names.empty()) {
    for (std::size_t j = 0; j < width; ++j) {
      d.names.push_back("x" + std::to_string(j));
    }
  }
  return d;
}

std::pair<Dataset, SampleStats> standardize(const Dataset& d) {
  const int n = d.n();
  const int dim = d.dim();
  if (n < 2) {
    throw InvalidInputError("standardize: need at least 2 rows");
  }
  SampleStats stats;
  stats.n = n;
  stats.dim = dim;
  stats.mean = d.rows.colwise().mean();
  Eigen::MatrixXd centered = d.rows.rowwise() - stats.mean.transpose();
  Eigen::VectorXd var = centered.array().square().colwise().mean();
  std::string degenerate;
  for (int j = 0; j < dim; ++j) {
    if (var(j) <= 1e-24) {
      if (!degenerate.empty()) {
        degenerate += ", ";
      }
      degenerate += d.names.size() == static_cast<std::size_t>(dim) ? d.names[j]
                                                                    : std::to_string(j);
    }
  }
  if (!degenerate.empty()) {
    throw DegenerateColumnError("standardize: zero-variance columns: " + degenerate);
  }
  stats.scale = var.array().sqrt();
  Eigen::MatrixXd scaled = centered.array().rowwise() / stats.scale.transpose().array();
  stats.scatter = SymMatrix::mirror_upper((scaled.transpose() * scaled) / n);

  Dataset out;
  out.rows = std::move(scaled);
  out.names = d.names;
  out.provenance = d.provenance + " (standardized)";
  return {std::move(out), std::move(stats)};
}

SymMatrix scatter_with(const SampleStats& stats, const Eigen::MatrixXd& rows) {
  if (rows.cols() != stats.dim) {
    throw InvalidInputError("scatter_with: dimension mismatch");
  }
  Eigen::MatrixXd scaled =
      (rows.rowwise() - stats.mean.transpose()).array().rowwise() /
      stats.scale.transpose().array();
  return SymMatrix::mirror_upper((scaled.transpose() * scaled) / rows.rows());
}

double heldout_loglik(const SampleStats& train, const Eigen::MatrixXd& test_rows,
                      const SymMatrix& omega) {
  SampleStats test;
  test.n = static_cast<int>(test_rows.rows());
  test.dim = train.dim;
  test.mean = train.mean;
  test.scale = train.scale;
  test.scatter = scatter_with(train, test_rows);
  return gaussian_loglik(test, omega);
}

SynthResult synth_blocks(const SynthSpec& spec) {
  if (spec.group_sizes.empty() || spec.n < 2) {
    throw InvalidInputError("synth_blocks: need group sizes and n >= 2");
  }
  int d = 0;
  std::vector<int> labels;
  for (std::size_t g = 0; g < spec.group_sizes.size(); ++g) {
    if (spec.group_sizes[g] < 1) {
      throw InvalidInputError("synth_blocks: group sizes must be positive");
    }
    for (int t = 0; t < spec.group_sizes[g]; ++t) {
      labels.push_back(static_cast<int>(g));
    }
    d += spec.group_sizes[g];
  }
  Partition planted(labels);

  RandomStream rng = RandomStream::substream(spec.seed, 0);
  SymMatrix omega(d);
  for (int i = 0; i < d; ++i) {
    omega.set(i, i, 1.0);
    for (int j = i + 1; j < d; ++j) {
      if (planted.same_group(i, j)) {
        omega.set(i, j, spec.within);
      } else if (spec.noise > 0.0) {
        omega.set(i, j, spec.noise * (2.0 * rng.next_uniform() - 1.0));
      }
    }
  }
  if (!is_pd(omega)) {
    throw InvalidInputError("synth_blocks: within/noise parameters leave the PD cone");
  }

  // x = L^{-T} z has covariance Omega^{-1}
  Eigen::LLT<Eigen::MatrixXd> llt(omega.dense());
  SynthResult out;
  out.omega_true = omega;
  out.planted = planted;
  out.data.rows.resize(spec.n, d);
  Eigen::VectorXd z(d);
  for (int r = 0; r < spec.n; ++r) {
    for (int j = 0; j < d; ++j) {
      z(j) = rng.next_normal();
    }
    out.data.rows.row(r) = llt.matrixU().solve(z).transpose();
  }
  for (int j = 0; j < d; ++j) {
    out.data.names.push_back("x" + std::to_string(j));
  }
  out.data.provenance = "synth_blocks(seed=" + std::to_string(spec.seed) + ")";
  return out;
}

}  // namespace blockprec
