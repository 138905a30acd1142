#include "blockprec/json_io.hpp"

#include <fstream>
#include <sstream>

#include "blockprec/errors.hpp"

namespace blockprec {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

Json to_json(const Partition& p) {
  Json out;
  out["labels"] = p.labels();
  out["groups"] = p.groups();
  out["sizes"] = p.sizes();
  out["within_pairs"] = p.within_pairs();
  return out;
}

Json to_json(const PenaltyConfig& c) {
  Json out;
  out["lambda_d"] = c.lambda_d;
  out["lambda_1"] = c.lambda_1;
  out["lambda_0"] = c.lambda_0;
  out["alpha_0"] = c.alpha_0;
  return out;
}

Json to_json(const LogZEstimate& e) {
  Json out;
  out["logz"] = e.logz;
  out["std_err"] = e.std_err;
  out["n_samples"] = e.n_samples;
  return out;
}

Json to_json(const ChainSummary& s) {
  Json out;
  out["kept"] = s.kept;
  out["mean_abs"] = matrix_json(s.mean_abs.dense());
  out["mean_diag"] = vector_json(s.mean_diag);
  out["ess"] = matrix_json(s.ess.dense());
  out["boundary_nudges"] = s.boundary_nudges;
  out["quadrature_fallbacks"] = s.quadrature_fallbacks;
  out["seed"] = s.seed;
  return out;
}

Json to_json(const SearchReport& r) {
  Json out;
  Json traj = Json::array();
  for (const SearchStep& step : r.trajectory) {
    Json js;
    js["step"] = step.step;
    js["group"] = step.group;
    js["part_a"] = step.part_a;
    js["part_b"] = step.part_b;
    js["bound"] = step.bound;
    traj.push_back(std::move(js));
  }
  out["trajectory"] = std::move(traj);
  out["final_partition"] = to_json(r.final_partition);
  out["final_bound"] = r.final_bound;
  out["termination"] = r.termination;
  out["rounds"] = r.rounds;
  return out;
}

Json to_json(const CvReport& r) {
  Json out;
  out["seed"] = r.seed;
  out["candidate_triples"] = r.candidate_triples;
  out["fold_test_indices"] = r.fold_test_indices;
  Json methods = Json::array();
  for (const MethodReport& mr : r.methods) {
    Json jm;
    jm["method"] = method_name(mr.method);
    jm["median_test_loglik"] = mr.median_test_loglik;
    jm["failed_candidates"] = mr.failed_candidates;
    Json folds = Json::array();
    for (const FoldResult& fr : mr.folds) {
      Json jf;
      jf["fold"] = fr.fold;
      jf["test_loglik"] = fr.test_loglik;
      jf["validation_loglik"] = fr.validation_loglik;
      jf["selected"] = to_json(fr.selected);
      folds.push_back(std::move(jf));
    }
    jm["folds"] = std::move(folds);
    methods.push_back(std::move(jm));
  }
  out["methods"] = std::move(methods);
  // wall-clock lives under the volatile key so reports stay comparable
  Json timing;
  for (const MethodReport& mr : r.methods) {
    Json jt;
    jt["total_seconds"] = mr.wall_seconds;
    Json folds = Json::array();
    for (const FoldResult& fr : mr.folds) {
      folds.push_back(fr.wall_seconds);
    }
    jt["fold_seconds"] = std::move(folds);
    timing[method_name(mr.method)] = std::move(jt);
  }
  out["timing"] = std::move(timing);
  return out;
}

Json to_json(const FitResult& r) {
  Json out;
  out["converged"] = r.converged;
  out["iterations"] = r.iterations;
  out["duality_gap"] = r.gap;
  out["objective"] = r.objective;
  return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << m(i, j);
    }
    out << '\n';
  }
  return out.str();
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  write_text(path, matrix_csv(m));
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("read_matrix_csv: cannot open '" + path + "'");
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  int file_line = 0;
  while (std::getline(in, line)) {
    ++file_line;
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        throw ParseError("read_matrix_csv: line " + std::to_string(file_line) +
                         ": not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("read_matrix_csv: ragged row at line " + std::to_string(file_line));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError("read_matrix_csv: empty file");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.front().size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write '" + path + "'");
  }
  out << content;
}

}  // namespace blockprec
