#pragma once

#include <string>

#include <json.hpp>

#include "blockprec/cv.hpp"
#include "blockprec/gibbs.hpp"
#include "blockprec/model.hpp"
#include "blockprec/search.hpp"

namespace blockprec {

// Reports use ordered JSON so identical inputs serialize byte-identically;
// the volatile keys ("timestamp", "timing") are the only nondeterministic
// content and comparisons should strip them.
using Json = nlohmann::ordered_json;

Json to_json(const Partition& p);
Json to_json(const PenaltyConfig& c);
Json to_json(const LogZEstimate& e);
Json to_json(const ChainSummary& s);
Json to_json(const SearchReport& r);
Json to_json(const CvReport& r);
Json to_json(const FitResult& r);

// Full symmetric matrix, row-major CSV.
std::string matrix_csv(const Eigen::MatrixXd& m);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

void write_text(const std::string& path, const std::string& content);

}  // namespace blockprec
