#include "blockprec/partition.hpp"

#include <map>
#include <numeric>

#include "blockprec/errors.hpp"

namespace blockprec {

Partition::Partition(const std::vector<int>& labels) {
  if (labels.empty()) {
    throw InvalidInputError("Partition: empty label vector");
  }
  assign_.reserve(labels.size());
  std::map<int, int> remap;
  for (int raw : labels) {
    auto [it, inserted] = remap.try_emplace(raw, static_cast<int>(remap.size()));
    assign_.push_back(it->second);
  }
  k_ = static_cast<int>(remap.size());
  sizes_.assign(k_, 0);
  for (int g : assign_) {
    ++sizes_[g];
  }
  c_kl_.setZero(k_, k_);
  for (int k = 0; k < k_; ++k) {
    for (int l = 0; l < k_; ++l) {
      if (k != l) {
        c_kl_(k, l) = static_cast<long long>(sizes_[k]) * sizes_[l];
      }
    }
  }
  c_t_ = 0;
  for (int k = 0; k < k_; ++k) {
    c_t_ += static_cast<long long>(sizes_[k]) * (sizes_[k] - 1) / 2;
  }
}

Partition Partition::single_group(int dim) { return Partition(std::vector<int>(dim, 0)); }

Partition Partition::singletons(int dim) {
  std::vector<int> labels(dim);
  std::iota(labels.begin(), labels.end(), 0);
  return Partition(labels);
}

std::vector<std::vector<int>> Partition::members() const {
  std::vector<std::vector<int>> out(k_);
  for (int i = 0; i < dim(); ++i) {
    out[assign_[i]].push_back(i);
  }
  return out;
}

bool Partition::before(const Partition& other) const { return assign_ < other.assign_; }

double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.dim() != b.dim()) {
    throw InvalidInputError("adjusted_rand_index: partitions of different sizes");
  }
  const int n = a.dim();
  const int ka = a.groups();
  const int kb = b.groups();
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(ka, kb);
  for (int i = 0; i < n; ++i) {
    table(a.group(i), b.group(i)) += 1.0;
  }
  auto choose2 = [](double m) { return 0.5 * m * (m - 1.0); };
  double sum_cells = 0.0;
  for (int i = 0; i < ka; ++i) {
    for (int j = 0; j < kb; ++j) {
      sum_cells += choose2(table(i, j));
    }
  }
  double sum_rows = 0.0;
  for (int i = 0; i < ka; ++i) {
    sum_rows += choose2(table.row(i).sum());
  }
  double sum_cols = 0.0;
  for (int j = 0; j < kb; ++j) {
    sum_cols += choose2(table.col(j).sum());
  }
  const double total = choose2(static_cast<double>(n));
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) {
    return 1.0;  // both partitions trivial
  }
  return (sum_cells - expected) / (max_index - expected);
}

}  // namespace blockprec
