#pragma once

#include <vector>

#include <Eigen/Dense>

namespace blockprec {

// Assignment of D variables to K groups. Labels are canonicalized to
// 0..K-1 in order of first occurrence, which both removes empty groups and
// gives every partition a unique representative (used for tie-breaking).
class Partition {
 public:
  Partition() = default;
  explicit Partition(const std::vector<int>& labels);

  static Partition single_group(int dim);
  static Partition singletons(int dim);

  int dim() const { return static_cast<int>(assign_.size()); }
  int groups() const { return k_; }
  int group(int i) const { return assign_[i]; }
  bool same_group(int i, int j) const { return assign_[i] == assign_[j]; }
  const std::vector<int>& labels() const { return assign_; }
  const std::vector<int>& sizes() const { return sizes_; }
  std::vector<std::vector<int>> members() const;

  // C_kl = sizes[k] * sizes[l] for k != l; diagonal entries are 0 (within
  // pairs are tracked by within_pairs()).
  long long cross_pairs(int k, int l) const { return c_kl_(k, l); }
  const Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>& cross_pair_matrix() const { return c_kl_; }

  // C_T: number of unordered within-group pairs across all groups.
  long long within_pairs() const { return c_t_; }

  bool operator==(const Partition& other) const { return assign_ == other.assign_; }

  // true if this partition's canonical label sequence is lexicographically
  // smaller; the deterministic tie-break order for equal-bound splits
  bool before(const Partition& other) const;

 private:
  std::vector<int> assign_;
  std::vector<int> sizes_;
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> c_kl_;
  long long c_t_ = 0;
  int k_ = 0;
};

// Chance-corrected agreement between two partitions of the same variables.
double adjusted_rand_index(const Partition& a, const Partition& b);

}  // namespace blockprec
