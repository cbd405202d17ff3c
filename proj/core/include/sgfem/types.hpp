#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sgfem {

// Small dense types sized for d <= 3. Dynamic size with a fixed upper bound,
// so they never touch the heap.
using Vec3 = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat3 = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

// Barycentric coordinates, d + 1 <= 4 entries.
using Bary = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

inline constexpr int kMaxDim = 3;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sgfem
