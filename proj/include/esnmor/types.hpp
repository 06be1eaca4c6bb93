#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace esnmor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

// State magnitude above which a simulation counts as diverged.
inline constexpr double kDivergenceLimit = 1e6;

struct DivergenceError : std::runtime_error {
  DivergenceError(Index step_index, const std::string& what_arg)
      : std::runtime_error(what_arg), step(step_index) {}
  Index step;
};

}  // namespace esnmor
