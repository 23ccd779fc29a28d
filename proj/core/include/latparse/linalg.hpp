#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace latparse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

}  // namespace latparse
