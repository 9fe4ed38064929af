#pragma once

#include <Eigen/Dense>

namespace dygraf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace dygraf
