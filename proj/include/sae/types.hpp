#pragma once

#include <Eigen/Dense>

namespace sae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace sae
