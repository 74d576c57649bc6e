#pragma once

#include <Eigen/Core>

namespace ncprox {

using Vector = Eigen::VectorXd;

}  // namespace ncprox
