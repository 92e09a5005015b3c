#pragma once

#include <Eigen/Dense>

namespace collabsense {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using Point2 = Eigen::Vector2d;

/// Energy-allocation strategy across the collaboration network.
enum class Strategy { optimal, equal };

inline const char* to_string(Strategy s) { return s == Strategy::optimal ? "optimal" : "equal"; }

}  // namespace collabsense
