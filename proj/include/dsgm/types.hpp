#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dsgm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Graph operators are stored row-major so that operator-times-dense products stream rows.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

}  // namespace dsgm
