#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sgraph {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<cplx>;

inline constexpr cplx kI{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// graph_core
struct SchemaError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct PartitionError : Error { using Error::Error; };
struct EllipticityError : Error { using Error::Error; };
// vertex_algebra
struct SingularPiError : Error { using Error::Error; };
struct RankError : Error { using Error::Error; };
struct DegenerateRowError : Error { using Error::Error; };
struct NearSingularError : Error { using Error::Error; };
struct ClusterAmbiguityError : Error { using Error::Error; };
struct ProjectorGapError : Error { using Error::Error; };
struct TruncationError : Error { using Error::Error; };
// discretize
struct ConditionMismatchError : Error { using Error::Error; };
struct SolveFailure : Error { using Error::Error; };
struct UnknownVertexError : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
// threshold / q_limit / matching
struct EmbeddedEigenvalueError : Error { using Error::Error; };
struct MissingDerivativeError : Error { using Error::Error; };
struct SelfAdjointnessViolation : Error { using Error::Error; };
struct SingularSystemError : Error { using Error::Error; };

}  // namespace sgraph
