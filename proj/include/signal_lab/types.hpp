#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace signal_lab {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sorted, unique 0-based covariate indices.
using IndexSet = std::vector<Index>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct SampleSizeError : Error { using Error::Error; };
struct WhiteningError : Error { using Error::Error; };
struct DegenerateSubsetError : Error { using Error::Error; };
struct MomentError : Error { using Error::Error; };
struct SelectionError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// n observations of p covariates with a scalar response.
struct LabeledSample {
  Matrix x;  // n x p
  Vector y;  // n

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }
};

// Throws ShapeError / DataError / SampleSizeError on malformed input.
void validate_sample(const LabeledSample& sample);

// Checks that `indices` is sorted, unique, and within [0, p).
void validate_index_set(const IndexSet& indices, Index p);

enum class CoefficientKind { Oracle, UStat, Bootstrap };

}  // namespace signal_lab
