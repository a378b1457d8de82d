#ifndef SONN_ERRORS_HPP
#define SONN_ERRORS_HPP

#include <stdexcept>

namespace sonn {

// Malformed or incompatible input data (files, columns, labels, shapes).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A learner could not produce a model from otherwise well-formed data.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sonn

#endif  // SONN_ERRORS_HPP
