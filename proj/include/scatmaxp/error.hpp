#pragma once

#include <stdexcept>
#include <string>

namespace scatmaxp {

/// Raised for violated preconditions: shape mismatches, misaligned shifts,
/// indivisible grids, malformed files.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pooling factor below the admissibility threshold while running in
/// strict mode.
class AdmissibilityError : public Error {
 public:
  AdmissibilityError(const std::string& what, double threshold, double factor)
      : Error(what), threshold_(threshold), factor_(factor) {}

  double threshold() const noexcept { return threshold_; }
  double factor() const noexcept { return factor_; }

 private:
  double threshold_;
  double factor_;
};

}  // namespace scatmaxp
