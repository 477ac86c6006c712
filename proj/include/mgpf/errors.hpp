#pragma once

#include <stdexcept>
#include <string>

namespace mgpf {

/// Covariance / precision matrix is singular or ill-conditioned beyond the
/// 1e12 condition-number guard.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Every weight of a mixture (or product plan) is -inf.
class DegenerateMixtureError : public std::runtime_error {
 public:
  explicit DegenerateMixtureError(const std::string& what) : std::runtime_error(what) {}
};

/// Map generation / map query failure (infeasible spec, pose inside wall, ...).
class MapError : public std::runtime_error {
 public:
  explicit MapError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mgpf
