#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ssp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Malformed caller input (dimension mismatch, out-of-range index, bad value).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid configuration (parameters outside their documented domain).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A documented contract was broken at runtime (oracle returned something
// impossible, reference solver disagrees with its cross-check, ...).
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_dim(const Vector& x, Eigen::Index n, const char* what) {
  if (x.size() != n) {
    throw InputError(std::string(what) + ": expected dimension " +
                     std::to_string(n) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace ssp
