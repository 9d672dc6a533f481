#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace trssqp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Single RNG type used throughout; every solver run owns one instance,
// seeded explicitly, so runs are reproducible and independent.
using Rng = std::mt19937_64;

}  // namespace trssqp
