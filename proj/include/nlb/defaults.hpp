#pragma once

#include "nlb/solvers.hpp"
#include "nlb/transforms.hpp"

#include <cstddef>
#include <cstdint>

// Every default used by the command line and configuration files.
namespace nlb::defaults {

inline constexpr double gamma = 0.9;
inline constexpr double k = 1.0;
inline constexpr double kappa = 1.0;
inline constexpr double r_ref = 1.0;
inline constexpr double squash_eps = kDefaultSquashEps;

inline constexpr double tol = kDefaultTolerance;
inline constexpr std::size_t max_iters = kDefaultMaxIterations;

inline constexpr double alpha = 0.05;
inline constexpr std::size_t episodes = 10'000;
inline constexpr std::size_t horizon = 1'000;

inline constexpr std::size_t pairs = 500;

inline constexpr std::uint64_t seed = 0;

} // namespace nlb::defaults
