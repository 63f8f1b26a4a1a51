#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace signalprice {

// Malformed auction data: bad dimensions, probabilities off the simplex,
// prices or valuations outside [0,1].
struct InvalidInstance : std::runtime_error {
  explicit InvalidInstance(const std::string& what) : std::runtime_error(what) {}
};

// A signaling scheme that violates its own contract (kernel rows not
// normalized, missing price for a live signal).
struct InvalidScheme : std::runtime_error {
  explicit InvalidScheme(const std::string& what) : std::runtime_error(what) {}
};

// Conditioning on a signal whose marginal probability is zero.
struct ZeroProbabilitySignal : std::runtime_error {
  explicit ZeroProbabilitySignal(const std::string& what) : std::runtime_error(what) {}
};

// A weighted posterior set whose mean does not match the prior.
struct InconsistentDistribution : std::runtime_error {
  explicit InconsistentDistribution(const std::string& what) : std::runtime_error(what) {}
};

// A solver output that fails its feasibility identities.
struct InconsistentSolution : std::runtime_error {
  explicit InconsistentSolution(const std::string& what) : std::runtime_error(what) {}
};

// The consistency program has no feasible point for the given prior.
struct InfeasiblePrior : std::runtime_error {
  explicit InfeasiblePrior(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration whose cell count exceeds the configured cap.
struct TooLarge : std::runtime_error {
  explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown inside an iterative solver.
struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// Probability vectors must sum to one within this on input validation.
inline constexpr double kInputTol = 1e-12;
// Derived quantities (kernel rows, round-trips) are checked within this.
inline constexpr double kDerivedTol = 1e-9;
// Slack in "expected valuation >= price" so that ties still count as a
// purchase after floating-point rounding of the dot products.
inline constexpr double kBuyTol = 1e-9;

// Cap on brute-force enumerations; SIGNALPRICE_CAP overrides.
inline std::size_t default_cell_cap() {
  if (const char* env = std::getenv("SIGNALPRICE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return 2'000'000;
}

}  // namespace signalprice
