#pragma once

#include <stdexcept>
#include <string>

namespace diraclab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Adaptive step size underflow (near-singular field configuration).
struct StepFailure : Error { using Error::Error; };

/// Rejection sampler exhausted its attempt budget: the shell is empty.
struct EmptyShell : Error { using Error::Error; };

/// Symbol momentum content leaks past the lattice edge.
struct GridTooCoarse : Error { using Error::Error; };

struct GridMismatch : Error { using Error::Error; };

/// Almost projector has spectrum inside [0.4, 0.6]; hbar too large.
struct SpectralGapViolation : Error { using Error::Error; };

struct EigenvalueAtThreshold : Error { using Error::Error; };

struct EmptyWindow : Error { using Error::Error; };

struct NoQuasimodes : Error { using Error::Error; };

struct ConfigInvalid : Error { using Error::Error; };

struct CacheCorrupt : Error { using Error::Error; };

struct IoFailure : Error { using Error::Error; };

}  // namespace diraclab
