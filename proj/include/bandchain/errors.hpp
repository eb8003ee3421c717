#pragma once

#include <stdexcept>
#include <string>

namespace bandchain {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Kernel construction / validation
struct NonStochasticRow : Error { using Error::Error; };
struct NegativeEntry : Error { using Error::Error; };
struct MissingBoundaryRow : Error { using Error::Error; };
struct DegenerateIncrements : Error { using Error::Error; };
struct ZeroMass : Error { using Error::Error; };

// Stationary solve
struct SingularSystem : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct WindowTooWide : Error { using Error::Error; };

// Spectral bounds
struct NoSubunitRoot : Error { using Error::Error; };
struct AlphaTooSmall : Error { using Error::Error; };

// Truncation spectra
struct EigNonConvergence : Error { using Error::Error; };
struct NoSubunitEigenvalue : Error { using Error::Error; };
struct InsufficientSweep : Error { using Error::Error; };

// Oracle
struct OrderTooLarge : Error { using Error::Error; };
struct UnderflowBeforeWindow : Error { using Error::Error; };
struct DegenerateTestVector : Error { using Error::Error; };

} // namespace bandchain
