#pragma once

#include <stdexcept>
#include <string>

namespace msd {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed argument: bad dimensions, non-finite data, out-of-range parameter.
struct InvalidInput : Error {
    using Error::Error;
};

/// CSV ingestion failure. Lines and columns are 1-based; column 0 means
/// "whole line" (e.g. ragged row).
struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int line_, int column_ = 0)
        : Error(msg), line(line_), column(column_) {}
};

/// An iterative numerical routine failed to converge.
struct NumericalFailure : Error {
    using Error::Error;
};

/// Evaluation point inside or touching the noise spectrum.
struct DomainError : Error {
    using Error::Error;
};

/// A sample eigenvalue sits at or below the detectability edge theta(s*);
/// the outlier map cannot be inverted for it. `index` is the 1-based spike
/// position, 0 when unknown.
struct SubcriticalSpike : Error {
    int index = 0;
    SubcriticalSpike(const std::string& msg, int index_ = 0)
        : Error(msg), index(index_) {}
};

/// theta'(xi_hat) below the stability floor; variance formulas would blow up.
struct NearCriticalSpike : Error {
    int index = 0;
    NearCriticalSpike(const std::string& msg, int index_ = 0)
        : Error(msg), index(index_) {}
};

/// Root bracketing ran past its expansion cap.
struct BracketFailure : Error {
    using Error::Error;
};

/// All residual coordinates carried (numerically) zero variance.
struct DegenerateResiduals : Error {
    using Error::Error;
};

/// Fewer strictly positive Gram eigenvalues than the requested rank.
struct InsufficientSpectrum : Error {
    using Error::Error;
};

}  // namespace msd
