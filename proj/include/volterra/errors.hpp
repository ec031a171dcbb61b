#pragma once

#include <stdexcept>
#include <string>

namespace volterra {

// Descriptor or generator parameter outside its documented range.
struct InvalidRangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Coefficient table violates antisymmetry (or the diagonal is nonzero).
struct NotSkewError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation needs a nonempty support but got the zero point.
struct EmptySupportError : std::logic_error {
    using std::logic_error::logic_error;
};

// Renormalization target requested for a point of mass zero.
struct ZeroMassError : std::logic_error {
    using std::logic_error::logic_error;
};

// One evolution step moved total mass beyond the accepted bookkeeping drift.
struct MassDriftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One evolution step produced a coordinate below the negativity tolerance.
struct NegativeCoordinateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Block decomposition requested for an operator not classified as block-form.
struct NotTildeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Experiment configuration rejected; message names the offending path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace volterra
