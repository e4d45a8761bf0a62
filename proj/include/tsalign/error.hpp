#ifndef TSALIGN_ERROR_HPP
#define TSALIGN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tsalign {

/// A tuple or table violates a structural invariant (bad slot index, shape mismatch).
struct structural_error : std::logic_error {
    using std::logic_error::logic_error;
};

/// An enumeration guard was exceeded; the caller should fall back to an approximation.
struct size_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or unusable tuning input.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input data could not be parsed or failed validation.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tsalign

#endif // TSALIGN_ERROR_HPP
