#include "qhlab/errors.hpp"

#include <sstream>

namespace qhlab {

namespace {

std::string quad_message(const std::string& what, double estimate, double error_bound) {
    std::ostringstream os;
    os.precision(17);
    os << what << " (estimate " << estimate << ", error bound " << error_bound << ")";
    return os.str();
}

std::string psd_message(std::size_t pivot, double value) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix is not positive semidefinite: pivot " << pivot << " = " << value
       << " at maximal jitter";
    return os.str();
}

}  // namespace

QuadratureError::QuadratureError(const std::string& what, double estimate, double error_bound)
    : NumericError(quad_message(what, estimate, error_bound)),
      estimate_(estimate),
      error_bound_(error_bound) {}

NotPsdError::NotPsdError(std::size_t pivot, double pivot_value)
    : NumericError(psd_message(pivot, pivot_value)), pivot_(pivot), pivot_value_(pivot_value) {}

}  // namespace qhlab
