// errors.hpp - exception taxonomy shared by all modules
#ifndef EVORTEX_ERRORS_HPP
#define EVORTEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace evortex {

/// Precondition or invariant violation (CLI exit code 2).
class validation_error : public std::invalid_argument {
public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical/sampling problem, e.g. an aliasing-limit violation (CLI exit code 3).
class sampling_error : public std::runtime_error {
public:
  explicit sampling_error(const std::string& what) : std::runtime_error(what) {}
};

/// Measurement outside the fit curve's hull (CLI exit code 4).
class fit_domain_error : public std::runtime_error {
public:
  explicit fit_domain_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace evortex

#endif
