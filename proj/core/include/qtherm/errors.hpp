#pragma once

#include <stdexcept>
#include <string>

namespace qtherm {

/// A mathematical precondition or invariant of the model was violated
/// (non-normalized density, unreliable phase, loop through a node, ...).
class invariant_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to deliver (solver divergence, overflow).
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what, long iterations = -1)
        : std::runtime_error(what), iterations_(iterations) {}

    long iterations() const { return iterations_; }

  private:
    long iterations_;
};

} // namespace qtherm
