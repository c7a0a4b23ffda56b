#pragma once

#include <stdexcept>
#include <string>

namespace lorenz {

// Base of all toolkit failures. `infeasible()` separates bad inputs
// (CLI exit code 1) from broken invariants (exit code 2).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, bool infeasible = true)
        : std::runtime_error(what), infeasible_(infeasible) {}
    bool infeasible() const { return infeasible_; }

private:
    bool infeasible_;
};

#define LORENZ_ERROR(Name)                                              \
    class Name : public Error {                                         \
    public:                                                             \
        explicit Name(const std::string& w, bool inf = true) : Error(#Name ": " + w, inf) {} \
    };

LORENZ_ERROR(InvalidMap)
LORENZ_ERROR(CriticalPointHit)
LORENZ_ERROR(OutOfRange)
LORENZ_ERROR(NoPeriodicPoint)
LORENZ_ERROR(NotRenormalizable)
LORENZ_ERROR(DepthInfeasible)
LORENZ_ERROR(NotFound)
LORENZ_ERROR(DivergentProduct)
LORENZ_ERROR(NonConvergence)
LORENZ_ERROR(Infeasible)

#undef LORENZ_ERROR

class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& w) : Error("InvariantViolation: " + w, false) {}
};

} // namespace lorenz
