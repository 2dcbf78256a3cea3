#pragma once

#include <stdexcept>
#include <string>

namespace ftl {

/// Argument outside the domain of a constitutive law (negative or non-finite density).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A value type was built from data that violates its invariants.
class ConstructionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two measures passed to a transport distance carry different total mass.
class MassMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The exact Riemann / Godunov oracles only handle concave fluxes.
class UnsupportedFluxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration; raised before any output is written.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace ftl
