#pragma once

#include <stdexcept>
#include <string>

namespace ilmm {

/// Bad market inputs: malformed quote files, inconsistent schemas, units.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Violations of curve preconditions (non-monotone discounts, out-of-support
/// queries, missing fixings).
class CurveError : public std::runtime_error {
public:
    explicit CurveError(const std::string& what) : std::runtime_error(what) {}
};

/// Quotes that admit arbitrage (negative strip prices, prices outside the
/// no-arbitrage band).
class ArbitrageError : public std::runtime_error {
public:
    explicit ArbitrageError(const std::string& what) : std::runtime_error(what) {}
};

/// Model-level failures: bad vol surfaces, unknown measures, infeasible or
/// unidentifiable calibration problems.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ilmm
