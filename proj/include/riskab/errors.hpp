#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace riskab {

// An argument violates an operation's preconditions (non-finite input, bad range).
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Materializing the trusted bin set would exceed the key cap; use lazy membership.
struct EnumerationTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The queried bin has (numerically) zero probability under the input distribution.
struct UnreachableBinError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No closed form available for this distribution kind.
struct UnsupportedQueryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Agent act/observe called out of turn.
struct ProtocolError : std::logic_error {
    using std::logic_error::logic_error;
};

// Episode aborted mid-run; carries the offending round (or rep, for a
// replication that failed inside a Monte Carlo batch).
struct AbortedRunError : std::runtime_error {
    AbortedRunError(std::int64_t t, const std::string& what)
        : std::runtime_error("round " + std::to_string(t) + ": " + what), t(t) {}
    AbortedRunError(const std::string& what, std::int64_t rep)
        : std::runtime_error("rep " + std::to_string(rep) + ": " + what), t(rep) {}
    std::int64_t t;
};

// Trace audit cannot run (thinned trace, or the bin-mean oracle failed).
struct AuditUnavailableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Too few usable points for a fit.
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config file parse or validation failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace riskab
