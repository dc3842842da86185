#pragma once

#include <stdexcept>
#include <string>

namespace imc {

/// Process exit codes shared by the library error types and the CLI.
enum class ExitCode : int {
    ok = 0,
    usage = 1,
    validation = 2,
    infeasible = 3,
    divergence = 4,
    certification = 5,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

/// Bad inputs: malformed config, invalid graph, out-of-range arguments.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ExitCode::validation, what) {}
};

/// A design or schedule condition cannot be met (Riccati sweep exhausted,
/// pinning-gain condition violated, per-period resilience condition fails).
struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& what) : Error(ExitCode::infeasible, what) {}
};

/// A simulated signal left the finite range; the run is aborted.
struct DivergenceError : Error {
    explicit DivergenceError(const std::string& what) : Error(ExitCode::divergence, what) {}
};

} // namespace imc
