#pragma once

// Lemma export, the built-in propositional checker and dispatch of a lemma
// to a portfolio of external prover commands.

#include "hypsel/session.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

namespace hypsel {

enum class VerdictKind { Valid, Countermodel, Unknown, Timeout, Error };

std::string_view to_string(VerdictKind kind);

struct ProverVerdict {
    VerdictKind kind = VerdictKind::Unknown;
    std::string message;
    double elapsed_s = 0.0;
};

inline constexpr double kTimeoutGraceSeconds = 1.0;
inline constexpr std::string_view kBuiltinProver = "builtin";

struct ProverConfig {
    std::string name;
    /// Shell command; `{input}` becomes the lemma file, `{timeout_s}` the timeout.
    std::string command_template;
    double timeout_s = 10.0;
    bool enabled = true;
    std::vector<std::string> valid_patterns;
    std::vector<std::string> invalid_patterns;
    /// Why discovery disabled the entry, if it did.
    std::string note;

    bool is_builtin() const { return name == kBuiltinProver; }
};

ProverConfig builtin_config();

struct ProverRun {
    std::string prover;
    ProverVerdict verdict;
};

struct PortfolioResult {
    std::vector<ProverRun> runs;
    bool overall_valid = false;
    std::string fingerprint;
    double wall_s = 0.0;
};

/// `hyp: <formula>` per hypothesis then `goal: <formula>`, newline-terminated.
std::string export_lemma(const Lemma &lemma);

/// 64-bit FNV-1a of the text, as 16 lowercase hex digits.
std::string fingerprint(std::string_view text);

inline constexpr std::size_t kExhaustiveAtomLimit = 20;

/// Decides (AND hypotheses) => goal at the propositional level. Non-boolean
/// subformulas are opaque atoms keyed by their printed form.
ProverVerdict builtin_prove(const Lemma &lemma, std::size_t step_budget);

/// As above, also giving up with `timeout` at `deadline` or `unknown` on stop.
ProverVerdict builtin_prove(const Lemma &lemma, std::size_t step_budget,
                            std::chrono::steady_clock::time_point deadline, std::stop_token stop);

class RegistryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads `[[prover]]` tables with keys name, command, timeout_s,
/// valid_patterns, invalid_patterns, enabled.
std::vector<ProverConfig> parse_registry(std::string_view text);

/// Loads the registry (none: empty), disables entries whose executable is
/// not on the search path, and appends the builtin checker.
std::vector<ProverConfig> discover_provers(const std::optional<std::filesystem::path> &registry_path);

/// Resolves the executable of a command template: the path if it names a
/// file, otherwise a PATH lookup.
std::optional<std::filesystem::path> resolve_executable(const std::string &command_template);

class TemplateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string expand_template(const std::string &tmpl, const std::filesystem::path &input, double timeout_s);

/// Pattern classification of a finished prover's combined output.
ProverVerdict classify_output(const std::string &output, int exit_code, const ProverConfig &config);

struct PortfolioOptions {
    bool stop_on_valid = false;
    std::size_t builtin_budget = 2'000'000;
};

/// Runs every enabled prover concurrently. Throws std::invalid_argument if
/// none is enabled.
PortfolioResult run_portfolio(const Lemma &lemma, const std::vector<ProverConfig> &registry,
                              const PortfolioOptions &options = {});

/// One-line summary, e.g. "overall: valid (builtin: valid 0.001s)".
std::string summarize(const PortfolioResult &result);

} // namespace hypsel
