#pragma once

#include "hypsel/provers.hpp"
#include "hypsel/script.hpp"
#include "hypsel/session.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hypsel {

enum class ReplayMode { AbortOnError, KeepGoing };

struct CommandFailure {
    std::size_t command_index;
    std::string command;
    std::string message;
};

struct PoReplay {
    std::size_t po_index = 0;
    std::string po_name;
    Lemma lemma;
    std::vector<std::string> selected_ids;
    SessionState final_state;
    /// Set when AbortOnError stopped this obligation.
    std::optional<CommandFailure> error;
    /// Commands KeepGoing skipped.
    std::vector<CommandFailure> skipped;
    /// Result of the last `pr` (or of the closing proof when requested).
    std::optional<PortfolioResult> proof;

    bool valid() const { return proof && proof->overall_valid; }
};

struct ReplayReport {
    std::vector<PoReplay> pos;

    bool all_valid() const;
};

class SelectorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Selector: comma-separated items, each `all`, a 0-based index, an index
/// range `a-b`, `group:<group>`, or a name pattern with `*`/`?`. Returns
/// matching indices in file order; throws SelectorError when none match.
std::vector<std::size_t> select_pos(const PogFile &pog, std::string_view selector);

struct ReplayOptions {
    ReplayMode mode = ReplayMode::AbortOnError;
    std::vector<ProverConfig> registry = {builtin_config()};
    PortfolioOptions portfolio;
    /// Run the portfolio on the final lemma even if the script lacks `pr`.
    bool prove_at_end = false;
    /// Worker threads; 0 picks from the hardware.
    std::size_t threads = 0;
};

/// Applies the commands to one obligation from a fresh session.
PoReplay replay_one(const std::vector<Command> &commands, const PogFile &pog, std::size_t index,
                    const ReplayOptions &options);

ReplayReport replay(const Script &script, const PogFile &pog, std::string_view selector,
                    const ReplayOptions &options = {});

} // namespace hypsel
