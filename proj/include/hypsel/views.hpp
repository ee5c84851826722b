#pragma once

// JSON renderings of reports and session state, shared by `--json` output
// and the HTTP service.

#include "hypsel/provers.hpp"
#include "hypsel/replay.hpp"
#include "hypsel/session.hpp"

#include <json.hpp>

namespace hypsel {

nlohmann::json to_json(const ProverVerdict &v);
nlohmann::json to_json(const PortfolioResult &r);
nlohmann::json to_json(const PoReplay &r);
nlohmann::json to_json(const ReplayReport &r);
nlohmann::json to_json(const ProverConfig &p);

/// Everything the panes need: goal, hypotheses, contexts, lexicons,
/// selection, script log and messages.
nlohmann::json state_view(const Workbench &wb);

/// {name, group, proved} per obligation.
nlohmann::json po_list_view(const Workbench &wb);

} // namespace hypsel
