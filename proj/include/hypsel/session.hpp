#pragma once

// Hypothesis-selection state machine over one proof obligation, and the
// workbench that navigates between the obligations of a component.

#include "hypsel/pomodel.hpp"
#include "hypsel/script.hpp"

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace hypsel {

/// Result of applying one command. A failed condition is not an exception:
/// the state is left untouched and `message` says why.
struct Outcome {
    bool ok = true;
    std::string message;

    static Outcome success(std::string msg = {}) { return {true, std::move(msg)}; }
    static Outcome failure(std::string msg) { return {false, std::move(msg)}; }
};

/// Immutable per-obligation data shared by every session on that obligation.
struct PoIndex {
    ProofObligation po;
    std::vector<IdentSet> hyp_fv;
    /// Union of fv over the hypotheses and the goal.
    IdentSet universe;
    std::unordered_map<std::string, std::uint32_t> position;

    explicit PoIndex(ProofObligation po);
};

struct SessionState {
    std::vector<Context> contexts;
    std::vector<Lexicon> lexicons;
    std::string current_context;
    std::string current_lexicon;
    HypSet selected;
    std::vector<Command> log;
    std::size_t next_context_number = 1;
    std::size_t next_lexicon_number = 1;

    bool operator==(const SessionState &) const = default;
};

struct Lemma {
    std::vector<Hypothesis> hypotheses;
    Formula goal = Formula::boolean(true);

    bool operator==(const Lemma &) const = default;
};

class Session {
public:
    explicit Session(std::shared_ptr<const PoIndex> index);
    explicit Session(ProofObligation po);

    /// Throws std::out_of_range on a bad index.
    static Session open(const PogFile &pog, std::size_t index);

    /// Applies one of the nine selection commands. Navigation and `pr`
    /// belong to the workbench and fail here.
    Outcome execute(const Command &cmd);

    Outcome ah() { return execute({CommandKind::AddHyps, {}, {}}); }
    Outcome dh() { return execute({CommandKind::DropHyps, {}, {}}); }
    Outcome chctx(std::string name) { return execute({CommandKind::ChangeContext, {std::move(name)}, {}}); }
    Outcome chlex(std::string name) { return execute({CommandKind::ChangeLexicon, {std::move(name)}, {}}); }
    Outcome mklex() { return execute({CommandKind::MakeLexicon, {}, {}}); }
    Outcome mklex(std::vector<std::string> ids) { return execute({CommandKind::MakeLexiconIds, std::move(ids), {}}); }
    Outcome mkctx_some() { return execute({CommandKind::MakeContextSome, {}, {}}); }
    Outcome mkctx_all() { return execute({CommandKind::MakeContextAll, {}, {}}); }
    Outcome mkctx(std::vector<std::string> ids) { return execute({CommandKind::MakeContextIds, std::move(ids), {}}); }

    /// Appends a command that does not alter the selection (e.g. `pr`).
    void record(const Command &cmd) { state_.log.push_back(cmd); }

    Lemma current_lemma() const;

    const SessionState &state() const { return state_; }
    const ProofObligation &po() const { return index_->po; }
    const std::shared_ptr<const PoIndex> &index() const { return index_; }

    const Context &current_context() const;
    const Lexicon &current_lexicon() const;
    const Context *find_context(std::string_view name) const;
    const Lexicon *find_lexicon(std::string_view name) const;

    /// Union of fv over the members.
    IdentSet free_identifiers_of(const HypSet &members) const;
    std::vector<std::string> ids_of(const HypSet &members) const;

    /// Throws std::logic_error if a state invariant is broken.
    void check_invariants() const;

private:
    Outcome add_context(HypSet members, const std::optional<std::string> &alias);
    Outcome add_lexicon(IdentSet ids, const std::optional<std::string> &alias);
    std::optional<std::string> alias_problem(const std::string &alias, bool context) const;

    std::shared_ptr<const PoIndex> index_;
    SessionState state_;
};

enum class MessageLevel { Info, Error };

struct Message {
    MessageLevel level;
    std::string text;

    bool operator==(const Message &) const = default;
};

struct ProveReport {
    bool valid = false;
    std::string summary;
};

using ProveHook = std::function<ProveReport(const Lemma &, const ProofObligation &)>;

/// Navigation across the obligations of one component. Each visit starts
/// from a fresh session; logs of sessions left behind are archived.
class Workbench {
public:
    explicit Workbench(std::shared_ptr<const PogFile> pog, std::size_t start = 0);

    /// Runs selection commands, `ne`, `pv` and `pr`. Every outcome is also
    /// appended to messages().
    Outcome execute(const Command &cmd);
    Outcome next();
    Outcome prev();
    Outcome prove();
    /// Reopens the obligation at `index` with a fresh session.
    Outcome jump(std::size_t index);

    void set_prove_hook(ProveHook hook) { hook_ = std::move(hook); }

    const PogFile &pog() const { return *pog_; }
    std::size_t cursor() const { return cursor_; }
    const Session &session() const { return session_; }
    const std::vector<std::pair<std::string, std::vector<Command>>> &archive() const { return archive_; }
    const std::vector<Message> &messages() const { return messages_; }
    bool proved(const std::string &po_name) const;
    void note(MessageLevel level, std::string text) { messages_.push_back({level, std::move(text)}); }

private:
    Outcome reopen(std::size_t index);
    Outcome report(Outcome o);

    std::shared_ptr<const PogFile> pog_;
    std::size_t cursor_;
    Session session_;
    std::vector<std::pair<std::string, std::vector<Command>>> archive_;
    std::vector<std::string> proved_;
    std::vector<Message> messages_;
    ProveHook hook_;
};

} // namespace hypsel
