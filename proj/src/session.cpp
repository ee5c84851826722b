#include "hypsel/session.hpp"

#include <algorithm>
#include <stdexcept>

namespace hypsel {

PoIndex::PoIndex(ProofObligation p) : po(std::move(p))
{
    hyp_fv.reserve(po.hypotheses.size());
    for (std::size_t i = 0; i < po.hypotheses.size(); ++i) {
        hyp_fv.push_back(free_identifiers(po.hypotheses[i].formula));
        universe.insert(hyp_fv.back().begin(), hyp_fv.back().end());
        position.emplace(po.hypotheses[i].id, static_cast<std::uint32_t>(i));
    }
    IdentSet goal = free_identifiers(po.goal);
    universe.insert(goal.begin(), goal.end());
}

Session::Session(std::shared_ptr<const PoIndex> index) : index_(std::move(index))
{
    state_.contexts = predefined_contexts(index_->po);
    state_.lexicons = {goal_lexicon(index_->po)};
    state_.current_context = "local";
    state_.current_lexicon = "goal";
}

Session::Session(ProofObligation po) : Session(std::make_shared<const PoIndex>(std::move(po))) {}

Session Session::open(const PogFile &pog, std::size_t index)
{
    if (index >= pog.pos.size())
        throw std::out_of_range("proof obligation index " + std::to_string(index) + " out of range (" +
                                std::to_string(pog.pos.size()) + " available)");
    return Session(pog.pos[index]);
}

const Context *Session::find_context(std::string_view name) const
{
    for (const auto &c : state_.contexts)
        if (c.name == name)
            return &c;
    return nullptr;
}

const Lexicon *Session::find_lexicon(std::string_view name) const
{
    for (const auto &l : state_.lexicons)
        if (l.name == name)
            return &l;
    return nullptr;
}

const Context &Session::current_context() const
{
    return *find_context(state_.current_context);
}

const Lexicon &Session::current_lexicon() const
{
    return *find_lexicon(state_.current_lexicon);
}

IdentSet Session::free_identifiers_of(const HypSet &members) const
{
    IdentSet out;
    for (auto i : members)
        out.insert(index_->hyp_fv[i].begin(), index_->hyp_fv[i].end());
    return out;
}

std::vector<std::string> Session::ids_of(const HypSet &members) const
{
    std::vector<std::string> out;
    out.reserve(members.size());
    for (auto i : members)
        out.push_back(index_->po.hypotheses[i].id);
    return out;
}

Lemma Session::current_lemma() const
{
    Lemma lemma{{}, index_->po.goal};
    lemma.hypotheses.reserve(state_.selected.size());
    for (auto i : state_.selected)
        lemma.hypotheses.push_back(index_->po.hypotheses[i]);
    return lemma;
}

std::optional<std::string> Session::alias_problem(const std::string &alias, bool context) const
{
    if (!is_name_token(alias))
        return "invalid name '" + alias + "'";
    if (context ? find_context(alias) != nullptr : find_lexicon(alias) != nullptr)
        return std::string(context ? "context" : "lexicon") + " '" + alias + "' already exists";
    return std::nullopt;
}

Outcome Session::add_context(HypSet members, const std::optional<std::string> &alias)
{
    std::string name;
    if (alias) {
        if (auto problem = alias_problem(*alias, true))
            return Outcome::failure(*problem);
        name = *alias;
    } else {
        std::size_t k = state_.next_context_number;
        while (find_context("ctx_" + std::to_string(k)))
            ++k;
        name = "ctx_" + std::to_string(k);
        state_.next_context_number = k + 1;
    }
    std::size_t n = members.size();
    state_.contexts.push_back({name, std::move(members), false});
    state_.current_context = name;
    return Outcome::success("created context " + name + " (" + std::to_string(n) + " hypotheses), now current");
}

Outcome Session::add_lexicon(IdentSet ids, const std::optional<std::string> &alias)
{
    std::string name;
    if (alias) {
        if (auto problem = alias_problem(*alias, false))
            return Outcome::failure(*problem);
        name = *alias;
    } else {
        std::size_t k = state_.next_lexicon_number;
        while (find_lexicon("lex_" + std::to_string(k)))
            ++k;
        name = "lex_" + std::to_string(k);
        state_.next_lexicon_number = k + 1;
    }
    std::size_t n = ids.size();
    state_.lexicons.push_back({name, std::move(ids), false});
    state_.current_lexicon = name;
    return Outcome::success("created lexicon " + name + " (" + std::to_string(n) + " identifiers), now current");
}

namespace {

bool intersects(const IdentSet &a, const IdentSet &b)
{
    const IdentSet &small = a.size() <= b.size() ? a : b;
    const IdentSet &large = a.size() <= b.size() ? b : a;
    return std::any_of(small.begin(), small.end(), [&](const std::string &x) { return large.count(x) != 0; });
}

} // namespace

Outcome Session::execute(const Command &cmd)
{
    const Context &c = current_context();
    const Lexicon &l = current_lexicon();
    Outcome result;

    switch (cmd.kind) {
    case CommandKind::AddHyps: {
        std::size_t before = state_.selected.size();
        state_.selected = state_.selected.united(c.members);
        result = Outcome::success("selected " + std::to_string(state_.selected.size() - before) +
                                  " hypotheses from " + c.name);
        break;
    }
    case CommandKind::DropHyps: {
        std::size_t before = state_.selected.size();
        state_.selected = state_.selected.minus(c.members);
        result = Outcome::success("dropped " + std::to_string(before - state_.selected.size()) +
                                  " hypotheses of " + c.name);
        break;
    }
    case CommandKind::ChangeContext:
        if (!find_context(cmd.args.at(0)))
            return Outcome::failure("unknown context '" + cmd.args[0] + "'");
        state_.current_context = cmd.args[0];
        result = Outcome::success("current context is " + cmd.args[0]);
        break;
    case CommandKind::ChangeLexicon:
        if (!find_lexicon(cmd.args.at(0)))
            return Outcome::failure("unknown lexicon '" + cmd.args[0] + "'");
        state_.current_lexicon = cmd.args[0];
        result = Outcome::success("current lexicon is " + cmd.args[0]);
        break;
    case CommandKind::MakeLexicon: {
        IdentSet ids = free_identifiers_of(c.members);
        if (ids.empty())
            return Outcome::failure("fv(" + c.name + ") is empty: the current context has no free identifiers");
        result = add_lexicon(std::move(ids), cmd.alias);
        break;
    }
    case CommandKind::MakeLexiconIds: {
        IdentSet ids;
        for (const auto &id : cmd.args) {
            if (!l.ids.count(id))
                return Outcome::failure("identifier '" + id + "' is not in the current lexicon " + l.name);
            ids.insert(id);
        }
        result = add_lexicon(std::move(ids), cmd.alias);
        break;
    }
    case CommandKind::MakeContextSome:
    case CommandKind::MakeContextAll: {
        bool some = cmd.kind == CommandKind::MakeContextSome;
        std::vector<std::uint32_t> picked;
        for (auto i : c.members) {
            const IdentSet &fv = index_->hyp_fv[i];
            bool keep = some ? intersects(fv, l.ids) : std::includes(fv.begin(), fv.end(), l.ids.begin(), l.ids.end());
            if (keep)
                picked.push_back(i);
        }
        if (picked.empty())
            return Outcome::failure(std::string("no hypothesis of context ") + c.name +
                                    (some ? " mentions an identifier of lexicon " : " mentions every identifier of lexicon ") +
                                    l.name);
        result = add_context(HypSet(std::move(picked)), cmd.alias);
        break;
    }
    case CommandKind::MakeContextIds: {
        std::vector<std::uint32_t> picked;
        for (const auto &id : cmd.args) {
            auto it = index_->position.find(id);
            if (it == index_->position.end() || !c.members.contains(it->second))
                return Outcome::failure("hypothesis '" + id + "' is not in the current context " + c.name);
            picked.push_back(it->second);
        }
        result = add_context(HypSet(std::move(picked)), cmd.alias);
        break;
    }
    case CommandKind::Next:
    case CommandKind::Prev:
    case CommandKind::Prove:
        return Outcome::failure("'" + format_command(cmd) + "' is not available here");
    }

    if (result.ok)
        state_.log.push_back(cmd);
    return result;
}

void Session::check_invariants() const
{
    const std::size_t n = index_->po.hypotheses.size();
    auto within = [n](const HypSet &s) { return s.empty() || s.items().back() < n; };
    if (!within(state_.selected))
        throw std::logic_error("selection escapes the hypotheses");
    for (const auto &c : state_.contexts)
        if (!within(c.members))
            throw std::logic_error("context " + c.name + " escapes the hypotheses");
    for (const auto &l : state_.lexicons)
        if (!std::includes(index_->universe.begin(), index_->universe.end(), l.ids.begin(), l.ids.end()))
            throw std::logic_error("lexicon " + l.name + " has identifiers foreign to the obligation");
    if (!find_context(state_.current_context))
        throw std::logic_error("current context missing");
    if (!find_lexicon(state_.current_lexicon))
        throw std::logic_error("current lexicon missing");
    auto predefined = predefined_contexts(index_->po);
    for (const auto &p : predefined) {
        const Context *c = find_context(p.name);
        if (!c || c->members != p.members || !c->predefined)
            throw std::logic_error("pre-defined context " + p.name + " altered");
    }
    const Lexicon *goal = find_lexicon("goal");
    if (!goal || !goal->predefined || goal->ids != goal_lexicon(index_->po).ids)
        throw std::logic_error("pre-defined lexicon goal altered");
}

// ---------------------------------------------------------------------------
// Workbench

Workbench::Workbench(std::shared_ptr<const PogFile> pog, std::size_t start)
    : pog_(std::move(pog)), cursor_(start), session_(Session::open(*pog_, start))
{
}

Outcome Workbench::report(Outcome o)
{
    if (!o.message.empty())
        note(o.ok ? MessageLevel::Info : MessageLevel::Error, o.message);
    return o;
}

Outcome Workbench::reopen(std::size_t index)
{
    archive_.emplace_back(session_.po().name, session_.state().log);
    session_ = Session::open(*pog_, index);
    cursor_ = index;
    return Outcome::success("opened " + session_.po().name);
}

Outcome Workbench::next()
{
    if (cursor_ + 1 >= pog_->pos.size())
        return report(Outcome::success("already at the last proof obligation"));
    return report(reopen(cursor_ + 1));
}

Outcome Workbench::prev()
{
    if (cursor_ == 0)
        return report(Outcome::success("already at the first proof obligation"));
    return report(reopen(cursor_ - 1));
}

Outcome Workbench::jump(std::size_t index)
{
    if (index >= pog_->pos.size())
        return report(Outcome::failure("no proof obligation number " + std::to_string(index)));
    return report(reopen(index));
}

Outcome Workbench::prove()
{
    if (!hook_)
        return report(Outcome::failure("no provers are configured"));
    ProveReport r = hook_(session_.current_lemma(), session_.po());
    session_.record({CommandKind::Prove, {}, {}});
    if (r.valid && !proved(session_.po().name))
        proved_.push_back(session_.po().name);
    return report(Outcome::success(r.summary));
}

Outcome Workbench::execute(const Command &cmd)
{
    switch (cmd.kind) {
    case CommandKind::Next: return next();
    case CommandKind::Prev: return prev();
    case CommandKind::Prove: return prove();
    default: return report(session_.execute(cmd));
    }
}

bool Workbench::proved(const std::string &po_name) const
{
    return std::find(proved_.begin(), proved_.end(), po_name) != proved_.end();
}

} // namespace hypsel
