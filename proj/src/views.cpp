#include "hypsel/views.hpp"

namespace hypsel {

using nlohmann::json;

json to_json(const ProverVerdict &v)
{
    return {{"verdict", to_string(v.kind)}, {"message", v.message}, {"elapsed_s", v.elapsed_s}};
}

json to_json(const PortfolioResult &r)
{
    json runs = json::array();
    for (const auto &run : r.runs) {
        json j = to_json(run.verdict);
        j["prover"] = run.prover;
        runs.push_back(std::move(j));
    }
    return {{"overall", r.overall_valid ? "valid" : "not_proved"},
            {"fingerprint", r.fingerprint},
            {"wall_s", r.wall_s},
            {"provers", std::move(runs)}};
}

namespace {

json failure_json(const CommandFailure &f)
{
    return {{"command_index", f.command_index}, {"command", f.command}, {"message", f.message}};
}

} // namespace

json to_json(const PoReplay &r)
{
    json j = {{"index", r.po_index},
              {"name", r.po_name},
              {"lemma_size", r.lemma.hypotheses.size()},
              {"selected", r.selected_ids},
              {"error", r.error ? failure_json(*r.error) : json(nullptr)},
              {"proof", r.proof ? to_json(*r.proof) : json(nullptr)},
              {"valid", r.valid()}};
    json skipped = json::array();
    for (const auto &s : r.skipped)
        skipped.push_back(failure_json(s));
    j["skipped"] = std::move(skipped);
    return j;
}

json to_json(const ReplayReport &r)
{
    json pos = json::array();
    for (const auto &p : r.pos)
        pos.push_back(to_json(p));
    return {{"pos", std::move(pos)}, {"all_valid", r.all_valid()}};
}

json to_json(const ProverConfig &p)
{
    return {{"name", p.name},
            {"command", p.command_template},
            {"timeout_s", p.timeout_s},
            {"enabled", p.enabled},
            {"valid_patterns", p.valid_patterns},
            {"invalid_patterns", p.invalid_patterns},
            {"note", p.note}};
}

json state_view(const Workbench &wb)
{
    const Session &s = wb.session();
    const SessionState &st = s.state();
    const ProofObligation &po = s.po();

    json hyps = json::array();
    for (std::size_t i = 0; i < po.hypotheses.size(); ++i) {
        const auto &h = po.hypotheses[i];
        hyps.push_back({{"id", h.id},
                        {"origin", to_string(h.origin)},
                        {"text", print_formula(h.formula)},
                        {"selected", st.selected.contains(static_cast<std::uint32_t>(i))}});
    }
    json contexts = json::array();
    for (const auto &c : st.contexts)
        contexts.push_back({{"name", c.name},
                            {"size", c.members.size()},
                            {"current", c.name == st.current_context},
                            {"predefined", c.predefined},
                            {"members", s.ids_of(c.members)}});
    json lexicons = json::array();
    for (const auto &l : st.lexicons)
        lexicons.push_back({{"name", l.name},
                            {"ids", std::vector<std::string>(l.ids.begin(), l.ids.end())},
                            {"current", l.name == st.current_lexicon},
                            {"predefined", l.predefined}});
    json script = json::array();
    for (const auto &c : st.log)
        script.push_back(format_command(c));
    json messages = json::array();
    for (const auto &m : wb.messages())
        messages.push_back({{"level", m.level == MessageLevel::Error ? "error" : "info"}, {"text", m.text}});

    return {{"po", po.name},
            {"po_index", wb.cursor()},
            {"group", to_string(po.group)},
            {"goal", print_formula(po.goal)},
            {"proved", wb.proved(po.name)},
            {"hypotheses", std::move(hyps)},
            {"contexts", std::move(contexts)},
            {"lexicons", std::move(lexicons)},
            {"current_context", st.current_context},
            {"current_lexicon", st.current_lexicon},
            {"selected", s.ids_of(st.selected)},
            {"script", std::move(script)},
            {"messages", std::move(messages)}};
}

json po_list_view(const Workbench &wb)
{
    json out = json::array();
    for (const auto &po : wb.pog().pos)
        out.push_back({{"name", po.name}, {"group", to_string(po.group)}, {"proved", wb.proved(po.name)}});
    return out;
}

} // namespace hypsel
