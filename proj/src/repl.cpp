#include "hypsel/repl.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace hypsel {

namespace {

std::string trim(const std::string &s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

const char *kHelp =
    "selection:   ah | dh | chctx(c) | chlex(l) | mklex | mklex(i,..) | mkctx(Some) | mkctx(All) | mkctx(h,..)\n"
    "             creation commands take an optional 'as <name>'; separate commands with '&'\n"
    "navigation:  ne | pv\n"
    "provers:     pr\n"
    "inspection:  po | ctx | lex | hyp [context] | lemma | script | save-script <path>\n"
    "other:       help | quit\n";

} // namespace

Repl::Repl(std::shared_ptr<const PogFile> pog, std::vector<ProverConfig> registry, std::ostream &out,
           PortfolioOptions options)
    : wb_(std::move(pog)), registry_(std::move(registry)), options_(options), out_(out)
{
    wb_.set_prove_hook([this](const Lemma &lemma, const ProofObligation &) {
        std::size_t active = 0;
        for (const auto &p : registry_)
            active += p.enabled ? 1 : 0;
        out_ << "running " << active << " prover" << (active == 1 ? "" : "s") << " on " << lemma.hypotheses.size()
             << " hypotheses..." << std::endl;
        try {
            PortfolioResult r = run_portfolio(lemma, registry_, options_);
            last_proof_ = r;
            return ProveReport{r.overall_valid, summarize(r)};
        } catch (const std::exception &e) {
            return ProveReport{false, std::string("provers could not run: ") + e.what()};
        }
    });
}

void Repl::flush_messages()
{
    const auto &msgs = wb_.messages();
    for (; shown_messages_ < msgs.size(); ++shown_messages_) {
        const Message &m = msgs[shown_messages_];
        if (m.level == MessageLevel::Error)
            out_ << "error: " << m.text << '\n';
        else
            out_ << "  " << m.text << '\n';
    }
}

void Repl::list_pos()
{
    const PogFile &pog = wb_.pog();
    for (std::size_t i = 0; i < pog.pos.size(); ++i) {
        const auto &po = pog.pos[i];
        out_ << (i == wb_.cursor() ? "> " : "  ") << "[" << i << "] " << po.name << "  (" << to_string(po.group)
             << ", " << po.hypotheses.size() << " hyps)" << (wb_.proved(po.name) ? "  proved" : "") << '\n';
    }
}

void Repl::list_contexts()
{
    const auto &st = wb_.session().state();
    for (const auto &c : st.contexts)
        out_ << (c.name == st.current_context ? "* " : "  ") << c.name << " (" << c.members.size() << ")\n";
}

void Repl::list_lexicons()
{
    const auto &st = wb_.session().state();
    for (const auto &l : st.lexicons) {
        out_ << (l.name == st.current_lexicon ? "* " : "  ") << l.name << " {";
        bool first = true;
        for (const auto &id : l.ids) {
            out_ << (first ? "" : ", ") << id;
            first = false;
        }
        out_ << "}\n";
    }
}

void Repl::list_hypotheses(const std::string &context)
{
    const Session &s = wb_.session();
    const Context *c = context.empty() ? &s.current_context() : s.find_context(context);
    if (!c) {
        wb_.note(MessageLevel::Error, "unknown context '" + context + "'");
        return;
    }
    const auto &hyps = s.po().hypotheses;
    for (auto i : c->members) {
        const auto &h = hyps[i];
        out_ << (s.state().selected.contains(i) ? "+ " : "  ") << h.id << " [" << to_string(h.origin) << "] "
             << print_formula(h.formula) << '\n';
    }
    out_ << "(" << c->members.size() << " hypotheses in " << c->name << ")\n";
}

void Repl::print_lemma()
{
    const Session &s = wb_.session();
    const auto &st = s.state();
    const auto &hyps = s.po().hypotheses;
    out_ << "lemma for " << s.po().name << " (" << st.selected.size() << " of " << hyps.size() << " hypotheses)\n";
    for (auto i : st.selected)
        out_ << "  " << hyps[i].id << ": " << print_formula(hyps[i].formula) << '\n';
    out_ << "  goal: " << print_formula(s.po().goal) << '\n';
}

void Repl::run_commands(const std::string &line)
{
    Script script;
    try {
        script = parse_script(line);
    } catch (const ScriptError &e) {
        wb_.note(MessageLevel::Error, e.what());
        return;
    }
    for (const auto &cmd : script.commands) {
        Outcome o = wb_.execute(cmd);
        flush_messages();
        if (!o.ok)
            break;
    }
}

bool Repl::handle_line(const std::string &raw)
{
    try {
        std::string line = trim(raw);
        std::istringstream words(line);
        std::string head, rest;
        words >> head;
        std::getline(words, rest);
        rest = trim(rest);

        if (line.empty() || line[0] == '#') {
        } else if (head == "quit" || head == "exit") {
            return false;
        } else if (head == "help") {
            out_ << kHelp;
        } else if (line == "po") {
            list_pos();
        } else if (line == "ctx") {
            list_contexts();
        } else if (line == "lex") {
            list_lexicons();
        } else if (head == "hyp") {
            list_hypotheses(rest);
        } else if (line == "lemma") {
            print_lemma();
        } else if (line == "script") {
            out_ << format_script(wb_.session().state().log);
        } else if (head == "save-script") {
            if (rest.empty()) {
                wb_.note(MessageLevel::Error, "usage: save-script <path>");
            } else {
                std::ofstream f(rest);
                f << format_script(wb_.session().state().log);
                if (f)
                    wb_.note(MessageLevel::Info, "script saved to " + rest);
                else
                    wb_.note(MessageLevel::Error, "cannot write " + rest);
            }
        } else {
            run_commands(line);
        }
    } catch (const std::exception &e) {
        wb_.note(MessageLevel::Error, std::string("internal error: ") + e.what());
    }
    flush_messages();
    out_.flush();
    return true;
}

int Repl::run(std::istream &in, bool show_prompt)
{
    flush_messages();
    if (show_prompt)
        out_ << "opened " << wb_.session().po().name << " (" << wb_.pog().pos.size()
             << " proof obligations); type 'help' for commands\n";
    std::string line;
    for (;;) {
        if (show_prompt)
            out_ << wb_.session().po().name << "> " << std::flush;
        if (!std::getline(in, line))
            break;
        if (!handle_line(line))
            break;
    }
    return 0;
}

} // namespace hypsel
