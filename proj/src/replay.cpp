#include "hypsel/replay.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <mutex>
#include <thread>

namespace hypsel {

bool ReplayReport::all_valid() const
{
    return !pos.empty() && std::all_of(pos.begin(), pos.end(), [](const PoReplay &p) { return p.valid(); });
}

namespace {

bool glob_match(std::string_view pattern, std::string_view text)
{
    std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*')
        ++p;
    return p == pattern.size();
}

std::optional<std::size_t> number(std::string_view s)
{
    std::size_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

std::string trimmed(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

} // namespace

std::vector<std::size_t> select_pos(const PogFile &pog, std::string_view selector)
{
    std::vector<bool> picked(pog.pos.size());
    std::string sel = trimmed(selector);
    if (sel.empty())
        sel = "all";

    std::size_t start = 0;
    while (start <= sel.size()) {
        std::size_t comma = sel.find(',', start);
        std::string item = trimmed(std::string_view(sel).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        start = comma == std::string::npos ? sel.size() + 1 : comma + 1;
        if (item.empty())
            continue;
        if (item == "all" || item == "*") {
            std::fill(picked.begin(), picked.end(), true);
        } else if (auto n = number(item)) {
            if (*n < picked.size())
                picked[*n] = true;
        } else if (auto dash = item.find('-'); dash != std::string::npos && number(item.substr(0, dash)) &&
                                               number(item.substr(dash + 1))) {
            std::size_t lo = *number(item.substr(0, dash)), hi = *number(item.substr(dash + 1));
            for (std::size_t i = lo; i <= hi && i < picked.size(); ++i)
                picked[i] = true;
        } else if (item.rfind("group:", 0) == 0) {
            auto g = parse_group(item.substr(6));
            if (!g)
                throw SelectorError("unknown group '" + item.substr(6) + "'");
            for (std::size_t i = 0; i < pog.pos.size(); ++i)
                if (pog.pos[i].group == *g)
                    picked[i] = true;
        } else {
            for (std::size_t i = 0; i < pog.pos.size(); ++i)
                if (glob_match(item, pog.pos[i].name))
                    picked[i] = true;
        }
    }

    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < picked.size(); ++i)
        if (picked[i])
            out.push_back(i);
    if (out.empty())
        throw SelectorError("selector '" + std::string(selector) + "' matches no proof obligation");
    return out;
}

PoReplay replay_one(const std::vector<Command> &commands, const PogFile &pog, std::size_t index,
                    const ReplayOptions &options)
{
    Session session = Session::open(pog, index);
    PoReplay out;
    out.po_index = index;
    out.po_name = session.po().name;

    auto prove = [&] {
        out.proof = run_portfolio(session.current_lemma(), options.registry, options.portfolio);
    };

    for (std::size_t i = 0; i < commands.size(); ++i) {
        const Command &cmd = commands[i];
        Outcome o;
        if (cmd.kind == CommandKind::Prove) {
            prove();
            session.record(cmd);
        } else if (cmd.kind == CommandKind::Next || cmd.kind == CommandKind::Prev) {
            o = Outcome::failure("navigation is not available during replay");
        } else {
            o = session.execute(cmd);
        }
        if (!o.ok) {
            CommandFailure f{i, format_command(cmd), o.message};
            if (options.mode == ReplayMode::AbortOnError) {
                out.error = std::move(f);
                break;
            }
            out.skipped.push_back(std::move(f));
        }
    }
    if (options.prove_at_end && !out.error && !(commands.size() && commands.back().kind == CommandKind::Prove))
        prove();

    out.lemma = session.current_lemma();
    out.selected_ids = session.ids_of(session.state().selected);
    out.final_state = session.state();
    return out;
}

ReplayReport replay(const Script &script, const PogFile &pog, std::string_view selector, const ReplayOptions &options)
{
    std::vector<std::size_t> targets = select_pos(pog, selector);
    ReplayReport report;
    report.pos.resize(targets.size());

    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, targets.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    {
        std::vector<std::jthread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t k; (k = next.fetch_add(1)) < targets.size();) {
                    try {
                        report.pos[k] = replay_one(script.commands, pog, targets[k], options);
                    } catch (...) {
                        std::lock_guard lock(failure_mu);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return report;
}

} // namespace hypsel
