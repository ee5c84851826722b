// hypsel: hypothesis selection for B proof obligations.

#include "hypsel/pomodel.hpp"
#include "hypsel/provers.hpp"
#include "hypsel/repl.hpp"
#include "hypsel/replay.hpp"
#include "hypsel/script.hpp"
#include "hypsel/service.hpp"
#include "hypsel/views.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace hypsel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotProved = 2;

struct Common {
    std::string registry;
    bool json = false;
};

std::optional<std::filesystem::path> registry_path(const Common &c)
{
    if (!c.registry.empty())
        return std::filesystem::path(c.registry);
    if (const char *env = std::getenv("HYPSEL_REGISTRY"); env && *env)
        return std::filesystem::path(env);
    return std::nullopt;
}

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string verdict_list(const PortfolioResult &r)
{
    std::string out;
    for (const auto &run : r.runs) {
        if (!out.empty())
            out += ' ';
        out += run.prover + "=" + std::string(to_string(run.verdict.kind));
    }
    return out;
}

int cmd_repl(const Common &common, const std::string &pog_path)
{
    auto pog = std::make_shared<const PogFile>(load_pog(pog_path));
    if (pog->pos.empty()) {
        std::cerr << "hypsel: " << pog_path << " has no proof obligations\n";
        return kExitUsage;
    }
    Repl repl(pog, discover_provers(registry_path(common)), std::cout);
    return repl.run(std::cin, isatty(STDIN_FILENO));
}

struct ReplayArgs {
    std::string pog;
    std::string script;
    std::string selector = "all";
    bool keep_going = false;
    bool prove = false;
    bool stop_on_valid = false;
};

int cmd_replay(const Common &common, const ReplayArgs &a)
{
    PogFile pog = load_pog(a.pog);
    Script script = parse_script(read_file(a.script));
    ReplayOptions opts;
    opts.mode = a.keep_going ? ReplayMode::KeepGoing : ReplayMode::AbortOnError;
    opts.registry = discover_provers(registry_path(common));
    opts.prove_at_end = a.prove;
    opts.portfolio.stop_on_valid = a.stop_on_valid;
    ReplayReport report = replay(script, pog, a.selector, opts);

    if (common.json) {
        std::cout << to_json(report).dump(2) << '\n';
    } else {
        std::size_t width = 4;
        for (const auto &p : report.pos)
            width = std::max(width, p.po_name.size());
        std::cout << std::left << std::setw(static_cast<int>(width)) << "name" << "  " << std::right << std::setw(6)
                  << "|S|" << "  result\n";
        for (const auto &p : report.pos) {
            std::cout << std::left << std::setw(static_cast<int>(width)) << p.po_name << "  " << std::right
                      << std::setw(6) << p.lemma.hypotheses.size() << "  ";
            if (p.error)
                std::cout << "error at command " << p.error->command_index + 1 << " (" << p.error->command
                          << "): " << p.error->message;
            else if (p.proof)
                std::cout << (p.proof->overall_valid ? "valid" : "not proved") << "  " << verdict_list(*p.proof);
            else
                std::cout << "not attempted";
            for (const auto &s : p.skipped)
                std::cout << "\n" << std::string(width + 10, ' ') << "skipped " << s.command << ": " << s.message;
            std::cout << '\n';
        }
        std::size_t valid = 0;
        for (const auto &p : report.pos)
            valid += p.valid() ? 1 : 0;
        std::cout << valid << " of " << report.pos.size() << " proof obligations valid\n";
    }
    return report.all_valid() ? kExitOk : kExitNotProved;
}

int cmd_generate(const Common &common, const SyntheticParams &params, const std::string &out_path)
{
    PogFile pog = generate_synthetic(params);
    save_pog(pog, out_path);
    std::size_t hyps = 0;
    for (const auto &po : pog.pos)
        hyps += po.hypotheses.size();
    if (common.json)
        std::cout << nlohmann::json{{"path", out_path}, {"pos", pog.pos.size()}, {"hypotheses", hyps},
                                    {"seed", params.seed}}
                         .dump()
                  << '\n';
    else
        std::cout << "wrote " << out_path << ": " << pog.pos.size() << " proof obligations, " << hyps
                  << " hypotheses (seed " << params.seed << ")\n";
    return kExitOk;
}

int cmd_provers_list(const Common &common)
{
    auto registry = discover_provers(registry_path(common));
    if (common.json) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto &p : registry)
            out.push_back(to_json(p));
        std::cout << out.dump(2) << '\n';
        return kExitOk;
    }
    for (const auto &p : registry) {
        std::cout << (p.enabled ? "  " : "- ") << p.name;
        if (!p.is_builtin())
            std::cout << "  timeout " << p.timeout_s << "s  " << p.command_template;
        if (!p.note.empty())
            std::cout << "  (" << p.note << ")";
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_provers_check(const Common &common)
{
    auto registry = discover_provers(registry_path(common));
    Lemma probe;
    probe.hypotheses.push_back(
        {"h1", OriginTag::Local, parse_formula("x : NAT & x > 0"), std::nullopt});
    probe.goal = parse_formula("x > 0");
    PortfolioResult r = run_portfolio(probe, registry);
    bool all_valid = true;
    for (const auto &run : r.runs)
        all_valid = all_valid && run.verdict.kind == VerdictKind::Valid;
    if (common.json) {
        std::cout << to_json(r).dump(2) << '\n';
    } else {
        for (const auto &run : r.runs)
            std::cout << run.prover << ": " << to_string(run.verdict.kind) << " " << std::fixed
                      << std::setprecision(3) << run.verdict.elapsed_s << "s"
                      << (run.verdict.message.empty() ? "" : "  " + run.verdict.message) << '\n';
    }
    return all_valid ? kExitOk : kExitNotProved;
}

int cmd_serve(const Common &common, const std::string &pog_path, const std::string &bind, const std::string &ui)
{
    auto pog = std::make_shared<const PogFile>(load_pog(pog_path));
    auto colon = bind.rfind(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--bind", "expected host:port");
    std::string host = bind.substr(0, colon);
    int port = std::stoi(bind.substr(colon + 1));
    ServiceOptions opts;
    opts.static_dir = ui;
    Service service(pog, discover_provers(registry_path(common)), opts);
    std::cerr << "serving " << pog->component_name << " on http://" << bind << '\n';
    service.listen(host, port);
    return kExitOk;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Hypothesis selection for B proof obligations"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--registry", common.registry, "Prover registry file (default: $HYPSEL_REGISTRY)");
    app.add_flag("--json", common.json, "Print reports as JSON");

    std::string pog_path;
    auto *repl = app.add_subcommand("repl", "Interactive session over a pog file");
    repl->add_option("pog", pog_path, "Proof obligation file")->required();

    ReplayArgs ra;
    auto *replay_cmd = app.add_subcommand("replay", "Apply a script to selected proof obligations");
    replay_cmd->add_option("pog", ra.pog, "Proof obligation file")->required();
    replay_cmd->add_option("script", ra.script, "Script file (.iapa)")->required();
    replay_cmd->add_option("--pos", ra.selector, "Selector: all, 3, 0-4, group:operations, name glob");
    replay_cmd->add_flag("--keep-going", ra.keep_going, "Skip failing commands instead of stopping");
    replay_cmd->add_flag("--prove", ra.prove, "Run the provers on each final lemma");
    replay_cmd->add_flag("--stop-on-valid", ra.stop_on_valid, "Cancel remaining provers after a valid verdict");

    SyntheticParams params;
    std::string out_path;
    auto *gen = app.add_subcommand("generate", "Write a synthetic pog file");
    gen->add_option("--pos", params.n_pos, "Number of proof obligations")->required()->check(CLI::PositiveNumber);
    gen->add_option("--hyps", params.n_hyps, "Hypotheses per obligation")->required()->check(CLI::PositiveNumber);
    gen->add_option("--relevant", params.relevant_fraction, "Fraction of planted hypotheses")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", params.seed, "Random seed");
    gen->add_option("-o,--output", out_path, "Output file")->required();

    auto *provers = app.add_subcommand("provers", "Inspect the prover registry");
    provers->require_subcommand(1);
    auto *plist = provers->add_subcommand("list", "Show configured provers");
    auto *pcheck = provers->add_subcommand("check", "Run every enabled prover on a trivial lemma");

    std::string bind = "127.0.0.1:8080";
    std::string ui;
    auto *serve = app.add_subcommand("serve", "Serve sessions over HTTP");
    serve->add_option("pog", pog_path, "Proof obligation file")->required();
    serve->add_option("--bind", bind, "host:port");
    serve->add_option("--ui", ui, "Directory of static UI assets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (repl->parsed())
            return cmd_repl(common, pog_path);
        if (replay_cmd->parsed())
            return cmd_replay(common, ra);
        if (gen->parsed())
            return cmd_generate(common, params, out_path);
        if (plist->parsed())
            return cmd_provers_list(common);
        if (pcheck->parsed())
            return cmd_provers_check(common);
        if (serve->parsed())
            return cmd_serve(common, pog_path, bind, ui);
    } catch (const std::exception &e) {
        std::cerr << "hypsel: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
