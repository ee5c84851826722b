// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "hypsel/repl.hpp"
#include "hypsel/replay.hpp"

#include "compare.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace hypsel;
namespace fs = std::filesystem;

namespace {

// Pinned thresholds.
constexpr int kCasesPerCommand = 500;
constexpr double kCommandBudgetMs = 50.0;
constexpr double kSharedScriptBudgetMs = 500.0;
constexpr double kLoadBudgetS = 60.0;
constexpr double kRecallFloor = 0.95;
constexpr double kPortfolioGraceS = 1.0;

const std::string kDemo = std::string(HYPSEL_SAMPLES_DIR) + "/demo.pog";
const std::string kFixtures = HYPSEL_FIXTURES_DIR;
const std::string kSharedScript = "mklex & chctx(all) & mkctx(Some) & ah";

int failures = 0;

void report(const std::string &name, bool pass, const std::string &detail)
{
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    failures += pass ? 0 : 1;
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

std::set<std::string> ids(const std::vector<Hypothesis> &hs)
{
    std::set<std::string> out;
    for (const auto &h : hs)
        out.insert(h.id);
    return out;
}

void table1_suite()
{
    const CommandKind kinds[] = {CommandKind::AddHyps,         CommandKind::DropHyps,        CommandKind::ChangeContext,
                                 CommandKind::ChangeLexicon,   CommandKind::MakeLexicon,     CommandKind::MakeLexiconIds,
                                 CommandKind::MakeContextSome, CommandKind::MakeContextAll,  CommandKind::MakeContextIds};
    oracle::Rng rng(1001);
    int bad = 0;
    std::string first;
    for (CommandKind k : kinds)
        for (int i = 0; i < kCasesPerCommand; ++i)
            if (auto d = oracle::table1_case(rng, k); !d.empty()) {
                ++bad;
                if (first.empty())
                    first = d;
            }
    report("command semantics", bad == 0,
           std::to_string(9 * kCasesPerCommand - bad) + "/" + std::to_string(9 * kCasesPerCommand) +
               " randomized cases agree with the reference model" + (first.empty() ? "" : "; first: " + first));
}

void table2_suite()
{
    PogFile demo = load_pog(kDemo);
    int bad = 0;
    int aborted = 0;
    for (std::size_t i = 0; i < demo.pos.size(); ++i) {
        const auto &po = demo.pos[i];
        std::set<std::string> local;
        for (const auto &h : po.hypotheses)
            if (h.origin == OriginTag::Local)
                local.insert(h.id);

        PoReplay r1 = replay_one(parse_script("ah").commands, demo, i, {});
        PoReplay r2 = replay_one(parse_script("chctx(all) & ah").commands, demo, i, {});
        PoReplay r3 = replay_one(parse_script(kSharedScript).commands, demo, i, {});
        auto expected3 = oracle::shared_ident_filter(po);
        // Without local identifiers mklex fails its condition and the lemma stays empty.
        bool shared_aborts = r3.error && r3.error->command_index == 0 && expected3.empty();
        bool ok = !r1.error && !r2.error && (!r3.error || shared_aborts);
        ok = ok && ids(r1.lemma.hypotheses) == local && r1.lemma.goal == po.goal;
        ok = ok && r2.lemma.hypotheses == po.hypotheses && r2.lemma.goal == po.goal;
        ok = ok && ids(r3.lemma.hypotheses) == expected3;
        aborted += shared_aborts ? 1 : 0;
        bad += ok ? 0 : 1;
    }
    report("example scripts", bad == 0,
           std::to_string(demo.pos.size() - bad) + "/" + std::to_string(demo.pos.size()) +
               " demo obligations give the local, full and shared-identifier lemmas (shared checked by brute force; " + std::to_string(aborted) +
               " without local identifiers stop at mklex)");
}

void formula_suite()
{
    oracle::Rng rng(2002);
    oracle::FormulaGen gen;
    gen.max_depth = 8;
    int round_trip_bad = 0;
    int fv_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        Formula f = gen.gen(rng);
        std::string text = print_formula(f);
        Formula g = parse_formula(text);
        round_trip_bad += (g == f && print_formula(g) == text) ? 0 : 1;
        IdentSet fv = free_identifiers(f);
        fv_bad += std::set<std::string>(fv.begin(), fv.end()) == oracle::scan_free(text) ? 0 : 1;
    }
    struct BinderCase {
        const char *text;
        std::set<std::string> free;
    };
    const BinderCase binders[] = {
        {"!x.(x : S => x > y)", {"S", "y"}},
        {"#x, y.(x : A & y : B & x = z)", {"A", "B", "z"}},
        {"x > 0 & !x.(x : NAT => x >= 0)", {"x", "NAT"}},
        {"!x.(#y.(y = x & y /= w))", {"w"}},
        {"!x.(x : T) or x = 1", {"T", "x"}},
        {"f(x) = !y.(y : NAT => g(y) = x)", {"f", "x", "NAT", "g"}},
    };
    int binder_bad = 0;
    for (const auto &b : binders) {
        IdentSet fv = free_identifiers(parse_formula(b.text));
        binder_bad += std::set<std::string>(fv.begin(), fv.end()) == b.free ? 0 : 1;
    }
    report("parser and free identifiers", round_trip_bad == 0 && fv_bad == 0 && binder_bad == 0,
           "round-trip failures " + std::to_string(round_trip_bad) + "/1000, binder cases failed " +
               std::to_string(binder_bad) + "/" + std::to_string(std::size(binders)) +
               ", fv vs scope walker disagreements " + std::to_string(fv_bad) + "/1000");
}

void builtin_suite()
{
    oracle::Rng rng(3003);
    int disagreements = 0;
    int valid = 0;
    for (int i = 0; i < 1000; ++i) {
        std::size_t n_atoms = 1 + oracle::pick(rng, 10);
        Lemma l;
        for (std::size_t k = 0, n = oracle::pick(rng, 6); k < n; ++k)
            l.hypotheses.push_back({"h" + std::to_string(k + 1), OriginTag::Local, oracle::random_prop(rng, n_atoms, 4), {}});
        l.goal = oracle::random_prop(rng, n_atoms, 4);
        std::vector<Formula> hs;
        for (const auto &h : l.hypotheses)
            hs.push_back(h.formula);
        bool expected = oracle::truth_table_valid(hs, l.goal);
        bool got = builtin_prove(l, 2'000'000).kind == VerdictKind::Valid;
        disagreements += got == expected ? 0 : 1;
        valid += expected ? 1 : 0;
    }
    report("builtin prover vs truth tables", disagreements == 0,
           std::to_string(disagreements) + " disagreements on 1000 lemmas (" + std::to_string(valid) + " valid)");
}

void scale_suite()
{
    PogFile big = generate_synthetic({1, 4000, 0.01, 4000});
    auto index = std::make_shared<const PoIndex>(big.pos[0]);
    const auto &hyps = big.pos[0].hypotheses;
    std::vector<std::string> some_ids;
    for (std::size_t i = 0; i < hyps.size(); i += 7)
        some_ids.push_back(hyps[i].id);

    // Each command is timed from a state where it succeeds and does real work.
    const char *opening[] = {"ah", "chctx(all)", "ah", "dh", "ah", "mklex", "mkctx(Some)", "chctx(all)"};
    const char *closing[] = {"chctx(all)", "mkctx(All)", "chlex(goal)", "chctx(local)", "chlex(lex_1)"};
    const std::string anchor = *index->hyp_fv[0].begin();
    double worst = 0;
    std::string worst_cmd;
    bool all_ok = true;
    std::string failed;
    auto timed = [&](Session &s, const Command &c) {
        auto t = Clock::now();
        bool ok = s.execute(c).ok;
        double ms = ms_since(t);
        if (!ok && all_ok)
            failed = format_command(c).substr(0, 40);
        all_ok = all_ok && ok;
        if (ms > worst) {
            worst = ms;
            worst_cmd = format_command(c);
        }
    };
    for (int rep = 0; rep < 3; ++rep) {
        Session s(index);
        for (const char *text : opening)
            timed(s, parse_script(text).commands.at(0));
        timed(s, {CommandKind::MakeContextIds, some_ids, {}});
        std::vector<std::string> names = {anchor};
        for (const auto &id : s.current_lexicon().ids)
            if (names.size() < 500 && id != anchor)
                names.push_back(id);
        timed(s, {CommandKind::MakeLexiconIds, names, {}});
        timed(s, {CommandKind::MakeLexiconIds, {anchor}, {}});
        for (const char *text : closing)
            timed(s, parse_script(text).commands.at(0));
    }

    auto t = Clock::now();
    Script shared = parse_script(kSharedScript);
    Session s(big.pos[0]);
    bool shared_ok = true;
    for (const auto &c : shared.commands)
        shared_ok = shared_ok && s.execute(c).ok;
    double shared_ms = ms_since(t);

    fs::path file = fs::temp_directory_path() / "hypsel_acceptance_100x2000.pog";
    save_pog(generate_synthetic({100, 2000, 0.05, 77}), file);
    auto tl = Clock::now();
    PogFile loaded = load_pog(file);
    double load_s = ms_since(tl) / 1000.0;
    fs::remove(file);
    std::size_t loaded_hyps = 0;
    for (const auto &po : loaded.pos)
        loaded_hyps += po.hypotheses.size();

    char buf[256];
    std::snprintf(buf, sizeof buf, "slowest command %.2f ms (%s, limit %.0f), shared-identifier script %.1f ms (limit %.0f), load %.2f s (limit %.0f)",
                  worst, worst_cmd.c_str(), kCommandBudgetMs, shared_ms, kSharedScriptBudgetMs, load_s, kLoadBudgetS);
    std::string detail = buf;
    if (!all_ok)
        detail += "; command failed: " + failed;
    if (!shared_ok)
        detail += "; shared-identifier script failed";
    report("scale on 4000 hypotheses", all_ok && shared_ok && worst < kCommandBudgetMs && shared_ms < kSharedScriptBudgetMs &&
                                           load_s < kLoadBudgetS && loaded_hyps == 200000,
           detail);
}

void replay_suite()
{
    auto demo = std::make_shared<const PogFile>(load_pog(kDemo));
    oracle::Rng rng(5005);
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        std::ostringstream sink;
        Repl repl(demo, {builtin_config()}, sink);
        std::size_t po = oracle::pick(rng, demo->pos.size());
        for (std::size_t k = 0; k < po; ++k)
            repl.handle_line("ne");
        oracle::RefModel m(demo->pos[po]);
        for (std::size_t k = 0, n = 1 + oracle::pick(rng, 15); k < n; ++k) {
            Command c = oracle::random_command(rng, m, demo->pos[po]);
            m.apply(c);
            repl.handle_line(format_command(c));
        }
        const Session &live = repl.workbench().session();
        std::string extracted = format_script(live.state().log);
        ReplayReport r = replay(parse_script(extracted), *demo, std::to_string(po));
        bool same = r.pos.size() == 1 && !r.pos[0].error && r.pos[0].lemma == live.current_lemma();
        mismatches += same ? 0 : 1;
    }

    std::size_t planted = 0, recovered = 0, proved = 0, total = 0;
    double worst_seed = 1.0;
    Script shared = parse_script(kSharedScript + " & pr");
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        PogFile p = generate_synthetic({5, 200, 0.05, seed});
        ReplayReport r = replay(shared, p, "all");
        std::size_t seed_planted = 0, seed_recovered = 0;
        for (std::size_t i = 0; i < r.pos.size(); ++i) {
            std::set<std::string> got(r.pos[i].selected_ids.begin(), r.pos[i].selected_ids.end());
            for (const auto &id : *p.pos[i].planted) {
                ++seed_planted;
                seed_recovered += got.count(id);
            }
            proved += r.pos[i].valid() ? 1 : 0;
            ++total;
        }
        planted += seed_planted;
        recovered += seed_recovered;
        worst_seed = std::min(worst_seed, double(seed_recovered) / double(seed_planted));
    }
    double recall = double(recovered) / double(planted);

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%d/100 extracted scripts diverge on replay; recall %.4f (worst seed %.4f, floor %.2f), builtin "
                  "valid on %zu/%zu",
                  mismatches, recall, worst_seed, kRecallFloor, proved, total);
    report("replay determinism and recall", mismatches == 0 && worst_seed >= kRecallFloor && proved == total, buf);
}

ProverConfig fixture(const std::string &name, const std::string &script, double timeout)
{
    ProverConfig p;
    p.name = name;
    p.command_template = kFixtures + "/" + script + " {input}";
    p.timeout_s = timeout;
    p.valid_patterns = {"valid"};
    p.invalid_patterns = {"invalid"};
    return p;
}

void portfolio_suite()
{
    Lemma l;
    l.hypotheses.push_back({"h1", OriginTag::Local, parse_formula("x > 0"), {}});
    l.goal = parse_formula("x > 0");
    constexpr double timeout = 1.5;
    std::vector<ProverConfig> registry = {fixture("valid", "prover_valid.sh", timeout),
                                          fixture("slow", "prover_slow.sh", timeout),
                                          fixture("crash", "prover_crash.sh", timeout), builtin_config()};
    auto t = Clock::now();
    PortfolioResult r = run_portfolio(l, registry);
    double wall = ms_since(t) / 1000.0;
    std::map<std::string, VerdictKind> got;
    bool any_valid = false;
    for (const auto &run : r.runs) {
        got[run.prover] = run.verdict.kind;
        any_valid = any_valid || run.verdict.kind == VerdictKind::Valid;
    }
    bool classes = got["valid"] == VerdictKind::Valid && got["slow"] == VerdictKind::Timeout &&
                   got["crash"] == VerdictKind::Error && got["builtin"] == VerdictKind::Valid;

    Lemma refuted;
    refuted.hypotheses.push_back({"h1", OriginTag::Local, parse_formula("a or b"), {}});
    refuted.goal = parse_formula("a");
    PortfolioResult n = run_portfolio(refuted, {fixture("refute", "prover_refute.sh", timeout), builtin_config()});
    bool consistent = r.overall_valid == any_valid && !n.overall_valid;

    char buf[256];
    std::snprintf(buf, sizeof buf, "valid/timeout/error classified %s, wall %.2f s (limit %.1f s), overall %s",
                  classes ? "correctly" : "wrongly", wall, timeout + kPortfolioGraceS, consistent ? "consistent" : "inconsistent");
    report("prover portfolio", classes && consistent && wall <= timeout + kPortfolioGraceS, buf);
}

} // namespace

int main()
{
    table1_suite();
    table2_suite();
    formula_suite();
    builtin_suite();
    scale_suite();
    replay_suite();
    portfolio_suite();
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
