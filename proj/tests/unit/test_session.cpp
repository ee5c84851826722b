#include "hypsel/session.hpp"

#include "compare.hpp"

#include <doctest.h>

using namespace hypsel;

namespace {

const std::string kDemo = std::string(HYPSEL_SAMPLES_DIR) + "/demo.pog";

ProofObligation small_po()
{
    ProofObligation po;
    po.name = "small";
    po.hypotheses = {
        {"h1", OriginTag::Properties, parse_formula("c : NAT"), {}},
        {"h2", OriginTag::Local, parse_formula("x = c + 1"), {}},
        {"h3", OriginTag::Invariants, parse_formula("d = 9"), {}},
    };
    po.goal = parse_formula("x > 0");
    return po;
}

std::vector<std::string> selected(const Session &s) { return s.ids_of(s.state().selected); }

} // namespace

TEST_CASE("initial state")
{
    PogFile demo = load_pog(kDemo);
    Session s = Session::open(demo, 0);
    CHECK(s.state().current_context == "local");
    CHECK(s.state().current_lexicon == "goal");
    CHECK(s.state().selected.empty());
    CHECK(s.state().log.empty());
    CHECK(s.state().lexicons.size() == 1);
    CHECK_THROWS_AS(Session::open(demo, 12), std::out_of_range);

    ProofObligation empty;
    empty.name = "e";
    Session e(empty);
    CHECK(e.find_context("all")->members.empty());
    CHECK_NOTHROW(e.check_invariants());
    CHECK(e.ah().ok);
    CHECK_FALSE(e.mklex().ok);
}

TEST_CASE("ah and dh")
{
    Session s(small_po());
    CHECK(s.ah().ok);
    CHECK(selected(s) == std::vector<std::string>{"h2"});
    CHECK(s.ah().ok);
    CHECK(selected(s) == std::vector<std::string>{"h2"});
    CHECK(s.chctx("all").ok);
    CHECK(s.ah().ok);
    CHECK(selected(s).size() == 3);
    CHECK(s.chctx("invariants").ok);
    CHECK(s.dh().ok);
    CHECK(selected(s) == std::vector<std::string>{"h1", "h2"});
    CHECK(s.chctx("all").ok);
    CHECK(s.dh().ok);
    CHECK(selected(s).empty());
}

TEST_CASE("chctx and chlex conditions")
{
    Session s(small_po());
    SessionState before = s.state();
    Outcome o = s.chctx("bogus");
    CHECK_FALSE(o.ok);
    CHECK(o.message.find("bogus") != std::string::npos);
    CHECK(s.state() == before);
    CHECK_FALSE(s.chlex("missing").ok);
    CHECK(s.state() == before);
    CHECK(s.chlex("goal").ok);
    CHECK(s.state().current_lexicon == "goal");
}

TEST_CASE("mklex")
{
    Session s(small_po());
    Outcome o = s.mklex();
    REQUIRE(o.ok);
    const Lexicon *lex = s.find_lexicon("lex_1");
    REQUIRE(lex);
    CHECK(lex->ids == IdentSet{"c", "x"});
    CHECK(s.state().current_lexicon == "lex_1");
    CHECK(s.chlex("lex_1").ok);

    CHECK(s.mklex({"x"}).ok);
    CHECK(s.find_lexicon("lex_2")->ids == IdentSet{"x"});
    SessionState before = s.state();
    Outcome bad = s.mklex({"c"});
    CHECK_FALSE(bad.ok);
    CHECK(bad.message.find("'c'") != std::string::npos);
    CHECK(s.state() == before);

    ProofObligation closed;
    closed.name = "closed";
    closed.hypotheses = {{"h1", OriginTag::Local, parse_formula("1 = 1"), {}}};
    Session t(closed);
    CHECK_FALSE(t.mklex().ok);
}

TEST_CASE("mklex(ids) from the goal lexicon")
{
    ProofObligation po = small_po();
    po.goal = parse_formula("x = c + 1");
    Session s(po);
    CHECK(s.mklex({"x"}).ok);
    CHECK(s.find_lexicon("lex_1")->ids == IdentSet{"x"});
    CHECK(s.chlex("goal").ok);
    CHECK_FALSE(s.mklex({"z"}).ok);
    CHECK(s.mklex({"x", "c"}).ok);
    CHECK(s.find_lexicon("lex_2")->ids == s.find_lexicon("goal")->ids);
}

TEST_CASE("mkctx(Some) and mkctx(All)")
{
    Session s(small_po());
    CHECK(s.mklex({"x"}).ok);
    CHECK(s.chctx("all").ok);
    CHECK(s.mkctx_some().ok);
    CHECK(s.ids_of(s.find_context("ctx_1")->members) == std::vector<std::string>{"h2"});
    CHECK(s.state().current_context == "ctx_1");

    Session t(small_po());
    CHECK(t.chctx("all").ok);
    CHECK(t.mklex({"x", "c"}).ok == false); // goal lexicon is {x}
    CHECK(t.chctx("local").ok);
    CHECK(t.mklex().ok); // {x, c}
    CHECK(t.mkctx_all().ok);
    CHECK(t.ids_of(t.current_context().members) == std::vector<std::string>{"h2"});

    Session u(small_po());
    CHECK(u.chctx("invariants").ok);
    SessionState before = u.state();
    CHECK_FALSE(u.mkctx_some().ok); // d = 9 shares nothing with {x}
    CHECK_FALSE(u.mkctx_all().ok);
    CHECK(u.state() == before);
}

TEST_CASE("mkctx(All) with an empty lexicon copies the context")
{
    ProofObligation po = small_po();
    po.goal = parse_formula("true");
    Session s(po);
    CHECK(s.chctx("all").ok);
    CHECK_FALSE(s.mkctx_some().ok);
    CHECK(s.mkctx_all().ok);
    CHECK(s.current_context().members == s.find_context("all")->members);
}

TEST_CASE("mkctx(ids)")
{
    Session s(small_po());
    CHECK(s.mkctx({"h2"}).ok);
    CHECK(s.ids_of(s.current_context().members) == std::vector<std::string>{"h2"});
    CHECK(s.chctx("local").ok);
    Outcome o = s.mkctx({"h1"});
    CHECK_FALSE(o.ok);
    CHECK(o.message.find("h1") != std::string::npos);
    CHECK(s.mkctx({"h2"}).ok);
    CHECK(s.state().contexts.back().name == "ctx_2");
}

TEST_CASE("names and aliases")
{
    Session s(small_po());
    CHECK(s.execute({CommandKind::MakeContextIds, {"h2"}, std::string("ctx_2")}).ok);
    CHECK(s.chctx("local").ok);
    CHECK(s.mkctx({"h2"}).ok);
    CHECK(s.state().contexts.back().name == "ctx_1");
    CHECK(s.chctx("local").ok);
    CHECK(s.mkctx({"h2"}).ok);
    CHECK(s.state().contexts.back().name == "ctx_3");
    CHECK_FALSE(s.execute({CommandKind::MakeContextIds, {"h2"}, std::string("all")}).ok);
    CHECK_FALSE(s.execute({CommandKind::MakeLexicon, {}, std::string("goal")}).ok);
    CHECK(s.execute({CommandKind::MakeLexicon, {}, std::string("mine")}).ok);
    CHECK(s.state().current_lexicon == "mine");
    // a failed auto-named creation does not consume a number
    CHECK(s.chctx("invariants").ok);
    CHECK_FALSE(s.mkctx_some().ok);
    CHECK(s.mkctx({"h3"}).ok);
    CHECK(s.state().contexts.back().name == "ctx_4");
}

TEST_CASE("navigation and prove commands are not session commands")
{
    Session s(small_po());
    CHECK_FALSE(s.execute({CommandKind::Next, {}, {}}).ok);
    CHECK_FALSE(s.execute({CommandKind::Prove, {}, {}}).ok);
    CHECK(s.state().log.empty());
}

TEST_CASE("lemma keeps file order")
{
    Session s(small_po());
    CHECK(s.chctx("invariants").ok);
    CHECK(s.ah().ok);
    CHECK(s.chctx("properties").ok);
    CHECK(s.ah().ok);
    Lemma l = s.current_lemma();
    REQUIRE(l.hypotheses.size() == 2);
    CHECK(l.hypotheses[0].id == "h1");
    CHECK(l.hypotheses[1].id == "h3");
    CHECK(print_formula(l.goal) == "x > 0");
}

TEST_CASE("example scripts on the demo corpus")
{
    PogFile demo = load_pog(kDemo);
    for (std::size_t i = 0; i < demo.pos.size(); ++i) {
        const auto &po = demo.pos[i];
        CAPTURE(po.name);
        Session r1 = Session::open(demo, i);
        for (const auto &c : parse_script("ah").commands)
            CHECK(r1.execute(c).ok);
        for (const auto &h : r1.current_lemma().hypotheses)
            CHECK(h.origin == OriginTag::Local);

        Session r2 = Session::open(demo, i);
        for (const auto &c : parse_script("chctx(all) & ah").commands)
            CHECK(r2.execute(c).ok);
        CHECK(r2.current_lemma().hypotheses == po.hypotheses);
        CHECK(r2.current_lemma().goal == po.goal);

        Session r3 = Session::open(demo, i);
        bool ok = true;
        for (const auto &c : parse_script("mklex & chctx(all) & mkctx(Some) & ah").commands)
            ok = ok && r3.execute(c).ok;
        auto expected = oracle::shared_ident_filter(po);
        bool has_local_ids = !expected.empty();
        CHECK(ok == has_local_ids);
        if (ok)
            CHECK(oracle::id_set(r3, r3.state().selected) == expected);
    }
}

TEST_CASE("selection commands agree with the reference model")
{
    oracle::Rng rng(1234);
    for (int k = 0; k < 9; ++k)
        for (int i = 0; i < 100; ++i) {
            std::string d = oracle::table1_case(rng, static_cast<CommandKind>(k));
            REQUIRE_MESSAGE(d.empty(), d);
        }
}

TEST_CASE("replaying the log reproduces the state")
{
    oracle::Rng rng(8);
    for (int i = 0; i < 100; ++i) {
        ProofObligation po = oracle::random_po(rng, 1 + oracle::pick(rng, 12));
        Session s(po);
        oracle::RefModel m(po);
        for (int k = 0; k < 15; ++k) {
            Command c = oracle::random_command(rng, m, po);
            if (s.execute(c).ok)
                m.apply(c);
        }
        Session r(po);
        for (const auto &c : parse_script(format_script(s.state().log)).commands)
            REQUIRE(r.execute(c).ok);
        CHECK(r.state() == s.state());
    }
}

TEST_CASE("mkctx(All) is contained in mkctx(Some)")
{
    oracle::Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        ProofObligation po = oracle::random_po(rng, 1 + oracle::pick(rng, 12));
        Session s(po);
        CHECK(s.chctx("all").ok);
        Session a = s, b = s;
        if (s.current_lexicon().ids.empty())
            continue;
        bool some = a.mkctx_some().ok, all = b.mkctx_all().ok;
        if (all) {
            REQUIRE(some);
            CHECK(b.current_context().members.subset_of(a.current_context().members));
        }
    }
}

TEST_CASE("workbench navigation")
{
    auto demo = std::make_shared<const PogFile>(load_pog(kDemo));
    Workbench wb(demo);
    CHECK(wb.cursor() == 0);
    CHECK(wb.execute(parse_script("chctx(all) & ah").commands[0]).ok);
    CHECK(wb.next().ok);
    CHECK(wb.cursor() == 1);
    CHECK(wb.session().state().selected.empty());
    REQUIRE(wb.archive().size() == 1);
    CHECK(wb.archive()[0].first == demo->pos[0].name);
    CHECK(wb.archive()[0].second.size() == 1);
    CHECK(wb.prev().ok);
    CHECK(wb.cursor() == 0);
    CHECK(wb.session().state().current_context == "local");
    CHECK(wb.session().state().log.empty());

    Outcome at_start = wb.prev();
    CHECK(at_start.ok);
    CHECK(wb.cursor() == 0);
    CHECK(wb.jump(11).ok);
    std::size_t before = wb.messages().size();
    CHECK(wb.next().ok);
    CHECK(wb.cursor() == 11);
    CHECK(wb.messages().size() == before + 1);
    CHECK_FALSE(wb.jump(12).ok);
}

TEST_CASE("workbench prove goes through the hook")
{
    auto demo = std::make_shared<const PogFile>(load_pog(kDemo));
    Workbench wb(demo);
    CHECK_FALSE(wb.prove().ok);
    std::size_t seen = 0;
    wb.set_prove_hook([&](const Lemma &l, const ProofObligation &) {
        seen = l.hypotheses.size();
        return ProveReport{true, "overall: valid"};
    });
    CHECK(wb.execute(parse_script("chctx(all)").commands[0]).ok);
    CHECK(wb.execute(parse_script("ah").commands[0]).ok);
    CHECK(wb.execute(parse_script("pr").commands[0]).ok);
    CHECK(seen == demo->pos[0].hypotheses.size());
    CHECK(wb.proved(demo->pos[0].name));
    CHECK(wb.session().state().log.back().kind == CommandKind::Prove);
    CHECK(wb.messages().back().text == "overall: valid");
}
