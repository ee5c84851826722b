#include "hypsel/pomodel.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

using namespace hypsel;

namespace {

const std::string kDemo = std::string(HYPSEL_SAMPLES_DIR) + "/demo.pog";

std::string wrap(const std::string &body) { return "<pog component=\"C\">\n" + body + "</pog>\n"; }

std::string load_error(const std::string &xml)
{
    try {
        parse_pog(xml);
    } catch (const PogError &e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("minimal file")
{
    PogFile p = parse_pog(wrap("<po name=\"op.1\" group=\"operations\">"
                               "<hyp id=\"h1\" origin=\"properties\" typing=\"c:NAT\">c : NAT</hyp>"
                               "<hyp id=\"h2\" origin=\"local\">x = c + 1</hyp>"
                               "<goal>x &gt; 0</goal></po>"));
    CHECK(p.component_name == "C");
    REQUIRE(p.pos.size() == 1);
    CHECK(p.pos[0].hypotheses.size() == 2);
    CHECK(p.pos[0].hypotheses[0].typing == std::optional<std::string>("c:NAT"));
    CHECK(print_formula(p.pos[0].goal) == "x > 0");
    CHECK_FALSE(p.pos[0].planted);
}

TEST_CASE("load errors name the culprit")
{
    CHECK(load_error(wrap("<po name=\"p\" group=\"operations\"><hyp id=\"h1\" origin=\"local\">a</hyp>"
                          "<hyp id=\"h1\" origin=\"local\">b</hyp><goal>a</goal></po>"))
              .find("h1") != std::string::npos);
    CHECK(load_error(wrap("<po name=\"p\" group=\"operations\"><hyp id=\"h1\" origin=\"weird\">a</hyp>"
                          "<goal>a</goal></po>"))
              .find("weird") != std::string::npos);
    CHECK(load_error(wrap("<po name=\"p\" group=\"operations\"><hyp id=\"h7\" origin=\"local\">a = </hyp>"
                          "<goal>a</goal></po>"))
              .find("h7") != std::string::npos);
    CHECK(load_error(wrap("<po name=\"p\" group=\"operations\"><goal>a</goal></po>"
                          "<po name=\"p\" group=\"operations\"><goal>a</goal></po>"))
              .find("p") != std::string::npos);
    CHECK_FALSE(load_error(wrap("<po name=\"p\" group=\"operations\"></po>")).empty());
    CHECK_FALSE(load_error(wrap("<po name=\"p\" group=\"misc\"><goal>a</goal></po>")).empty());
    CHECK_FALSE(load_error("<pog component=\"C\"><po").empty());
    CHECK_FALSE(load_error(wrap("<po name=\"p\" group=\"operations\"><goal>a</goal><planted ids=\"h9\"/></po>")).empty());
    CHECK_THROWS_AS(load_pog("/nonexistent/file.pog"), PogError);
}

TEST_CASE("demo corpus golden counts")
{
    PogFile p = load_pog(kDemo);
    CHECK(p.component_name == "Lift");
    REQUIRE(p.pos.size() == 12);
    std::map<std::string, int> groups;
    for (const auto &po : p.pos)
        ++groups[std::string(to_string(po.group))];
    CHECK(groups == std::map<std::string, int>{
                        {"operations", 8}, {"initialization", 2}, {"assertions", 1}, {"well_definedness", 1}});

    std::vector<std::string> names;
    for (const auto &c : predefined_contexts(p.pos[0]))
        names.push_back(c.name);
    CHECK(names == std::vector<std::string>{"all", "local", "global", "properties", "invariants"});
}

TEST_CASE("predefined contexts partition the hypotheses")
{
    PogFile p = load_pog(kDemo);
    for (const auto &po : p.pos) {
        auto ctxs = predefined_contexts(po);
        REQUIRE(ctxs.size() >= 3);
        const auto &all = ctxs[0].members, &local = ctxs[1].members, &global = ctxs[2].members;
        CHECK(all.size() == po.hypotheses.size());
        CHECK(local.united(global) == all);
        CHECK(local.intersected(global).empty());
        std::map<OriginTag, std::size_t> counts;
        for (const auto &h : po.hypotheses)
            ++counts[h.origin];
        for (std::size_t i = 3; i < ctxs.size(); ++i) {
            auto tag = parse_origin(ctxs[i].name);
            REQUIRE(tag);
            CHECK(ctxs[i].members.size() == counts[*tag]);
            CHECK(ctxs[i].members.subset_of(all));
        }
        std::size_t tagged = 0;
        for (const auto &[tag, n] : counts)
            tagged += tag == OriginTag::Local ? 0 : 1;
        CHECK(ctxs.size() == 3 + tagged);
    }
}

TEST_CASE("predefined contexts by brute-force partition")
{
    ProofObligation po;
    po.name = "p";
    for (int i = 0; i < 3; ++i)
        po.hypotheses.push_back({"p" + std::to_string(i), OriginTag::Properties, parse_formula("a = 1"), {}});
    for (int i = 0; i < 2; ++i)
        po.hypotheses.push_back({"l" + std::to_string(i), OriginTag::Local, parse_formula("b = 1"), {}});
    auto ctxs = predefined_contexts(po);
    REQUIRE(ctxs.size() == 4);
    CHECK(ctxs[0].members.size() == 5);
    CHECK(ctxs[1].members.size() == 2);
    CHECK(ctxs[2].members.size() == 3);
    CHECK(ctxs[3].name == "properties");
    CHECK(ctxs[3].members.size() == 3);

    ProofObligation empty;
    empty.name = "e";
    auto e = predefined_contexts(empty);
    REQUIRE(e.size() == 3);
    CHECK(e[0].members.empty());
}

TEST_CASE("goal lexicon")
{
    ProofObligation po;
    po.goal = parse_formula("x = c + 1");
    CHECK(goal_lexicon(po).ids == IdentSet{"c", "x"});
    CHECK(goal_lexicon(po).name == "goal");
    po.goal = parse_formula("true");
    CHECK(goal_lexicon(po).ids.empty());
    po.goal = parse_formula("!x.(x : S)");
    CHECK(goal_lexicon(po).ids == IdentSet{"S"});
}

TEST_CASE("write then parse is the identity")
{
    PogFile demo = load_pog(kDemo);
    CHECK(parse_pog(write_pog(demo)) == demo);
    CHECK(write_pog(parse_pog(write_pog(demo))) == write_pog(demo));

    PogFile empty{"EMPTY", {}};
    CHECK(parse_pog(write_pog(empty)) == empty);

    auto path = std::filesystem::temp_directory_path() / "hypsel_roundtrip.pog";
    save_pog(demo, path);
    CHECK(load_pog(path) == demo);
    std::filesystem::remove(path);
}

TEST_CASE("1000 synthetic obligations round-trip")
{
    PogFile p = generate_synthetic({1000, 12, 0.25, 99});
    REQUIRE(p.pos.size() == 1000);
    CHECK(parse_pog(write_pog(p)) == p);
}

TEST_CASE("random obligations round-trip")
{
    oracle::Rng rng(3);
    PogFile p{"R", {}};
    for (int i = 0; i < 50; ++i)
        p.pos.push_back(oracle::random_po(rng, oracle::pick(rng, 15), "r." + std::to_string(i)));
    CHECK(parse_pog(write_pog(p)) == p);
}

TEST_CASE("synthetic generation")
{
    SUBCASE("deterministic in the seed")
    {
        CHECK(write_pog(generate_synthetic({1, 10, 0.2, 42})) == write_pog(generate_synthetic({1, 10, 0.2, 42})));
        CHECK(write_pog(generate_synthetic({1, 10, 0.2, 42})) != write_pog(generate_synthetic({1, 10, 0.2, 43})));
    }
    SUBCASE("scale")
    {
        PogFile p = generate_synthetic({1, 4000, 0.01, 7});
        REQUIRE(p.pos.size() == 1);
        CHECK(p.pos[0].hypotheses.size() == 4000);
        REQUIRE(p.pos[0].planted);
        CHECK(p.pos[0].planted->size() == 40);
    }
    SUBCASE("planted subset shares identifiers with the goal")
    {
        PogFile p = generate_synthetic({20, 50, 0.1, 1});
        for (const auto &po : p.pos) {
            REQUIRE(po.planted);
            CHECK(po.planted->size() == 5);
            IdentSet goal_ids = free_identifiers(po.goal);
            for (const auto &pid : *po.planted) {
                auto i = po.find(pid);
                REQUIRE(i);
                IdentSet f = free_identifiers(po.hypotheses[*i].formula);
                bool shares = std::any_of(f.begin(), f.end(), [&](const auto &x) { return goal_ids.count(x); });
                CHECK(shares);
            }
        }
    }
    SUBCASE("bad parameters")
    {
        CHECK_THROWS_AS(generate_synthetic({0, 10, 0.1, 1}), std::invalid_argument);
        CHECK_THROWS_AS(generate_synthetic({1, 0, 0.1, 1}), std::invalid_argument);
        CHECK_THROWS_AS(generate_synthetic({1, 10, 0.0, 1}), std::invalid_argument);
        CHECK_THROWS_AS(generate_synthetic({1, 10, 1.5, 1}), std::invalid_argument);
    }
}

TEST_CASE("HypSet algebra")
{
    HypSet a({1, 3, 5}), b({3, 4});
    CHECK(a.united(b) == HypSet({1, 3, 4, 5}));
    CHECK(a.minus(b) == HypSet({1, 5}));
    CHECK(a.intersected(b) == HypSet({3}));
    CHECK(HypSet({3}).subset_of(a));
    CHECK_FALSE(b.subset_of(a));
    CHECK(HypSet({5, 1, 1}) == HypSet({1, 5}));
    CHECK(HypSet::range(3) == HypSet({0, 1, 2}));
}
