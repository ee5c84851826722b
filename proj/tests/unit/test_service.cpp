#include "hypsel/service.hpp"
#include "hypsel/views.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace hypsel;
using nlohmann::json;

namespace {

const std::string kDemo = std::string(HYPSEL_SAMPLES_DIR) + "/demo.pog";

struct Fixture {
    std::shared_ptr<const PogFile> pog = std::make_shared<const PogFile>(load_pog(kDemo));
    Service service{pog, {builtin_config()}};
    int port = service.start("127.0.0.1", 0);
    httplib::Client client{"127.0.0.1", port};

    json post(const std::string &path, const json &body, int expect_status)
    {
        auto res = client.Post(path, body.dump(), "application/json");
        REQUIRE(res);
        CHECK_MESSAGE(res->status == expect_status, res->body);
        return json::parse(res->body);
    }

    json get(const std::string &path, int expect_status = 200)
    {
        auto res = client.Get(path);
        REQUIRE(res);
        CHECK_MESSAGE(res->status == expect_status, res->body);
        return json::parse(res->body);
    }

    std::string open(json po = 0)
    {
        return post("/sessions", {{"po", po}}, 201)["id"].get<std::string>();
    }
};

} // namespace

TEST_CASE("listing and opening")
{
    Fixture f;
    json pos = f.get("/pos");
    REQUIRE(pos.size() == 12);
    CHECK(pos[0]["name"] == "Lift.move_up.1");
    CHECK(pos[11]["group"] == "well_definedness");
    CHECK(pos[0]["proved"] == false);

    json h = f.post("/sessions", {{"po", "Lift.move_up.2"}}, 201);
    CHECK(h["po"] == "Lift.move_up.2");
    CHECK(h["revision"] == 0);
    json view = f.get("/sessions/" + h["id"].get<std::string>());
    CHECK(view["state"]["current_context"] == "local");
    CHECK(view["state"]["current_lexicon"] == "goal");
    CHECK(view["state"]["selected"].empty());
    CHECK(view["state"]["goal"] == "min_floor <= floor + 1");

    f.post("/sessions", {{"po", "nope"}}, 404);
    f.post("/sessions", {{"po", 99}}, 404);
    f.post("/sessions", {{"po", true}}, 400);
    f.get("/sessions/0123abcd", 404);
    auto res = f.client.Post("/sessions", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
}

TEST_CASE("commands through the wire")
{
    Fixture f;
    std::string id = f.open(1);
    std::string path = "/sessions/" + id + "/command";

    json r = f.post(path, {{"text", "ah"}, {"revision", 0}}, 200);
    CHECK(r["revision"] == 1);
    CHECK(r["state"]["selected"] == json::array({"h12", "h13"}));
    CHECK(r["state"]["script"] == json::array({"ah"}));

    std::size_t msgs = r["state"]["messages"].size();
    json bad = f.post(path, {{"text", "chctx(bogus)"}, {"revision", 1}}, 200);
    CHECK(bad["revision"] == 1);
    REQUIRE(bad["state"]["messages"].size() == msgs + 1);
    CHECK(bad["state"]["messages"].back()["level"] == "error");

    json parse_err = f.post(path, {{"text", "chctx("}, {"revision", 1}}, 200);
    CHECK(parse_err["revision"] == 1);
    CHECK(parse_err["state"]["messages"].back()["level"] == "error");

    json stale = f.post(path, {{"text", "dh"}, {"revision", 0}}, 409);
    CHECK(stale["revision"] == 1);

    json two = f.post(path, {{"text", "chctx(all) & ah"}, {"revision", 1}}, 200);
    CHECK(two["revision"] == 3);
    CHECK(two["state"]["selected"].size() == 13);

    f.post(path, {{"revision", 3}}, 400);
    f.post(path, {{"text", "ah"}, {"revision", -1}}, 400);
    f.post("/sessions/ffff/command", {{"text", "ah"}}, 404);
}

TEST_CASE("proving through the wire")
{
    Fixture f;
    std::string id = f.open("Lift.open_door.1");
    f.post("/sessions/" + id + "/command", {{"text", "ah"}, {"revision", 0}}, 200);
    json r = f.post("/sessions/" + id + "/prove", {{"stop_on_valid", true}}, 200);
    CHECK(r["overall"] == "valid");
    CHECK(r["provers"][0]["prover"] == "builtin");
    CHECK(r["revision"] == 2);
    json pos = f.get("/pos");
    CHECK(pos[4]["proved"] == true);
    json view = f.get("/sessions/" + id);
    CHECK(view["state"]["proved"] == true);
    CHECK(view["state"]["script"].back() == "pr");
    f.post("/sessions/" + id + "/prove", {{"stop_on_valid", "yes"}}, 400);
}

TEST_CASE("provers and replay endpoints")
{
    Fixture f;
    json p = f.get("/provers");
    REQUIRE(p.size() == 1);
    CHECK(p[0]["name"] == "builtin");

    json r = f.post("/replay", {{"script", "chctx(all) & ah"}, {"selector", "group:initialization"}}, 200);
    REQUIRE(r["pos"].size() == 2);
    CHECK(r["pos"][0]["lemma_size"] == 7);
    json kg = f.post("/replay", {{"script", "chctx(x) & ah"}, {"selector", "0"}, {"mode", "keep_going"}}, 200);
    CHECK(kg["pos"][0]["skipped"].size() == 1);
    f.post("/replay", {{"script", "ah"}, {"selector", "zzz"}}, 404);
    f.post("/replay", {{"script", "ah("}}, 400);
    f.post("/replay", {{"script", "ah"}, {"mode", "sometimes"}}, 400);
}

TEST_CASE("racing writers with the same revision")
{
    Fixture f;
    std::string id = f.open(0);
    for (int round = 0; round < 10; ++round) {
        int revision = f.get("/sessions/" + id)["revision"].get<int>();
        int status[2] = {0, 0};
        std::thread t[2];
        for (int k = 0; k < 2; ++k)
            t[k] = std::thread([&, k] {
                httplib::Client c("127.0.0.1", f.port);
                json body{{"text", k ? "chctx(all)" : "chctx(local)"}, {"revision", revision}};
                auto res = c.Post("/sessions/" + id + "/command", body.dump(), "application/json");
                status[k] = res ? res->status : -1;
            });
        t[0].join();
        t[1].join();
        CHECK(((status[0] == 200 && status[1] == 409) || (status[0] == 409 && status[1] == 200)));
        CHECK(f.get("/sessions/" + id)["revision"] == revision + 1);
    }
}

TEST_CASE("served state equals direct execution")
{
    Fixture f;
    oracle::Rng rng(2718);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t po = oracle::pick(rng, f.pog->pos.size());
        std::string id = f.open(static_cast<int>(po));
        Workbench direct(f.pog, po);
        oracle::RefModel m(f.pog->pos[po]);
        int revision = 0;
        for (int k = 0; k < 12; ++k) {
            Command c = oracle::random_command(rng, m, f.pog->pos[po]);
            m.apply(c);
            bool ok = direct.execute(c).ok;
            json r = f.post("/sessions/" + id + "/command", {{"text", format_command(c)}, {"revision", revision}}, 200);
            revision += ok ? 1 : 0;
            CHECK(r["revision"] == revision);
            REQUIRE(r["state"] == state_view(direct));
        }
    }
}
