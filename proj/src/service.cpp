#include "hypsel/service.hpp"

#include "hypsel/replay.hpp"
#include "hypsel/session.hpp"
#include "hypsel/views.hpp"

#include <httplib.h>
#include <json.hpp>

#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

namespace hypsel {

using nlohmann::json;

namespace {

struct SessionSlot {
    std::string id;
    std::mutex mutex;
    Workbench wb;
    std::uint64_t revision = 0;

    SessionSlot(std::string id_, std::shared_ptr<const PogFile> pog, std::size_t index)
        : id(std::move(id_)), wb(std::move(pog), index)
    {
    }
};

void send_json(httplib::Response &res, int status, const json &body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, int status, const std::string &message)
{
    send_json(res, status, json{{"error", message}});
}

std::optional<json> parse_body(const httplib::Request &req, httplib::Response &res)
{
    if (req.body.empty())
        return json::object();
    try {
        json j = json::parse(req.body);
        if (!j.is_object()) {
            send_error(res, 400, "request body must be a JSON object");
            return std::nullopt;
        }
        return j;
    } catch (const json::parse_error &e) {
        send_error(res, 400, std::string("malformed JSON: ") + e.what());
        return std::nullopt;
    }
}

} // namespace

struct Service::Impl {
    std::shared_ptr<const PogFile> pog;
    std::vector<ProverConfig> registry;
    ServiceOptions options;
    httplib::Server server;
    std::thread thread;

    std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<SessionSlot>> sessions;
    std::mt19937_64 rng{std::random_device{}()};

    std::mutex proved_mutex;
    std::set<std::string> proved;

    Impl(std::shared_ptr<const PogFile> p, std::vector<ProverConfig> r, ServiceOptions o)
        : pog(std::move(p)), registry(std::move(r)), options(std::move(o))
    {
        routes();
    }

    std::shared_ptr<SessionSlot> find(const std::string &id)
    {
        std::lock_guard lock(sessions_mutex);
        auto it = sessions.find(id);
        return it == sessions.end() ? nullptr : it->second;
    }

    bool is_proved(const std::string &name)
    {
        std::lock_guard lock(proved_mutex);
        return proved.count(name) != 0;
    }

    json session_json(const SessionSlot &s)
    {
        json view = state_view(s.wb);
        view["proved"] = view["proved"].get<bool>() || is_proved(s.wb.session().po().name);
        return {{"id", s.id}, {"po", s.wb.session().po().name}, {"revision", s.revision}, {"state", std::move(view)}};
    }

    void harvest_proved(const Workbench &wb)
    {
        std::lock_guard lock(proved_mutex);
        for (const auto &po : wb.pog().pos)
            if (wb.proved(po.name))
                proved.insert(po.name);
    }

    void install_hook(Workbench &wb, PortfolioOptions popts, std::optional<PortfolioResult> &sink)
    {
        wb.set_prove_hook([this, popts, &sink](const Lemma &lemma, const ProofObligation &) {
            try {
                sink = run_portfolio(lemma, registry, popts);
                return ProveReport{sink->overall_valid, summarize(*sink)};
            } catch (const std::exception &e) {
                return ProveReport{false, std::string("provers could not run: ") + e.what()};
            }
        });
    }

    void routes()
    {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server.Options(R"(.*)", [](const httplib::Request &, httplib::Response &res) { res.status = 204; });

        server.Get("/pos", [this](const httplib::Request &, httplib::Response &res) {
            json out = json::array();
            for (std::size_t i = 0; i < pog->pos.size(); ++i) {
                const auto &po = pog->pos[i];
                out.push_back({{"index", i},
                               {"name", po.name},
                               {"group", to_string(po.group)},
                               {"hypotheses", po.hypotheses.size()},
                               {"proved", is_proved(po.name)}});
            }
            send_json(res, 200, out);
        });

        server.Post("/sessions", [this](const httplib::Request &req, httplib::Response &res) {
            auto body = parse_body(req, res);
            if (!body)
                return;
            std::size_t index = 0;
            const json &po = (*body)["po"];
            if (po.is_number_unsigned()) {
                index = po.get<std::size_t>();
                if (index >= pog->pos.size())
                    return send_error(res, 404, "no proof obligation at index " + std::to_string(index));
            } else if (po.is_string()) {
                auto name = po.get<std::string>();
                auto it = std::find_if(pog->pos.begin(), pog->pos.end(),
                                       [&](const ProofObligation &p) { return p.name == name; });
                if (it == pog->pos.end())
                    return send_error(res, 404, "unknown proof obligation '" + name + "'");
                index = static_cast<std::size_t>(it - pog->pos.begin());
            } else if (!po.is_null()) {
                return send_error(res, 400, "'po' must be a name or an index");
            }
            std::shared_ptr<SessionSlot> slot;
            {
                std::lock_guard lock(sessions_mutex);
                std::string id;
                do {
                    char buf[17];
                    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
                    id = buf;
                } while (sessions.count(id));
                slot = std::make_shared<SessionSlot>(id, pog, index);
                sessions.emplace(id, slot);
            }
            std::lock_guard lock(slot->mutex);
            send_json(res, 201, json{{"id", slot->id}, {"po", slot->wb.session().po().name}, {"revision", 0}});
        });

        server.Get(R"(/sessions/([0-9a-f]+))", [this](const httplib::Request &req, httplib::Response &res) {
            auto slot = find(req.matches[1]);
            if (!slot)
                return send_error(res, 404, "unknown session");
            std::lock_guard lock(slot->mutex);
            send_json(res, 200, session_json(*slot));
        });

        server.Post(R"(/sessions/([0-9a-f]+)/command)", [this](const httplib::Request &req, httplib::Response &res) {
            auto slot = find(req.matches[1]);
            if (!slot)
                return send_error(res, 404, "unknown session");
            auto body = parse_body(req, res);
            if (!body)
                return;
            if (!(*body)["text"].is_string())
                return send_error(res, 400, "'text' must be a string");
            const json &rev = (*body)["revision"];
            if (!rev.is_null() && !rev.is_number_unsigned())
                return send_error(res, 400, "'revision' must be a non-negative integer");

            std::lock_guard lock(slot->mutex);
            if (!rev.is_null() && rev.get<std::uint64_t>() != slot->revision) {
                json err{{"error", "stale revision"}, {"revision", slot->revision}};
                return send_json(res, 409, err);
            }
            std::optional<PortfolioResult> proof;
            install_hook(slot->wb, options.portfolio, proof);
            try {
                Script script = parse_script((*body)["text"].get<std::string>());
                for (const auto &cmd : script.commands) {
                    if (!slot->wb.execute(cmd).ok)
                        break;
                    ++slot->revision;
                }
            } catch (const ScriptError &e) {
                slot->wb.note(MessageLevel::Error, e.what());
            }
            slot->wb.set_prove_hook({});
            harvest_proved(slot->wb);
            send_json(res, 200, session_json(*slot));
        });

        server.Post(R"(/sessions/([0-9a-f]+)/prove)", [this](const httplib::Request &req, httplib::Response &res) {
            auto slot = find(req.matches[1]);
            if (!slot)
                return send_error(res, 404, "unknown session");
            auto body = parse_body(req, res);
            if (!body)
                return;
            PortfolioOptions popts = options.portfolio;
            const json &sov = (*body)["stop_on_valid"];
            if (sov.is_boolean())
                popts.stop_on_valid = sov.get<bool>();
            else if (!sov.is_null())
                return send_error(res, 400, "'stop_on_valid' must be a boolean");

            std::lock_guard lock(slot->mutex);
            std::optional<PortfolioResult> proof;
            install_hook(slot->wb, popts, proof);
            slot->wb.prove();
            slot->wb.set_prove_hook({});
            ++slot->revision;
            harvest_proved(slot->wb);
            if (!proof)
                return send_error(res, 500, slot->wb.messages().back().text);
            json out = to_json(*proof);
            out["revision"] = slot->revision;
            send_json(res, 200, out);
        });

        server.Get("/provers", [this](const httplib::Request &, httplib::Response &res) {
            json out = json::array();
            for (const auto &p : registry)
                out.push_back(to_json(p));
            send_json(res, 200, out);
        });

        server.Post("/replay", [this](const httplib::Request &req, httplib::Response &res) {
            auto body = parse_body(req, res);
            if (!body)
                return;
            const json &text = (*body)["script"];
            if (!text.is_string())
                return send_error(res, 400, "'script' must be a string");
            std::string selector = "all";
            if ((*body)["selector"].is_string())
                selector = (*body)["selector"].get<std::string>();
            ReplayOptions ro;
            ro.registry = registry;
            ro.portfolio = options.portfolio;
            std::string mode = (*body)["mode"].is_string() ? (*body)["mode"].get<std::string>() : "abort";
            if (mode == "keep_going")
                ro.mode = ReplayMode::KeepGoing;
            else if (mode != "abort")
                return send_error(res, 400, "'mode' must be 'abort' or 'keep_going'");
            if ((*body)["prove"].is_boolean())
                ro.prove_at_end = (*body)["prove"].get<bool>();
            Script script;
            try {
                script = parse_script(text.get<std::string>());
            } catch (const ScriptError &e) {
                return send_error(res, 400, e.what());
            }
            try {
                ReplayReport report = replay(script, *pog, selector, ro);
                send_json(res, 200, to_json(report));
            } catch (const SelectorError &e) {
                send_error(res, 404, e.what());
            }
        });

        server.set_exception_handler([](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception &e) {
                what = e.what();
            } catch (...) {
            }
            send_error(res, 500, what);
        });

        if (!options.static_dir.empty())
            server.set_mount_point("/", options.static_dir);
    }
};

Service::Service(std::shared_ptr<const PogFile> pog, std::vector<ProverConfig> registry, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(pog), std::move(registry), std::move(options)))
{
}

Service::~Service() { stop(); }

int Service::start(const std::string &host, int port)
{
    int bound = port;
    if (port == 0)
        bound = impl_->server.bind_to_any_port(host);
    else if (!impl_->server.bind_to_port(host, port))
        bound = -1;
    if (bound < 0)
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void Service::listen(const std::string &host, int port)
{
    if (!impl_->server.listen(host, port))
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
}

void Service::stop()
{
    impl_->server.stop();
    if (impl_->thread.joinable())
        impl_->thread.join();
}

} // namespace hypsel
