#pragma once

// HTTP/JSON front end: sessions over one component, driven remotely.

#include "hypsel/pomodel.hpp"
#include "hypsel/provers.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hypsel {

struct ServiceOptions {
    /// Directory served at `/` for the bundled UI; empty serves nothing.
    std::string static_dir;
    PortfolioOptions portfolio;
};

class Service {
public:
    Service(std::shared_ptr<const PogFile> pog, std::vector<ProverConfig> registry, ServiceOptions options = {});
    ~Service();
    Service(const Service &) = delete;
    Service &operator=(const Service &) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws std::runtime_error if binding fails.
    int start(const std::string &host, int port);

    /// Binds and serves on the calling thread until stop().
    void listen(const std::string &host, int port);

    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace hypsel
