#ifndef SICUT_SERVICE_HPP
#define SICUT_SERVICE_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "sicut/model.hpp"

namespace sicut {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    /// 0 binds an ephemeral port.
    int port = 8080;
    /// When non-empty, every published solution is also written to `<dir>/<session id>.json`.
    std::string session_dir;
    Linkage default_linkage = Linkage::single;
    /// recalc/refine with a larger budget answer 202 and run in the background.
    std::int64_t async_threshold_ms = 2000;
};

/**
 * @brief HTTP/JSON front-end over in-memory sessions.
 *
 * Endpoints:
 *   POST /sessions                          dataset + embedding (or "pca") + optional schema, linkage
 *   GET  /sessions/{id}                     summary of the current solution
 *   POST /sessions/{id}/recalc              greedy search from one cluster
 *   POST /sessions/{id}/refine              hill-climb from the current solution
 *   GET  /sessions/{id}/status              {running, iterations, elapsed_ms}
 *   GET  /sessions/{id}/embedding           coordinates and labels
 *   GET  /sessions/{id}/explanations[/{c}]  per-cluster explanations
 *   GET  /sessions/{id}/solution            the solution document
 *
 * One search per session at a time; a second request gets 409. Solutions are published atomically.
 */
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listening socket and returns the bound port. Throws `Error(Errc::io)` on failure.
    int bind();
    /// Serves until `stop()`. Binds first if needed.
    void listen();
    void stop();
    /// Blocks until every background search has finished.
    void wait_idle();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sicut

#endif
