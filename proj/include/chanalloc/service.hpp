#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "chanalloc/harness.hpp"

namespace chanalloc {

/// "host:port" -> (host, port). Throws Errc::invalid_argument.
std::pair<std::string, int> parse_listen_addr(const std::string& addr);

/// TCP front end for the controller: accepts device connections speaking the
/// line protocol, serializes their messages into the allocator mailbox and
/// drives collection windows and allocation rounds.
class ControllerServer {
  public:
    struct Options {
        std::string listen_host = "127.0.0.1";
        int port = 0;             // 0 = pick a free port
        int max_rounds = 0;       // 0 = run until request_stop()
        int window_timeout_ms = 5000;
        bool print_status = false;
    };

    ControllerServer(SimScenario scenario, Options options);
    ~ControllerServer();

    ControllerServer(const ControllerServer&) = delete;
    ControllerServer& operator=(const ControllerServer&) = delete;

    /// Bind and listen; accepting starts immediately. Throws Errc::bind when
    /// the address is taken.
    void start();

    int port() const { return port_; }

    /// Adjust the run-scoped knobs between start() and run().
    void set_run_options(int max_rounds, bool print_status) {
        options_.max_rounds = max_rounds;
        options_.print_status = print_status;
    }

    /// Control loop: collect a window, allocate, push assignments to
    /// connected APs. Returns after max_rounds rounds or request_stop().
    void run();

    /// Safe to call from any thread and from a signal handler (stores a flag).
    void request_stop() { stop_.store(true, std::memory_order_relaxed); }

    std::string status_text();
    RunReport report();

  private:
    struct Connection {
        int fd = -1;
        std::mutex write_mutex;
        std::thread reader;
        std::atomic<bool> closed{false};
        std::string device_id;  // set after hello
    };

    void accept_loop();
    void reader_loop(Connection* conn);
    void enqueue(Connection* conn, proto::Message msg);
    void send_line(Connection* conn, const proto::Message& msg);
    void drain_mailbox();

    SimScenario scenario_;
    Options options_;
    Controller controller_;
    RunReport report_;

    int listen_fd_ = -1;
    int port_ = 0;
    std::thread accept_thread_;
    std::atomic<bool> stop_{false};

    std::mutex mutex_;  // guards mailbox_, controller_, report_, conns_ list, slots
    std::condition_variable mailbox_cv_;
    std::deque<std::pair<Connection*, proto::Message>> mailbox_;
    std::vector<std::unique_ptr<Connection>> connections_;
    std::map<std::string, Connection*> device_conns_;
    std::map<std::string, std::uint64_t> last_report_slot_;
};

/// Sensor-side client: connects, introduces itself, then replays the
/// scenario-driven reports for `rounds` collection windows, waiting for the
/// controller's ack after each message. AP emissions are modeled at their
/// scenario-initial channels.
void run_sensor_emitter(const SimScenario& scenario, const std::string& device_id,
                        const std::string& host, int port, int rounds,
                        std::optional<std::uint64_t> seed_override = {});

}  // namespace chanalloc
