#include "chanalloc/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>

#include "chanalloc/log.hpp"

namespace chanalloc {

namespace {

constexpr int kPollMs = 50;

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            return false;
        }
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

sockaddr_in make_addr(const std::string& host, int port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        fail(Errc::invalid_argument, "not an IPv4 address: " + host);
    }
    return addr;
}

}  // namespace

std::pair<std::string, int> parse_listen_addr(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= addr.size()) {
        fail(Errc::invalid_argument, "address must be HOST:PORT: " + addr);
    }
    const std::string host = addr.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(addr.substr(colon + 1));
    } catch (const std::exception&) {
        fail(Errc::invalid_argument, "bad port in address: " + addr);
    }
    if (port < 0 || port > 65535) {
        fail(Errc::invalid_argument, "port outside 0..65535: " + addr);
    }
    return {host, port};
}

ControllerServer::ControllerServer(SimScenario scenario, Options options)
    : scenario_(std::move(scenario)),
      options_(std::move(options)),
      controller_(scenario_.allocator, scenario_.aps) {
    report_.seed = scenario_.rf.rng_seed;
}

ControllerServer::~ControllerServer() {
    request_stop();
    if (accept_thread_.joinable()) {
        accept_thread_.join();
    }
    for (auto& conn : connections_) {
        if (conn->reader.joinable()) {
            conn->reader.join();
        }
        close_fd(conn->fd);
    }
    close_fd(listen_fd_);
}

void ControllerServer::start() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) {
        fail(Errc::bind, std::string("socket: ") + std::strerror(errno));
    }
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = make_addr(options_.listen_host, options_.port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const std::string detail = std::strerror(errno);
        close_fd(listen_fd_);
        fail(Errc::bind, "bind " + options_.listen_host + ":" +
                             std::to_string(options_.port) + ": " + detail);
    }
    if (::listen(listen_fd_, 16) != 0) {
        const std::string detail = std::strerror(errno);
        close_fd(listen_fd_);
        fail(Errc::bind, "listen: " + detail);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    accept_thread_ = std::thread([this] { accept_loop(); });
    log::info("controller listening on " + options_.listen_host + ":" + std::to_string(port_));
}

void ControllerServer::accept_loop() {
    while (!stop_.load(std::memory_order_relaxed)) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, kPollMs);
        if (ready <= 0) {
            continue;
        }
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            continue;
        }
        auto conn = std::make_unique<Connection>();
        conn->fd = fd;
        Connection* raw = conn.get();
        {
            std::lock_guard<std::mutex> lock(mutex_);
            connections_.push_back(std::move(conn));
        }
        raw->reader = std::thread([this, raw] { reader_loop(raw); });
    }
}

void ControllerServer::reader_loop(Connection* conn) {
    std::string buffer;
    char chunk[4096];
    while (!stop_.load(std::memory_order_relaxed)) {
        pollfd pfd{conn->fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, kPollMs);
        if (ready <= 0) {
            continue;
        }
        const ssize_t n = ::recv(conn->fd, chunk, sizeof chunk, 0);
        if (n == 0) {
            break;  // peer closed
        }
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) {
                continue;
            }
            break;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while ((pos = buffer.find('\n')) != std::string::npos) {
            const std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (line.empty()) {
                continue;
            }
            try {
                enqueue(conn, proto::decode(line));
            } catch (const Error& e) {
                // Malformed line: report it and keep the connection.
                send_line(conn, proto::ErrorMsg{proto::kErrParse, e.what()});
            }
        }
    }
    conn->closed.store(true);
}

void ControllerServer::enqueue(Connection* conn, proto::Message msg) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        mailbox_.emplace_back(conn, std::move(msg));
    }
    mailbox_cv_.notify_all();
}

void ControllerServer::send_line(Connection* conn, const proto::Message& msg) {
    const std::string line = proto::encode(msg);
    std::lock_guard<std::mutex> lock(conn->write_mutex);
    if (!send_all(conn->fd, line)) {
        log::debug("send failed on connection for " + conn->device_id);
    }
}

void ControllerServer::drain_mailbox() {
    // Caller holds mutex_.
    while (!mailbox_.empty()) {
        auto [conn, msg] = std::move(mailbox_.front());
        mailbox_.pop_front();
        if (const auto* hello = std::get_if<proto::Hello>(&msg)) {
            conn->device_id = hello->device_id;
            device_conns_[hello->device_id] = conn;
        }
        if (const auto* report = std::get_if<proto::ChannelReport>(&msg)) {
            last_report_slot_[report->device_id] = report->slot;
        } else if (const auto* card = std::get_if<proto::WifiCardReport>(&msg)) {
            last_report_slot_[card->device_id] = card->slot;
        }
        const auto reply = controller_.ingest(msg);
        if (reply) {
            send_line(conn, *reply);
        }
    }
}

void ControllerServer::run() {
    if (listen_fd_ < 0) {
        fail(Errc::state, "server not started");
    }
    int rounds_done = 0;
    const auto expected = scenario_.sensor_ids();
    while (!stop_.load(std::memory_order_relaxed)) {
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::milliseconds(options_.window_timeout_ms);
        // Collection window: wait until every declared sensor reported for
        // this window, or the timeout expires.
        {
            std::unique_lock<std::mutex> lock(mutex_);
            const std::uint64_t end_slot = controller_.window_end_slot();
            const auto window_complete = [&] {
                drain_mailbox();
                for (const auto& id : expected) {
                    auto it = last_report_slot_.find(id);
                    if (it == last_report_slot_.end() || it->second < end_slot) {
                        return false;
                    }
                }
                return true;
            };
            while (!window_complete() && std::chrono::steady_clock::now() < deadline &&
                   !stop_.load(std::memory_order_relaxed)) {
                mailbox_cv_.wait_for(lock, std::chrono::milliseconds(kPollMs));
            }
            const auto result = controller_.allocate_round();
            SimHarness::accumulate(report_, result, controller_.ap_channels());
            for (const auto& assign : result.assignments) {
                auto it = device_conns_.find(assign.ap_id);
                if (it != device_conns_.end() && !it->second->closed.load()) {
                    send_line(it->second, assign);
                }
            }
            if (options_.print_status) {
                std::size_t reporting = 0;
                for (const auto& id : expected) {
                    if (last_report_slot_.count(id) > 0) {
                        ++reporting;
                    }
                }
                std::string line = "round " + std::to_string(result.round) +
                                   " reports=" + std::to_string(reporting) +
                                   " assignments=" + std::to_string(result.assignments.size());
                for (const auto& assign : result.assignments) {
                    line += " " + assign.ap_id + "->ch" + std::to_string(assign.channel);
                }
                std::printf("%s\n", line.c_str());
                std::fflush(stdout);
            }
        }
        ++rounds_done;
        if (options_.max_rounds > 0 && rounds_done >= options_.max_rounds) {
            break;
        }
    }
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& [ap_id, channel] : controller_.ap_channels()) {
        report_.final_channels[ap_id] = channel;
    }
}

std::string ControllerServer::status_text() {
    std::lock_guard<std::mutex> lock(mutex_);
    return controller_.status_json();
}

RunReport ControllerServer::report() {
    std::lock_guard<std::mutex> lock(mutex_);
    RunReport out = report_;
    for (const auto& [ap_id, channel] : controller_.ap_channels()) {
        out.final_channels[ap_id] = channel;
    }
    return out;
}

// --- sensor emitter --------------------------------------------------------

namespace {

class LineClient {
  public:
    LineClient(const std::string& host, int port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) {
            fail(Errc::io, std::string("socket: ") + std::strerror(errno));
        }
        sockaddr_in addr = make_addr(host, port);
        // The controller may still be coming up; retry briefly.
        for (int attempt = 0;; ++attempt) {
            if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) {
                return;
            }
            if (attempt >= 50) {
                const std::string detail = std::strerror(errno);
                ::close(fd_);
                fail(Errc::io, "connect " + host + ":" + std::to_string(port) + ": " + detail);
            }
            ::usleep(100 * 1000);
        }
    }

    ~LineClient() {
        if (fd_ >= 0) {
            ::close(fd_);
        }
    }

    void send_message(const proto::Message& msg) {
        if (!send_all(fd_, proto::encode(msg))) {
            fail(Errc::io, "send failed");
        }
    }

    proto::Message read_message(int timeout_ms = 10000) {
        const auto deadline =
            std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        while (true) {
            const auto pos = buffer_.find('\n');
            if (pos != std::string::npos) {
                const std::string line = buffer_.substr(0, pos);
                buffer_.erase(0, pos + 1);
                return proto::decode(line);
            }
            if (std::chrono::steady_clock::now() >= deadline) {
                fail(Errc::io, "timed out waiting for controller reply");
            }
            pollfd pfd{fd_, POLLIN, 0};
            if (::poll(&pfd, 1, kPollMs) <= 0) {
                continue;
            }
            char chunk[4096];
            const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n == 0) {
                fail(Errc::io, "controller closed the connection");
            }
            if (n < 0) {
                if (errno == EINTR || errno == EAGAIN) {
                    continue;
                }
                fail(Errc::io, std::string("recv: ") + std::strerror(errno));
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

  private:
    int fd_ = -1;
    std::string buffer_;
};

double declared_weight(const SimScenario& scenario, const std::string& device_id,
                       proto::DeviceKind& kind_out) {
    for (const auto& s : scenario.rssi_sensors) {
        if (s.id == device_id) {
            kind_out = proto::DeviceKind::RssiSensor;
            return s.weight;
        }
    }
    for (const auto& s : scenario.binary_sensors) {
        if (s.id == device_id) {
            kind_out = proto::DeviceKind::BinarySensor;
            return s.weight;
        }
    }
    for (const auto& s : scenario.wifi_cards) {
        if (s.id == device_id) {
            kind_out = proto::DeviceKind::WifiCard;
            return s.weight;
        }
    }
    fail(Errc::invalid_argument, "unknown sensor device: " + device_id);
}

void expect_ack(const proto::Message& reply) {
    if (const auto* err = std::get_if<proto::ErrorMsg>(&reply)) {
        fail(Errc::state, "controller rejected message: " + err->code + ": " + err->detail);
    }
    if (!std::holds_alternative<proto::Ack>(reply)) {
        fail(Errc::state, "unexpected controller reply");
    }
}

}  // namespace

void run_sensor_emitter(const SimScenario& scenario_in, const std::string& device_id,
                        const std::string& host, int port, int rounds,
                        std::optional<std::uint64_t> seed_override) {
    SimScenario scenario = scenario_in;
    if (seed_override) {
        scenario.rf.rng_seed = *seed_override;
    }
    if (!scenario.has_sensor(device_id)) {
        fail(Errc::invalid_argument, "unknown sensor device: " + device_id);
    }
    std::map<std::string, int> initial_channels;
    for (const auto& ap : scenario.aps) {
        initial_channels[ap.id] = ap.initial_channel;
    }

    LineClient client(host, port);
    proto::Hello hello;
    hello.device_id = device_id;
    hello.weight = declared_weight(scenario, device_id, hello.device_kind);
    client.send_message(hello);
    expect_ack(client.read_message());

    const auto window = static_cast<std::uint64_t>(scenario.allocator.collection_window_slots);
    for (int round = 0; round < rounds; ++round) {
        const std::uint64_t slot = (static_cast<std::uint64_t>(round) + 1) * window - 1;
        const std::uint64_t seq = static_cast<std::uint64_t>(round) + 1;
        const auto report = make_sensor_report(scenario, device_id, initial_channels, seq, slot);
        client.send_message(report);
        expect_ack(client.read_message());
        log::debug(device_id + ": sent report for slot " + std::to_string(slot));
    }
}

}  // namespace chanalloc
