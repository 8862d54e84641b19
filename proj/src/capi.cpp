#include "chanalloc.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "chanalloc/channels.hpp"
#include "chanalloc/harness.hpp"
#include "chanalloc/report.hpp"
#include "chanalloc/scenario.hpp"
#include "chanalloc/service.hpp"

using namespace chanalloc;

struct ca_report {
    RunReport report;
};

struct ca_server {
    ControllerServer* server = nullptr;
    SimScenario scenario;
    ControllerServer::Options options;
    bool started = false;
};

namespace {

thread_local std::string t_last_error = "ok";

ca_status status_from(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return CA_ERR_INVALID_ARGUMENT;
        case Errc::domain: return CA_ERR_DOMAIN;
        case Errc::parse: return CA_ERR_PARSE;
        case Errc::insufficient_data: return CA_ERR_INSUFFICIENT_DATA;
        case Errc::io: return CA_ERR_IO;
        case Errc::bind: return CA_ERR_BIND;
        case Errc::state: return CA_ERR_STATE;
        case Errc::internal: return CA_ERR_INTERNAL;
    }
    return CA_ERR_INTERNAL;
}

ca_status set_error(ca_status status, const std::string& detail) {
    t_last_error = detail;
    return status;
}

/// Run `fn`, funneling exceptions into status codes.
template <typename Fn>
ca_status guarded(Fn&& fn) {
    try {
        fn();
        return CA_OK;
    } catch (const Error& e) {
        return set_error(status_from(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(CA_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(CA_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(CA_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(::malloc(s.size() + 1));
    if (out != nullptr) {
        std::memcpy(out, s.c_str(), s.size() + 1);
    }
    return out;
}

ca_status require_arg(bool ok, const char* what) {
    if (!ok) {
        return set_error(CA_ERR_INVALID_ARGUMENT, std::string("null or invalid argument: ") + what);
    }
    return CA_OK;
}

}  // namespace

extern "C" {

const char* ca_version(void) { return "1.0.0"; }

const char* ca_status_name(ca_status status) {
    switch (status) {
        case CA_OK: return "ok";
        case CA_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case CA_ERR_DOMAIN: return "domain";
        case CA_ERR_PARSE: return "parse";
        case CA_ERR_INSUFFICIENT_DATA: return "insufficient_data";
        case CA_ERR_IO: return "io";
        case CA_ERR_BIND: return "bind";
        case CA_ERR_STATE: return "state";
        case CA_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* ca_last_error(void) { return t_last_error.c_str(); }

void ca_string_free(char* s) { ::free(s); }

ca_status ca_growth_model(int year, double* out) {
    if (auto bad = require_arg(out != nullptr, "out"); bad != CA_OK) return bad;
    return guarded([&] { *out = growth_model(year); });
}

ca_status ca_classify_quality(double level_dbm, const char** label_out) {
    if (auto bad = require_arg(label_out != nullptr, "label_out"); bad != CA_OK) return bad;
    return guarded([&] { *label_out = quality_label(classify_quality(level_dbm)); });
}

ca_status ca_crossing_coefficient(int channel, int other, double* out) {
    if (auto bad = require_arg(out != nullptr, "out"); bad != CA_OK) return bad;
    return guarded([&] {
        *out = crossing_coefficient(ChannelId::checked(channel), ChannelId::checked(other));
    });
}

ca_status ca_simulate(const char* scenario_path, int rounds, int has_seed_override,
                      uint64_t seed, ca_report** out) {
    if (auto bad = require_arg(scenario_path != nullptr && out != nullptr, "scenario_path/out");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] {
        auto scenario = load_scenario(scenario_path);
        std::optional<std::uint64_t> seed_override;
        if (has_seed_override != 0) {
            seed_override = seed;
        }
        SimHarness harness(std::move(scenario), seed_override);
        auto* handle = new ca_report{harness.run(rounds)};
        *out = handle;
    });
}

ca_status ca_report_render(const ca_report* report, const char* format, char** text_out) {
    if (auto bad = require_arg(report != nullptr && format != nullptr && text_out != nullptr,
                               "report/format/text_out");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] { *text_out = dup_string(report->report.render(format)); });
}

ca_status ca_report_summary(const ca_report* report, char** text_out) {
    if (auto bad = require_arg(report != nullptr && text_out != nullptr, "report/text_out");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] { *text_out = dup_string(report->report.to_table()); });
}

ca_status ca_report_write(const ca_report* report, const char* path, const char* format) {
    if (auto bad = require_arg(report != nullptr && path != nullptr && format != nullptr,
                               "report/path/format");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            fail(Errc::io, std::string("cannot write ") + path);
        }
        out << report->report.render(format);
    });
}

ca_status ca_report_final_channel(const ca_report* report, const char* ap_id, int* channel_out) {
    if (auto bad = require_arg(report != nullptr && ap_id != nullptr && channel_out != nullptr,
                               "report/ap_id/channel_out");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] {
        auto it = report->report.final_channels.find(ap_id);
        if (it == report->report.final_channels.end()) {
            fail(Errc::invalid_argument, std::string("unknown AP: ") + ap_id);
        }
        *channel_out = it->second;
    });
}

void ca_report_free(ca_report* report) { delete report; }

ca_status ca_server_create(const char* scenario_path, const char* listen_addr, ca_server** out) {
    if (auto bad = require_arg(scenario_path != nullptr && listen_addr != nullptr && out != nullptr,
                               "scenario_path/listen_addr/out");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] {
        auto handle = std::make_unique<ca_server>();
        handle->scenario = load_scenario(scenario_path);
        const auto [host, port] = parse_listen_addr(listen_addr);
        handle->options.listen_host = host;
        handle->options.port = port;
        handle->server = new ControllerServer(handle->scenario, handle->options);
        handle->server->start();
        handle->started = true;
        *out = handle.release();
    });
}

ca_status ca_server_port(const ca_server* server, int* port_out) {
    if (auto bad = require_arg(server != nullptr && port_out != nullptr, "server/port_out");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] { *port_out = server->server->port(); });
}

ca_status ca_server_run(ca_server* server, int max_rounds, int print_status) {
    if (auto bad = require_arg(server != nullptr, "server"); bad != CA_OK) return bad;
    return guarded([&] {
        // Options are fixed at construction except these run-scoped knobs.
        server->server->set_run_options(max_rounds, print_status != 0);
        server->server->run();
    });
}

void ca_server_request_stop(ca_server* server) {
    if (server != nullptr && server->server != nullptr) {
        server->server->request_stop();
    }
}

ca_status ca_server_status(ca_server* server, char** text_out) {
    if (auto bad = require_arg(server != nullptr && text_out != nullptr, "server/text_out");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] { *text_out = dup_string(server->server->status_text()); });
}

ca_status ca_server_report(ca_server* server, ca_report** out) {
    if (auto bad = require_arg(server != nullptr && out != nullptr, "server/out"); bad != CA_OK) {
        return bad;
    }
    return guarded([&] { *out = new ca_report{server->server->report()}; });
}

void ca_server_free(ca_server* server) {
    if (server == nullptr) {
        return;
    }
    if (server->server != nullptr) {
        server->server->request_stop();
        delete server->server;
    }
    delete server;
}

ca_status ca_emit_reports(const char* scenario_path, const char* device_id,
                          const char* connect_addr, int rounds, int has_seed_override,
                          uint64_t seed) {
    if (auto bad = require_arg(
            scenario_path != nullptr && device_id != nullptr && connect_addr != nullptr,
            "scenario_path/device_id/connect_addr");
        bad != CA_OK) {
        return bad;
    }
    return guarded([&] {
        const auto scenario = load_scenario(scenario_path);
        const auto [host, port] = parse_listen_addr(connect_addr);
        std::optional<std::uint64_t> seed_override;
        if (has_seed_override != 0) {
            seed_override = seed;
        }
        run_sensor_emitter(scenario, device_id, host, port, rounds, seed_override);
    });
}

}  // extern "C"
