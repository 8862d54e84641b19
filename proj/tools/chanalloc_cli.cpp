// chanalloc command-line front end. Talks to the core exclusively through the
// C API in chanalloc.h.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "chanalloc.h"

namespace {

ca_server* g_server = nullptr;

void on_signal(int) {
    if (g_server != nullptr) {
        ca_server_request_stop(g_server);
    }
}

int fail_with(ca_status status, const char* what) {
    std::fprintf(stderr, "chanalloc: %s: %s (%s)\n", what, ca_last_error(),
                 ca_status_name(status));
    return 1;
}

int write_or_print(const ca_report* report, const std::string& out_path,
                   const std::string& format) {
    if (!out_path.empty()) {
        if (ca_status st = ca_report_write(report, out_path.c_str(), format.c_str());
            st != CA_OK) {
            return fail_with(st, "writing report");
        }
    }
    char* summary = nullptr;
    if (ca_status st = ca_report_summary(report, &summary); st != CA_OK) {
        return fail_with(st, "rendering summary");
    }
    std::fputs(summary, stdout);
    ca_string_free(summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2.4 GHz interference simulator and channel-allocation controller"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::string format = "structured";
    std::string listen_addr = "127.0.0.1:4820";
    std::string connect_addr;
    std::string device_id;
    int rounds = 5;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int year = 0;
    double level_dbm = 0.0;

    auto* simulate = app.add_subcommand("simulate", "run the in-process simulation");
    simulate->add_option("--scenario", scenario_path, "scenario file")->required();
    simulate->add_option("--rounds", rounds, "collection windows to run");
    simulate->add_option("--seed", seed, "override the scenario RNG seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });
    simulate->add_option("--out", out_path, "write the run report to this path");
    simulate->add_option("--format", format, "report format: structured | table")
        ->check(CLI::IsMember({"structured", "table"}));

    auto* serve = app.add_subcommand("serve", "run the controller service");
    serve->add_option("--scenario", scenario_path, "scenario file")->required();
    serve->add_option("--listen", listen_addr, "listen address HOST:PORT");
    serve->add_option("--rounds", rounds, "rounds to serve (0 = until signal)");
    serve->add_option("--out", out_path, "write the final run report here");
    serve->add_option("--format", format, "report format: structured | table")
        ->check(CLI::IsMember({"structured", "table"}));

    auto* emit = app.add_subcommand("emit", "replay one sensor against a controller");
    emit->add_option("--scenario", scenario_path, "scenario file")->required();
    emit->add_option("--device", device_id, "sensor device id")->required();
    emit->add_option("--connect", connect_addr, "controller address HOST:PORT")->required();
    emit->add_option("--rounds", rounds, "collection windows to send");
    emit->add_option("--seed", seed, "override the scenario RNG seed")
        ->each([&seed_set](const std::string&) { seed_set = true; });

    auto* growth = app.add_subcommand("growth", "evaluate the AP-growth model");
    growth->add_option("year", year, "year (> 2000)")->required();

    auto* classify = app.add_subcommand("classify", "quality band of a level in dBm");
    classify->add_option("level_dbm", level_dbm, "signal level, dBm")->required();

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) {
        ca_report* report = nullptr;
        if (ca_status st = ca_simulate(scenario_path.c_str(), rounds, seed_set ? 1 : 0, seed,
                                       &report);
            st != CA_OK) {
            return fail_with(st, "simulate");
        }
        const int rc = write_or_print(report, out_path, format);
        ca_report_free(report);
        return rc;
    }

    if (serve->parsed()) {
        ca_server* server = nullptr;
        if (ca_status st = ca_server_create(scenario_path.c_str(), listen_addr.c_str(), &server);
            st != CA_OK) {
            return fail_with(st, "serve");
        }
        g_server = server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        int port = 0;
        ca_server_port(server, &port);
        std::printf("listening on %s port %d\n", listen_addr.c_str(), port);
        std::fflush(stdout);
        const int serve_rounds = serve->count("--rounds") > 0 ? rounds : 0;
        if (ca_status st = ca_server_run(server, serve_rounds, 1); st != CA_OK) {
            ca_server_free(server);
            return fail_with(st, "control loop");
        }
        ca_report* report = nullptr;
        int rc = 0;
        if (ca_status st = ca_server_report(server, &report); st == CA_OK) {
            rc = write_or_print(report, out_path, format);
            ca_report_free(report);
        } else {
            rc = fail_with(st, "collecting final report");
        }
        g_server = nullptr;
        ca_server_free(server);
        return rc;
    }

    if (emit->parsed()) {
        if (ca_status st = ca_emit_reports(scenario_path.c_str(), device_id.c_str(),
                                           connect_addr.c_str(), rounds, seed_set ? 1 : 0, seed);
            st != CA_OK) {
            return fail_with(st, "emit");
        }
        return 0;
    }

    if (growth->parsed()) {
        double value = 0.0;
        if (ca_status st = ca_growth_model(year, &value); st != CA_OK) {
            return fail_with(st, "growth");
        }
        std::printf("%.10g\n", value);
        return 0;
    }

    if (classify->parsed()) {
        const char* label = nullptr;
        if (ca_status st = ca_classify_quality(level_dbm, &label); st != CA_OK) {
            return fail_with(st, "classify");
        }
        std::printf("%s\n", label);
        return 0;
    }

    return 1;
}
