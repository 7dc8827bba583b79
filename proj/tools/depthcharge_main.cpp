#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "depthcharge/adversary.hpp"
#include "depthcharge/scenario.hpp"
#include "depthcharge/service.hpp"

namespace dc = depthcharge;

namespace {

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

dc::rb::BackendKind parse_backend(const std::string& s) {
    if (s == "ledger") return dc::rb::BackendKind::ledger;
    if (s == "pow") return dc::rb::BackendKind::pow;
    throw CLI::ValidationError("backend", "must be 'ledger' or 'pow'");
}

bool env_truthy(const char* name) {
    const char* v = std::getenv(name);
    if (!v) return false;
    std::string s = v;
    return s == "1" || s == "true" || s == "yes" || s == "on";
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << data;
    if (!out) throw std::runtime_error("short write to " + path);
}

int cmd_run(const std::string& target, std::optional<uint64_t> seed,
            const std::string& backend, const std::string& trace_path,
            std::string out_path, const std::string& format, bool quiet) {
    dc::Scenario sc = dc::is_builtin(target) ? dc::builtin_scenario(target)
                                             : dc::load_scenario_file(target);
    dc::RunOptions opt;
    opt.seed = seed;
    if (!backend.empty()) opt.backend = parse_backend(backend);
    opt.trace = !trace_path.empty();

    dc::RunSummary summary = dc::run_scenario(sc, opt);

    std::string rendered = format == "csv" ? dc::summary_csv(summary)
                                           : dc::summary_json(summary).dump(2) + "\n";
    if (!quiet) std::cout << rendered;

    if (out_path.empty()) {
        if (const char* dir = std::getenv("DEPTHCHARGE_OUT_DIR")) {
            std::string ext = format == "csv" ? "csv" : "json";
            out_path = std::string(dir) + "/" + summary.scenario + "-" +
                       std::to_string(summary.seed) + ".summary." + ext;
        }
    }
    if (!out_path.empty()) {
        write_file(out_path, rendered);
        if (!quiet) std::cerr << "summary written to " << out_path << "\n";
    }
    if (!trace_path.empty()) {
        write_file(trace_path, dc::trace_csv(summary.trace));
        if (!quiet) std::cerr << "trace written to " << trace_path << "\n";
    }
    return summary.all_as_expected ? 0 : 1;
}

int cmd_serve(const std::string& bind, uint16_t port, uint32_t index_count, uint64_t hash_seed,
              bool no_mtf, const std::string& backend, uint32_t unit_bits, uint64_t store_seed,
              uint64_t ttl_ms) {
    dc::ServerConfig cfg;
    cfg.table.index_count = index_count;
    cfg.table.hash_seed = hash_seed;
    cfg.table.move_to_front = !no_mtf;
    cfg.backend = parse_backend(backend);
    cfg.pow.unit_threshold = uint64_t{1} << unit_bits;
    cfg.store_seed = store_seed;
    cfg.challenge_ttl_ms = ttl_ms;
    cfg.bind_addr = bind;
    cfg.simulation_mode = env_truthy("DEPTHCHARGE_SIMULATION");

    dc::Server server(std::move(cfg));
    server.start(port);
    std::cout << "listening on " << bind << ":" << server.port() << std::endl;
    if (cfg.simulation_mode) std::cerr << "simulation mode: declared indices honored\n";

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    std::cout << "served " << server.requests_served() << " requests\n";
    return 0;
}

// Script lines: `insert KEY [@INDEX]`, `query KEY`, `delete KEY`.
// KEY is `hex:<bytes>`, `bad:<index>:<ordinal>` (a collision-manufactured
// key), or a literal token. `#` starts a comment.
std::string parse_key(const std::string& tok) {
    if (tok.rfind("hex:", 0) == 0) {
        std::string hex = tok.substr(4);
        if (hex.size() % 2 != 0) throw std::runtime_error("odd hex key: " + tok);
        std::string out;
        for (std::size_t i = 0; i < hex.size(); i += 2)
            out.push_back(static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16)));
        return out;
    }
    if (tok.rfind("bad:", 0) == 0) {
        std::size_t colon = tok.find(':', 4);
        if (colon == std::string::npos) throw std::runtime_error("want bad:<index>:<ordinal>");
        uint32_t index = static_cast<uint32_t>(std::stoul(tok.substr(4, colon - 4)));
        uint32_t ordinal = static_cast<uint32_t>(std::stoul(tok.substr(colon + 1)));
        return dc::Adversary::script_bad_key(index, ordinal);
    }
    return tok;
}

int cmd_client(const std::string& script_path, const std::string& host, uint16_t port,
               const std::string& backend, uint32_t unit_bits) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (script_path != "-") {
        file.open(script_path);
        if (!file) {
            std::cerr << "cannot open script " << script_path << "\n";
            return 2;
        }
        in = &file;
    }

    dc::rb::PowParams pow{uint64_t{1} << unit_bits};
    dc::Client client(host, port, parse_backend(backend), pow);

    std::string line;
    uint64_t n = 0;
    while (std::getline(*in, line)) {
        auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        std::istringstream ls(line);
        std::string op, key_tok, at;
        if (!(ls >> op)) continue;
        if (!(ls >> key_tok)) {
            std::cerr << "line needs a key: " << line << "\n";
            return 2;
        }
        std::string key = parse_key(key_tok);
        dc::WireResult res;
        if (op == "insert") {
            std::optional<uint32_t> index;
            if (ls >> at) {
                if (at.empty() || at[0] != '@') {
                    std::cerr << "want @INDEX, got: " << at << "\n";
                    return 2;
                }
                index = static_cast<uint32_t>(std::stoul(at.substr(1)));
            }
            res = client.insert(key, index);
        } else if (op == "query") {
            res = client.query(key);
        } else if (op == "delete") {
            res = client.erase(key);
        } else {
            std::cerr << "unknown op: " << op << "\n";
            return 2;
        }
        ++n;
        std::cout << n << " " << op << " " << dc::to_string(res.outcome);
        if (res.outcome == dc::OutcomeKind::rejected)
            std::cout << "(" << dc::to_string(res.reject) << ")";
        std::cout << " latency=" << res.latency << " rb=" << res.rb_charged
                  << " depth=" << res.depth_before << " index=" << res.index << "\n";
    }
    const auto& m = client.meter();
    std::cout << "meter: requests=" << n << " challenges=" << m.challenges_solved
              << " hardness=" << m.hardness_solved << " hash_evals=" << m.hash_evals
              << " ledger_debits=" << m.ledger_debits << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resource-burning chained hash table: scenarios, server, client"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list builtin scenarios");

    auto* run = app.add_subcommand("run", "run a scenario and evaluate its checks");
    std::string target, run_backend, trace_path, out_path, format = "structured";
    std::optional<uint64_t> seed;
    bool quiet = false;
    run->add_option("scenario", target, "builtin name or scenario file path")->required();
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--backend", run_backend, "ledger or pow")
        ->check(CLI::IsMember({"ledger", "pow"}));
    run->add_option("--trace", trace_path, "write the per-request trace CSV here");
    run->add_option("--out", out_path,
                    "write the summary here (default: $DEPTHCHARGE_OUT_DIR/<name>-<seed>."
                    "summary.<ext> when the env var is set)");
    run->add_option("--format", format, "summary format")
        ->check(CLI::IsMember({"structured", "csv"}));
    run->add_flag("--quiet", quiet, "do not print the summary to stdout");

    auto* serve = app.add_subcommand("serve", "serve the table over TCP");
    std::string bind = "127.0.0.1", serve_backend = "pow";
    uint16_t port = 0;
    uint32_t index_count = 1024, unit_bits = 44;  // ~1M expected evals per unit
    uint64_t hash_seed = 0, store_seed = 0, ttl_ms = 300000;
    bool no_mtf = false;
    serve->add_option("--bind", bind, "bind address");
    serve->add_option("--port", port, "port (0 picks an ephemeral one)");
    serve->add_option("--index-count", index_count, "table index count");
    serve->add_option("--hash-seed", hash_seed, "table hash seed");
    serve->add_flag("--no-mtf", no_mtf, "disable move-to-front (negative-control runs)");
    serve->add_option("--backend", serve_backend, "ledger or pow")
        ->check(CLI::IsMember({"ledger", "pow"}));
    serve->add_option("--unit-bits", unit_bits,
                      "pow unit threshold exponent; expected evals per unit = 2^(64-bits)");
    serve->add_option("--store-seed", store_seed, "challenge id seed");
    serve->add_option("--ttl-ms", ttl_ms, "challenge expiry (0 = never)");

    auto* cli = app.add_subcommand("client", "replay a request script against a server");
    std::string script = "-", host = "127.0.0.1", client_backend = "pow";
    uint16_t cport = 0;
    uint32_t cunit_bits = 44;
    cli->add_option("script", script, "script file, '-' for stdin");
    cli->add_option("--host", host, "server address");
    cli->add_option("--port", cport, "server port")->required();
    cli->add_option("--backend", client_backend, "ledger or pow (must match the server)")
        ->check(CLI::IsMember({"ledger", "pow"}));
    cli->add_option("--unit-bits", cunit_bits, "pow unit threshold exponent (must match)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& n : dc::builtin_names()) std::cout << n << "\n";
            return 0;
        }
        if (run->parsed())
            return cmd_run(target, seed, run_backend, trace_path, out_path, format, quiet);
        if (serve->parsed())
            return cmd_serve(bind, port, index_count, hash_seed, no_mtf, serve_backend, unit_bits,
                             store_seed, ttl_ms);
        if (cli->parsed()) return cmd_client(script, host, cport, client_backend, cunit_bits);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
