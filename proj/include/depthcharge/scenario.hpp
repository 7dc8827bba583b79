#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "depthcharge/adversary.hpp"
#include "depthcharge/bounds.hpp"
#include "depthcharge/driver.hpp"
#include "depthcharge/table.hpp"
#include "depthcharge/workload.hpp"

namespace depthcharge {

// Per-round pump intensity for pump_rounds phases.
struct DrSchedule {
    enum class Kind : uint8_t { constant, geometric, front_loaded };
    Kind kind = Kind::constant;
    uint32_t value = 0;   // constant
    uint32_t start = 1;   // geometric
    uint32_t factor = 2;  // geometric
    uint32_t cap = 64;    // geometric
    uint32_t total = 0;   // front_loaded: everything in round one
};

uint32_t dr_at(const DrSchedule& s, uint32_t round);  // 1-based round

struct ScriptAction {
    enum class Kind : uint8_t {
        bad_insert,
        bad_query,
        bad_delete,
        bad_probe,
        flood,
        pump,
        good_insert,
        good_query,
        good_delete,
    };
    Kind kind = Kind::bad_insert;
    std::optional<uint32_t> index;
    std::optional<uint32_t> ordinal;  // names a script-declared bad key
    std::optional<std::string> key;   // literal key bytes (from key_hex)
    uint64_t budget = 0;              // flood
    uint32_t d = 0;                   // pump
};

struct Phase {
    enum class Kind : uint8_t {
        good_inserts,
        good_insert_at,
        good_inserts_each,
        good_queries,
        good_query_at,
        good_deletes,
        flood,
        spread,
        probe,
        pump_rounds,
        script,
    };
    Kind kind = Kind::good_inserts;
    uint64_t count = 0;
    uint32_t count_each = 0;
    uint32_t index = 0;
    std::vector<uint32_t> indices;
    uint64_t budget = 0;
    uint32_t rounds = 0;
    DrSchedule dr;
    bool auto_count = false;  // good_queries: count = clamp(ell_max^2 * B, min, cap)
    uint64_t auto_min = 10000;
    uint64_t auto_cap = 1000000;
    std::vector<ScriptAction> actions;
};

struct Scenario {
    std::string name;
    TableConfig table;
    rb::BackendKind backend = rb::BackendKind::ledger;
    uint32_t pow_unit_bits = 56;  // unit threshold = 2^pow_unit_bits
    uint64_t seed = 0;
    std::optional<uint64_t> declared_budget;
    std::vector<Phase> phases;
    std::vector<CheckSpec> checks;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses and validates; throws ScenarioError naming the offending field.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);
void validate_scenario(const Scenario& sc);

std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);
Scenario builtin_scenario(const std::string& name);

struct RunOptions {
    std::optional<uint64_t> seed;
    std::optional<rb::BackendKind> backend;
    bool trace = false;
};

// Ledger columns for one index; only indices with activity are reported.
struct PerIndexRow {
    uint32_t index = 0;
    uint64_t adversary_rb = 0;
    uint64_t good_insert_rb = 0;
    uint64_t good_hits = 0;
    uint64_t good_hit_rb = 0;
    uint64_t good_inserts = 0;
    uint32_t max_good = 0;
};

struct RunSummary {
    uint32_t schema_version = 1;
    std::string scenario;
    uint64_t seed = 0;
    std::string backend;
    TableConfig table;

    uint64_t good_inserts = 0, good_queries = 0, good_deletes = 0;
    uint64_t bad_inserts = 0, bad_queries = 0, bad_deletes = 0;
    uint64_t settled = 0, rejected = 0;

    uint64_t algorithm_rb = 0, algorithm_model_rb = 0, algorithm_latency = 0, adversary_rb = 0;

    uint32_t ell_max = 0;
    double ell_ave = 0.0;
    uint32_t targeted = 0, attacked = 0;
    uint32_t max_chain = 0;
    uint64_t live_objects = 0;

    uint64_t free_probes = 0, query_redraws = 0, pump_shortfall = 0, unsettled_quotes = 0;

    uint64_t attack_spend = 0, attack_placed = 0, attack_executed = 0, attack_shortfall = 0;

    rb::WorkMeter client_meter;
    rb::WorkMeter adversary_meter;
    uint64_t server_verify_evals = 0;

    bool wallets_attached = false;
    uint64_t wallet_violations = 0;

    std::vector<PerIndexRow> per_index;
    std::vector<CheckResult> checks;
    bool all_as_expected = true;

    std::vector<TraceRow> trace;
};

RunSummary run_scenario(const Scenario& sc, const RunOptions& opt = {});

std::string key_hex(std::string_view key);
nlohmann::ordered_json summary_json(const RunSummary& s);
std::string summary_csv(const RunSummary& s);
std::string trace_csv(const std::vector<TraceRow>& rows);

}  // namespace depthcharge
