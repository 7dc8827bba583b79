#include "depthcharge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "depthcharge/hashing.hpp"
#include "depthcharge/keys.hpp"

namespace depthcharge {

using nlohmann::json;
using nlohmann::ordered_json;

uint32_t dr_at(const DrSchedule& s, uint32_t round) {
    switch (s.kind) {
        case DrSchedule::Kind::constant:
            return s.value;
        case DrSchedule::Kind::geometric: {
            uint64_t v = s.start;
            for (uint32_t i = 1; i < round && v < s.cap; ++i) v *= s.factor;
            return static_cast<uint32_t>(std::min<uint64_t>(v, s.cap));
        }
        case DrSchedule::Kind::front_loaded:
            return round == 1 ? s.total : 0;
    }
    return 0;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ScenarioError(path + ": " + what);
}

const json& need(const json& j, const std::string& path, const char* field) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(field);
    if (it == j.end()) fail(path + "." + field, "missing required field");
    return *it;
}

uint64_t as_u64(const json& v, const std::string& path) {
    // The parser stores non-negative literals as unsigned, but documents built
    // in code may carry them as signed; accept both, reject negatives.
    if (v.is_number_unsigned()) return v.get<uint64_t>();
    if (v.is_number_integer() && v.get<int64_t>() >= 0)
        return static_cast<uint64_t>(v.get<int64_t>());
    fail(path, "expected a non-negative integer");
}

uint64_t need_u64(const json& j, const std::string& path, const char* field) {
    return as_u64(need(j, path, field), path + "." + field);
}

uint64_t get_u64(const json& j, const std::string& path, const char* field, uint64_t def) {
    if (!j.is_object() || !j.contains(field)) return def;
    return as_u64(j.at(field), path + "." + field);
}

uint32_t need_u32(const json& j, const std::string& path, const char* field) {
    uint64_t v = need_u64(j, path, field);
    if (v > UINT32_MAX) fail(path + "." + field, "value too large");
    return static_cast<uint32_t>(v);
}

std::string need_str(const json& j, const std::string& path, const char* field) {
    const json& v = need(j, path, field);
    if (!v.is_string()) fail(path + "." + field, "expected a string");
    return v.get<std::string>();
}

bool get_bool(const json& j, const std::string& path, const char* field, bool def) {
    if (!j.is_object() || !j.contains(field)) return def;
    const json& v = j.at(field);
    if (!v.is_boolean()) fail(path + "." + field, "expected a boolean");
    return v.get<bool>();
}

double need_double(const json& j, const std::string& path, const char* field) {
    const json& v = need(j, path, field);
    if (!v.is_number()) fail(path + "." + field, "expected a number");
    return v.get<double>();
}

std::string from_hex(const std::string& hex, const std::string& path) {
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        fail(path, "invalid hex digit");
    };
    if (hex.size() % 2 != 0) fail(path, "odd-length hex string");
    std::string out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
    return out;
}

std::vector<uint32_t> parse_indices(const json& j, const std::string& path) {
    std::vector<uint32_t> out;
    if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k)
            out.push_back(
                static_cast<uint32_t>(as_u64(j[k], path + "[" + std::to_string(k) + "]")));
        return out;
    }
    if (j.is_object() && j.contains("first")) {
        uint64_t n = as_u64(j.at("first"), path + ".first");
        for (uint64_t i = 0; i < n; ++i) out.push_back(static_cast<uint32_t>(i));
        return out;
    }
    fail(path, "expected an index array or {\"first\": n}");
}

DrSchedule parse_dr(const json& j, const std::string& path) {
    DrSchedule s;
    std::string kind = need_str(j, path, "kind");
    if (kind == "constant") {
        s.kind = DrSchedule::Kind::constant;
        s.value = need_u32(j, path, "value");
    } else if (kind == "geometric") {
        s.kind = DrSchedule::Kind::geometric;
        s.start = static_cast<uint32_t>(get_u64(j, path, "start", 1));
        s.factor = static_cast<uint32_t>(get_u64(j, path, "factor", 2));
        s.cap = need_u32(j, path, "cap");
        if (s.start == 0 || s.factor < 2) fail(path, "geometric needs start >= 1 and factor >= 2");
    } else if (kind == "front_loaded") {
        s.kind = DrSchedule::Kind::front_loaded;
        s.total = need_u32(j, path, "total");
    } else {
        fail(path + ".kind", "unknown schedule kind '" + kind + "'");
    }
    return s;
}

ScriptAction parse_action(const json& j, const std::string& path) {
    ScriptAction a;
    std::string act = need_str(j, path, "act");
    auto opt_index = [&]() {
        if (j.contains("index")) a.index = need_u32(j, path, "index");
    };
    auto opt_key = [&]() {
        if (j.contains("key_hex")) a.key = from_hex(need_str(j, path, "key_hex"), path + ".key_hex");
        if (j.contains("ordinal")) a.ordinal = need_u32(j, path, "ordinal");
    };
    if (act == "bad_insert") {
        a.kind = ScriptAction::Kind::bad_insert;
        a.index = need_u32(j, path, "index");
        a.ordinal = need_u32(j, path, "ordinal");
    } else if (act == "bad_query") {
        a.kind = ScriptAction::Kind::bad_query;
        opt_index();
        opt_key();
    } else if (act == "bad_delete") {
        a.kind = ScriptAction::Kind::bad_delete;
        opt_index();
        opt_key();
    } else if (act == "bad_probe") {
        a.kind = ScriptAction::Kind::bad_probe;
        a.index = need_u32(j, path, "index");
        a.budget = need_u64(j, path, "budget");
    } else if (act == "flood") {
        a.kind = ScriptAction::Kind::flood;
        a.index = need_u32(j, path, "index");
        a.budget = need_u64(j, path, "budget");
    } else if (act == "pump") {
        a.kind = ScriptAction::Kind::pump;
        a.index = need_u32(j, path, "index");
        a.d = need_u32(j, path, "d");
    } else if (act == "good_insert") {
        a.kind = ScriptAction::Kind::good_insert;
        opt_index();
    } else if (act == "good_query") {
        a.kind = ScriptAction::Kind::good_query;
        opt_index();
    } else if (act == "good_delete") {
        a.kind = ScriptAction::Kind::good_delete;
    } else {
        fail(path + ".act", "unknown action '" + act + "'");
    }
    return a;
}

Phase parse_phase(const json& j, const std::string& path) {
    Phase p;
    std::string kind = need_str(j, path, "phase");
    if (kind == "good_inserts") {
        p.kind = Phase::Kind::good_inserts;
        p.count = need_u64(j, path, "count");
    } else if (kind == "good_insert_at") {
        p.kind = Phase::Kind::good_insert_at;
        p.index = need_u32(j, path, "index");
        p.count = get_u64(j, path, "count", 1);
    } else if (kind == "good_inserts_each") {
        p.kind = Phase::Kind::good_inserts_each;
        p.indices = parse_indices(need(j, path, "indices"), path + ".indices");
        p.count_each = need_u32(j, path, "count_each");
    } else if (kind == "good_queries") {
        p.kind = Phase::Kind::good_queries;
        const json& c = need(j, path, "count");
        if (c.is_string() && c.get<std::string>() == "auto") {
            p.auto_count = true;
            p.auto_min = get_u64(j, path, "auto_min", 10000);
            p.auto_cap = get_u64(j, path, "auto_cap", 1000000);
        } else {
            p.count = as_u64(c, path + ".count");
        }
    } else if (kind == "good_query_at") {
        p.kind = Phase::Kind::good_query_at;
        p.index = need_u32(j, path, "index");
        p.count = get_u64(j, path, "count", 1);
    } else if (kind == "good_deletes") {
        p.kind = Phase::Kind::good_deletes;
        p.count = need_u64(j, path, "count");
    } else if (kind == "flood") {
        p.kind = Phase::Kind::flood;
        p.index = need_u32(j, path, "index");
        p.budget = need_u64(j, path, "budget");
    } else if (kind == "spread") {
        p.kind = Phase::Kind::spread;
        p.indices = parse_indices(need(j, path, "indices"), path + ".indices");
        p.count = need_u64(j, path, "count");
    } else if (kind == "probe") {
        p.kind = Phase::Kind::probe;
        p.index = need_u32(j, path, "index");
        p.budget = need_u64(j, path, "budget");
    } else if (kind == "pump_rounds") {
        p.kind = Phase::Kind::pump_rounds;
        p.index = need_u32(j, path, "index");
        p.rounds = need_u32(j, path, "rounds");
        p.dr = parse_dr(need(j, path, "dr"), path + ".dr");
    } else if (kind == "script") {
        p.kind = Phase::Kind::script;
        const json& acts = need(j, path, "actions");
        if (!acts.is_array()) fail(path + ".actions", "expected an array");
        for (std::size_t k = 0; k < acts.size(); ++k)
            p.actions.push_back(parse_action(acts[k], path + ".actions[" + std::to_string(k) + "]"));
    } else {
        fail(path + ".phase", "unknown phase kind '" + kind + "'");
    }
    return p;
}

CheckSpec parse_check(const json& j, const std::string& path) {
    CheckSpec c;
    c.name = need_str(j, path, "check");
    c.expect_violation = get_bool(j, path, "expect_violation", false);
    if (j.contains("factor")) c.factor = need_double(j, path, "factor");
    if (j.contains("d")) c.d = need_u32(j, path, "d");
    if (j.contains("budget")) c.budget = need_u64(j, path, "budget");
    return c;
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> k = {
        "chain_length", "flood_greedy", "spread_lower", "insert_upper", "per_list",
        "global",       "query_mean",   "pump_exact",   "wallet",       "budget",
    };
    return k;
}

}  // namespace

Scenario parse_scenario(const json& j) {
    Scenario sc;
    sc.name = need_str(j, "$", "name");
    if (j.contains("table")) {
        const json& t = j.at("table");
        sc.table.index_count = static_cast<uint32_t>(get_u64(t, "$.table", "index_count", 1024));
        sc.table.hash_seed = get_u64(t, "$.table", "hash_seed", 0);
        sc.table.move_to_front = get_bool(t, "$.table", "move_to_front", true);
    }
    if (j.contains("backend")) {
        const json& b = j.at("backend");
        std::string kind = need_str(b, "$.backend", "kind");
        if (kind == "ledger") {
            sc.backend = rb::BackendKind::ledger;
        } else if (kind == "pow") {
            sc.backend = rb::BackendKind::pow;
            sc.pow_unit_bits = static_cast<uint32_t>(get_u64(b, "$.backend", "unit_bits", 56));
        } else {
            fail("$.backend.kind", "expected 'ledger' or 'pow'");
        }
    }
    sc.seed = get_u64(j, "$", "seed", 0);
    if (j.contains("budget")) sc.declared_budget = need_u64(j, "$", "budget");
    const json& phases = need(j, "$", "phases");
    if (!phases.is_array()) fail("$.phases", "expected an array");
    for (std::size_t i = 0; i < phases.size(); ++i)
        sc.phases.push_back(parse_phase(phases[i], "$.phases[" + std::to_string(i) + "]"));
    if (j.contains("checks")) {
        const json& checks = j.at("checks");
        if (!checks.is_array()) fail("$.checks", "expected an array");
        for (std::size_t i = 0; i < checks.size(); ++i)
            sc.checks.push_back(parse_check(checks[i], "$.checks[" + std::to_string(i) + "]"));
    }
    validate_scenario(sc);
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return parse_scenario(j);
}

void validate_scenario(const Scenario& sc) {
    const uint32_t t = sc.table.index_count;
    if (sc.name.empty()) fail("$.name", "must not be empty");
    if (t == 0) fail("$.table.index_count", "must be >= 1");
    if (sc.backend == rb::BackendKind::pow && (sc.pow_unit_bits < 1 || sc.pow_unit_bits > 63))
        fail("$.backend.unit_bits", "must be in [1, 63]");

    auto check_index = [&](uint32_t idx, const std::string& path) {
        if (idx >= t) fail(path, "index " + std::to_string(idx) + " out of range (index_count=" +
                                     std::to_string(t) + ")");
    };

    for (std::size_t i = 0; i < sc.phases.size(); ++i) {
        const Phase& p = sc.phases[i];
        std::string path = "$.phases[" + std::to_string(i) + "]";
        switch (p.kind) {
            case Phase::Kind::good_insert_at:
            case Phase::Kind::good_query_at:
            case Phase::Kind::flood:
            case Phase::Kind::probe:
            case Phase::Kind::pump_rounds:
                check_index(p.index, path + ".index");
                break;
            case Phase::Kind::good_inserts_each:
            case Phase::Kind::spread: {
                if (p.indices.empty()) fail(path + ".indices", "must not be empty");
                for (uint32_t idx : p.indices) check_index(idx, path + ".indices");
                std::vector<uint32_t> sorted = p.indices;
                std::sort(sorted.begin(), sorted.end());
                if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                    fail(path + ".indices", "must be distinct");
                if (p.kind == Phase::Kind::spread && p.count < p.indices.size())
                    fail(path + ".count", "needs at least one object per index");
                break;
            }
            case Phase::Kind::script:
                for (std::size_t k = 0; k < p.actions.size(); ++k) {
                    const ScriptAction& a = p.actions[k];
                    std::string apath = path + ".actions[" + std::to_string(k) + "]";
                    if (a.index) check_index(*a.index, apath + ".index");
                    switch (a.kind) {
                        case ScriptAction::Kind::bad_query:
                        case ScriptAction::Kind::bad_delete:
                            if (a.key && !is_directed_key(*a.key))
                                fail(apath + ".key_hex",
                                     "the adversary may only query or delete bad objects");
                            if (!a.key && (!a.index || !a.ordinal))
                                fail(apath, "needs key_hex or index+ordinal");
                            break;
                        case ScriptAction::Kind::bad_insert:
                        case ScriptAction::Kind::bad_probe:
                        case ScriptAction::Kind::flood:
                        case ScriptAction::Kind::pump:
                            if (!a.index) fail(apath + ".index", "missing required field");
                            break;
                        case ScriptAction::Kind::good_insert:
                        case ScriptAction::Kind::good_query:
                        case ScriptAction::Kind::good_delete:
                            break;
                    }
                }
                break;
            default:
                break;
        }
    }

    for (std::size_t i = 0; i < sc.checks.size(); ++i) {
        const CheckSpec& c = sc.checks[i];
        std::string path = "$.checks[" + std::to_string(i) + "]";
        if (std::find(known_checks().begin(), known_checks().end(), c.name) ==
            known_checks().end())
            fail(path + ".check", "unknown check '" + c.name + "'");
        if (c.name == "query_mean" && (!c.factor || *c.factor <= 0))
            fail(path + ".factor", "query_mean needs a positive factor");
        if (c.name == "pump_exact" && !c.d) fail(path + ".d", "pump_exact needs d");
        if (c.name == "budget" && !c.budget && !sc.declared_budget)
            fail(path + ".budget", "budget check needs a budget (inline or $.budget)");
        if (c.name == "wallet" && !sc.table.move_to_front)
            fail(path, "the wallet invariant is an analysis of move-to-front; enable it");
        if (c.name == "flood_greedy") {
            bool has_flood = std::any_of(sc.phases.begin(), sc.phases.end(), [](const Phase& p) {
                return p.kind == Phase::Kind::flood;
            });
            if (!has_flood) fail(path, "flood_greedy needs a flood phase");
        }
    }
}

std::vector<std::string> builtin_names() {
    return {
        "single-list-flood", "no-attack",          "mtf-pump-repeat", "mtf-pump-repeat-nomtf",
        "even-spread-inserts", "random-query",     "depth-pump",
    };
}

bool is_builtin(const std::string& name) {
    auto names = builtin_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

Scenario builtin_scenario(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.seed = 1;
    auto phase = [&](Phase p) { sc.phases.push_back(std::move(p)); };
    auto check = [&](const char* n) {
        CheckSpec c;
        c.name = n;
        sc.checks.push_back(c);
    };

    if (name == "single-list-flood") {
        sc.table = TableConfig{1024, 0x5eedf100d, true};
        Phase flood;
        flood.kind = Phase::Kind::flood;
        flood.index = 0;
        flood.budget = 1000000;
        phase(flood);
        Phase ins;
        ins.kind = Phase::Kind::good_insert_at;
        ins.index = 0;
        ins.count = 1;
        phase(ins);
        Phase qry;
        qry.kind = Phase::Kind::good_query_at;
        qry.index = 0;
        qry.count = 1;
        phase(qry);
        check("flood_greedy");
        check("chain_length");
        check("spread_lower");
        check("global");
        return sc;
    }
    if (name == "no-attack") {
        sc.table = TableConfig{1024, 0x5eedc1ea4, true};
        Phase ins;
        ins.kind = Phase::Kind::good_inserts;
        ins.count = 1024;
        phase(ins);
        Phase qry;
        qry.kind = Phase::Kind::good_queries;
        qry.count = 10240;
        phase(qry);
        CheckSpec qm;
        qm.name = "query_mean";
        qm.factor = 3.0;
        sc.checks.push_back(qm);
        check("per_list");
        check("global");
        check("wallet");
        check("chain_length");
        return sc;
    }
    if (name == "mtf-pump-repeat" || name == "mtf-pump-repeat-nomtf") {
        sc.table = TableConfig{16, 0x5eed9096, name == "mtf-pump-repeat"};
        Phase flood;
        flood.kind = Phase::Kind::flood;
        flood.index = 0;
        flood.budget = 2080;  // 64 bad objects on an empty list
        phase(flood);
        Phase ins;
        ins.kind = Phase::Kind::good_insert_at;
        ins.index = 0;
        ins.count = 1;
        phase(ins);
        Phase pump;
        pump.kind = Phase::Kind::pump_rounds;
        pump.index = 0;
        pump.rounds = 100;
        pump.dr.kind = DrSchedule::Kind::constant;
        pump.dr.value = 32;
        phase(pump);
        if (name == "mtf-pump-repeat") {
            check("per_list");
            check("global");
            check("wallet");
            check("chain_length");
        } else {
            CheckSpec pl;
            pl.name = "per_list";
            pl.expect_violation = true;  // the negative control: no splice, no amortization
            sc.checks.push_back(pl);
        }
        return sc;
    }
    if (name == "even-spread-inserts") {
        sc.table = TableConfig{128, 0x5eed54ead, true};
        Phase spread;
        spread.kind = Phase::Kind::spread;
        for (uint32_t i = 0; i < 64; ++i) spread.indices.push_back(i);
        spread.count = 4096;
        phase(spread);
        Phase ins;
        ins.kind = Phase::Kind::good_inserts_each;
        ins.indices = spread.indices;
        ins.count_each = 8;
        phase(ins);
        check("insert_upper");
        check("spread_lower");
        check("chain_length");
        check("global");
        return sc;
    }
    if (name == "random-query") {
        sc.table = TableConfig{256, 0x5eed4a4d, true};
        Phase flood;
        flood.kind = Phase::Kind::flood;
        flood.index = 0;
        flood.budget = 1000;
        phase(flood);
        Phase ins;
        ins.kind = Phase::Kind::good_inserts;
        ins.count = 256;
        phase(ins);
        Phase qry;
        qry.kind = Phase::Kind::good_queries;
        qry.auto_count = true;
        qry.auto_min = 10000;
        qry.auto_cap = 1000000;
        phase(qry);
        CheckSpec qm;
        qm.name = "query_mean";
        qm.factor = 3.0;
        sc.checks.push_back(qm);
        check("per_list");
        check("global");
        check("wallet");
        check("chain_length");
        return sc;
    }
    if (name == "depth-pump") {
        sc.table = TableConfig{4, 0x5eedd009, true};
        Phase ins;
        ins.kind = Phase::Kind::good_insert_at;
        ins.index = 0;
        ins.count = 1;
        phase(ins);
        Phase flood;
        flood.kind = Phase::Kind::flood;
        flood.index = 0;
        flood.budget = 560;  // exactly 32 bad objects behind the good one
        phase(flood);
        Phase pump;
        pump.kind = Phase::Kind::pump_rounds;
        pump.index = 0;
        pump.rounds = 1;
        pump.dr.kind = DrSchedule::Kind::constant;
        pump.dr.value = 32;
        phase(pump);
        CheckSpec pe;
        pe.name = "pump_exact";
        pe.d = 32;
        sc.checks.push_back(pe);
        check("wallet");
        check("global");
        check("chain_length");
        return sc;
    }
    throw ScenarioError("unknown builtin scenario '" + name + "'");
}

namespace {

struct RunState {
    Table* table = nullptr;
    RequestDriver* driver = nullptr;
    WorkloadGen* workload = nullptr;
    Adversary* adversary = nullptr;
    CostLedger* ledger = nullptr;
    GoodObjectStats* stats = nullptr;
    std::optional<uint64_t> flood_budget;
    std::optional<uint32_t> flood_index;
    std::optional<uint32_t> last_good_query_rb;
};

void run_script_action(RunState& rs, const ScriptAction& a) {
    switch (a.kind) {
        case ScriptAction::Kind::bad_insert:
            rs.adversary->script_insert(*a.index, *a.ordinal);
            return;
        case ScriptAction::Kind::bad_query:
            rs.adversary->script_query(a.key ? *a.key
                                             : Adversary::script_bad_key(*a.index, *a.ordinal));
            return;
        case ScriptAction::Kind::bad_delete:
            rs.adversary->script_delete(a.key ? *a.key
                                              : Adversary::script_bad_key(*a.index, *a.ordinal));
            return;
        case ScriptAction::Kind::bad_probe:
            rs.adversary->spurious_probe(*a.index, a.budget);
            return;
        case ScriptAction::Kind::flood:
            rs.adversary->single_list_flood(*a.index, a.budget);
            return;
        case ScriptAction::Kind::pump:
            rs.adversary->mtf_depth_pump(*a.index, a.d);
            return;
        case ScriptAction::Kind::good_insert:
            if (a.index)
                rs.workload->insert_at(*a.index);
            else
                rs.workload->insert_uar();
            return;
        case ScriptAction::Kind::good_query: {
            auto out = a.index ? rs.workload->query_at(*a.index) : rs.workload->query_uar();
            if (!out) throw ScenarioError("script good_query: no good object available");
            rs.last_good_query_rb = out->rb_charged;
            return;
        }
        case ScriptAction::Kind::good_delete:
            if (!rs.workload->delete_uar())
                throw ScenarioError("script good_delete: no good object available");
            return;
    }
}

void run_phase(RunState& rs, const Phase& p) {
    switch (p.kind) {
        case Phase::Kind::good_inserts:
            for (uint64_t i = 0; i < p.count; ++i) rs.workload->insert_uar();
            return;
        case Phase::Kind::good_insert_at:
            for (uint64_t i = 0; i < p.count; ++i) rs.workload->insert_at(p.index);
            return;
        case Phase::Kind::good_inserts_each:
            for (uint32_t idx : p.indices)
                for (uint32_t k = 0; k < p.count_each; ++k) rs.workload->insert_at(idx);
            return;
        case Phase::Kind::good_queries: {
            uint64_t n = p.count;
            if (p.auto_count) {
                uint64_t ell = rs.stats->ell_max();
                n = std::clamp(ell * ell * rs.ledger->adversary_rb(), p.auto_min, p.auto_cap);
            }
            for (uint64_t i = 0; i < n; ++i) {
                auto out = rs.workload->query_uar();
                if (!out) throw ScenarioError("good_queries: no good object live");
                rs.last_good_query_rb = out->rb_charged;
            }
            return;
        }
        case Phase::Kind::good_query_at:
            for (uint64_t i = 0; i < p.count; ++i) {
                auto out = rs.workload->query_at(p.index);
                if (!out) throw ScenarioError("good_query_at: no good object at index");
                rs.last_good_query_rb = out->rb_charged;
            }
            return;
        case Phase::Kind::good_deletes:
            for (uint64_t i = 0; i < p.count; ++i)
                if (!rs.workload->delete_uar())
                    throw ScenarioError("good_deletes: no good object live");
            return;
        case Phase::Kind::flood:
            if (!rs.flood_budget) {
                rs.flood_budget = p.budget;
                rs.flood_index = p.index;
            }
            rs.adversary->single_list_flood(p.index, p.budget);
            return;
        case Phase::Kind::spread:
            rs.adversary->even_spread(p.indices, p.count);
            return;
        case Phase::Kind::probe:
            rs.adversary->spurious_probe(p.index, p.budget);
            return;
        case Phase::Kind::pump_rounds: {
            std::optional<std::string> target;
            for (const auto& key : rs.table->bucket_keys(p.index)) {
                if (!is_directed_key(key)) {
                    target = key;
                    break;
                }
            }
            if (!target) throw ScenarioError("pump_rounds: no good object at index");
            for (uint32_t r = 1; r <= p.rounds; ++r) {
                uint32_t d = dr_at(p.dr, r);
                if (d > 0) rs.adversary->mtf_depth_pump(p.index, d, target);
                auto out = rs.driver->do_query(Principal::client, *target);
                if (out.kind != OutcomeKind::found)
                    throw ScenarioError("pump_rounds: target vanished");
                rs.last_good_query_rb = out.rb_charged;
            }
            return;
        }
        case Phase::Kind::script:
            for (const auto& a : p.actions) run_script_action(rs, a);
            return;
    }
}

}  // namespace

RunSummary run_scenario(const Scenario& sc_in, const RunOptions& opt) {
    Scenario sc = sc_in;
    if (opt.seed) sc.seed = *opt.seed;
    if (opt.backend) sc.backend = *opt.backend;
    validate_scenario(sc);
    for (auto& c : sc.checks)
        if (c.name == "budget" && !c.budget) c.budget = sc.declared_budget;

    rb::PowParams pow{uint64_t{1} << sc.pow_unit_bits};
    rb::ChallengeStore store(sc.backend, mix64(sc.seed ^ 0x73746f7265ull), pow);
    Table table(sc.table, store);
    CostLedger ledger(sc.table.index_count);
    GoodObjectStats stats(sc.table.index_count);
    RequestDriver driver(table, store, ledger, stats);
    WorkloadGen workload(driver, sc.seed);
    Adversary adversary(driver);
    WalletOracle wallets;

    bool attach = std::any_of(sc.checks.begin(), sc.checks.end(),
                              [](const CheckSpec& c) { return c.name == "wallet"; });
    if (attach) driver.attach_wallets(&wallets);
    driver.enable_trace(opt.trace);

    RunState rs;
    rs.table = &table;
    rs.driver = &driver;
    rs.workload = &workload;
    rs.adversary = &adversary;
    rs.ledger = &ledger;
    rs.stats = &stats;
    for (const Phase& p : sc.phases) run_phase(rs, p);

    uint32_t max_chain = 0;
    for (uint32_t i = 0; i < table.index_count(); ++i)
        max_chain = std::max(max_chain, table.bucket_length(i));

    BoundContext ctx;
    ctx.ledger = &ledger;
    ctx.stats = &stats;
    ctx.max_chain = max_chain;
    ctx.wallets = attach ? &wallets : nullptr;
    ctx.attack_spend = adversary.spend();
    ctx.pump_spend = adversary.pump_spend();
    ctx.flood_budget = rs.flood_budget;
    ctx.flood_index = rs.flood_index;
    ctx.last_good_query_rb = rs.last_good_query_rb;

    RunSummary s;
    s.scenario = sc.name;
    s.seed = sc.seed;
    s.backend = sc.backend == rb::BackendKind::ledger ? "ledger" : "pow";
    s.table = sc.table;
    s.good_inserts = ledger.good_inserts();
    s.good_queries = ledger.good_queries();
    s.good_deletes = ledger.good_deletes();
    s.bad_inserts = ledger.bad_inserts();
    s.bad_queries = ledger.bad_queries();
    s.bad_deletes = ledger.bad_deletes();
    s.settled = ledger.settled_requests();
    s.rejected = ledger.rejected_requests();
    s.algorithm_rb = ledger.algorithm_rb();
    s.algorithm_model_rb = ledger.algorithm_model_rb();
    s.algorithm_latency = ledger.algorithm_latency();
    s.adversary_rb = ledger.adversary_rb();
    s.ell_max = stats.ell_max();
    s.ell_ave = stats.ell_ave();
    s.targeted = stats.targeted_count();
    s.attacked = stats.attacked_count();
    s.max_chain = max_chain;
    s.live_objects = table.live_objects();
    s.free_probes = driver.ops().free_probes;
    s.query_redraws = driver.ops().query_redraws;
    s.pump_shortfall = driver.ops().pump_shortfall;
    s.unsettled_quotes = store.outstanding();
    s.attack_spend = adversary.spend();
    s.attack_placed = adversary.placed();
    s.attack_executed = adversary.executed();
    s.attack_shortfall = adversary.shortfall();
    s.client_meter = driver.meter(Principal::client);
    s.adversary_meter = driver.meter(Principal::adversary);
    s.server_verify_evals = store.verify_evals();
    s.wallets_attached = attach;
    s.wallet_violations = wallets.violations();
    for (uint32_t i = 0; i < sc.table.index_count; ++i) {
        PerIndexRow row{i,
                        ledger.adversary_rb_at(i),
                        ledger.good_insert_rb_at(i),
                        ledger.good_hits_at(i),
                        ledger.good_hit_rb_at(i),
                        ledger.good_inserts_at(i),
                        stats.max_good_at(i)};
        if (row.adversary_rb || row.good_insert_rb || row.good_hits || row.good_inserts ||
            row.max_good)
            s.per_index.push_back(row);
    }
    s.checks = evaluate_checks(sc.checks, ctx);
    s.all_as_expected = std::all_of(s.checks.begin(), s.checks.end(),
                                    [](const CheckResult& r) { return r.as_expected; });
    if (opt.trace) s.trace = driver.trace();
    return s;
}

std::string key_hex(std::string_view key) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(key.size() * 2);
    for (unsigned char c : key) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

namespace {

ordered_json meter_json(const rb::WorkMeter& m) {
    ordered_json j;
    j["ledger_debits"] = m.ledger_debits;
    j["hash_evals"] = m.hash_evals;
    j["challenges_solved"] = m.challenges_solved;
    j["hardness_solved"] = m.hardness_solved;
    return j;
}

}  // namespace

ordered_json summary_json(const RunSummary& s) {
    ordered_json j;
    j["schema_version"] = s.schema_version;
    j["scenario"] = s.scenario;
    j["seed"] = s.seed;
    j["backend"] = s.backend;
    j["table"] = ordered_json{{"index_count", s.table.index_count},
                              {"hash_seed", s.table.hash_seed},
                              {"move_to_front", s.table.move_to_front}};
    j["counts"] = ordered_json{{"good_inserts", s.good_inserts},
                               {"good_queries", s.good_queries},
                               {"good_deletes", s.good_deletes},
                               {"bad_inserts", s.bad_inserts},
                               {"bad_queries", s.bad_queries},
                               {"bad_deletes", s.bad_deletes},
                               {"settled", s.settled},
                               {"rejected", s.rejected}};
    j["rb"] = ordered_json{{"algorithm", s.algorithm_rb},
                           {"algorithm_model", s.algorithm_model_rb},
                           {"algorithm_latency", s.algorithm_latency},
                           {"adversary", s.adversary_rb}};
    j["stats"] = ordered_json{{"ell_max", s.ell_max},
                              {"ell_ave", s.ell_ave},
                              {"targeted", s.targeted},
                              {"attacked", s.attacked},
                              {"max_chain", s.max_chain},
                              {"live_objects", s.live_objects}};
    j["ops"] = ordered_json{{"free_probes", s.free_probes},
                            {"query_redraws", s.query_redraws},
                            {"pump_shortfall", s.pump_shortfall},
                            {"unsettled_quotes", s.unsettled_quotes}};
    j["attack"] = ordered_json{{"spend", s.attack_spend},
                               {"placed", s.attack_placed},
                               {"executed", s.attack_executed},
                               {"shortfall", s.attack_shortfall}};
    j["meters"] = ordered_json{{"client", meter_json(s.client_meter)},
                               {"adversary", meter_json(s.adversary_meter)},
                               {"server_verify_evals", s.server_verify_evals}};
    j["wallets"] = ordered_json{{"attached", s.wallets_attached},
                                {"violations", s.wallet_violations}};
    ordered_json per_index = ordered_json::array();
    for (const auto& row : s.per_index) {
        per_index.push_back(ordered_json{{"index", row.index},
                                         {"adversary_rb", row.adversary_rb},
                                         {"good_insert_rb", row.good_insert_rb},
                                         {"good_hits", row.good_hits},
                                         {"good_hit_rb", row.good_hit_rb},
                                         {"good_inserts", row.good_inserts},
                                         {"max_good", row.max_good}});
    }
    j["per_index"] = per_index;
    ordered_json checks = ordered_json::array();
    for (const auto& c : s.checks) {
        checks.push_back(ordered_json{{"name", c.name},
                                      {"bound", c.bound},
                                      {"measured", c.measured},
                                      {"satisfied", c.satisfied},
                                      {"expect_violation", c.expect_violation},
                                      {"as_expected", c.as_expected},
                                      {"detail", c.detail}});
    }
    j["checks"] = checks;
    j["all_as_expected"] = s.all_as_expected;
    return j;
}

namespace {

void flatten(const ordered_json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
        return;
    }
    out += prefix;
    out += ',';
    out += j.dump();
    out += '\n';
}

}  // namespace

std::string summary_csv(const RunSummary& s) {
    std::string out = "field,value\n";
    flatten(summary_json(s), "", out);
    return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out = "seq,principal,op,index,outcome,reject,rb_charged,latency,depth_before,key\n";
    for (const auto& r : rows) {
        out += std::to_string(r.seq);
        out += ',';
        out += to_string(r.who);
        out += ',';
        out += to_string(r.op);
        out += ',';
        out += std::to_string(r.index);
        out += ',';
        out += to_string(r.outcome);
        out += ',';
        out += to_string(r.reject);
        out += ',';
        out += std::to_string(r.rb_charged);
        out += ',';
        out += std::to_string(r.latency);
        out += ',';
        out += r.depth_before ? std::to_string(*r.depth_before) : std::string();
        out += ',';
        out += key_hex(r.key);
        out += '\n';
    }
    return out;
}

}  // namespace depthcharge
