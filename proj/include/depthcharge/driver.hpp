#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthcharge/accounting.hpp"
#include "depthcharge/table.hpp"
#include "depthcharge/wallet_oracle.hpp"

namespace depthcharge {

struct TraceRow {
    uint64_t seq = 0;
    Principal who = Principal::client;
    rb::OpKind op = rb::OpKind::query;
    uint32_t index = 0;
    OutcomeKind outcome = OutcomeKind::rejected;
    RejectReason reject = RejectReason::none;
    uint32_t rb_charged = 0;
    uint32_t latency = 0;
    std::optional<uint32_t> depth_before;
    std::string key;
};

// Request-shaped noise that falls outside the charged-cost model: traversals
// the accounting does not bill anywhere.
struct OpsMetrics {
    uint64_t free_probes = 0;     // settled zero-hard membership tests
    uint64_t query_redraws = 0;   // workload index redraws (no good object there)
    uint64_t pump_shortfall = 0;  // pump steps skipped for lack of material
};

// Runs one request end to end — quote, solve, settle — then updates the
// ledger, the occupancy stats, the optional wallet oracle, and the trace.
// Also enforces the harness role split: adversary requests use directed keys,
// client requests use ordinary keys, with no exceptions. The table itself
// never sees these labels.
class RequestDriver {
public:
    RequestDriver(Table& table, rb::ChallengeStore& store, CostLedger& ledger,
                  GoodObjectStats& stats);

    RequestOutcome do_insert(Principal who, std::string_view key, uint32_t index);
    RequestOutcome do_query(Principal who, std::string_view key);
    RequestOutcome do_erase(Principal who, std::string_view key);

    rb::WorkMeter& meter(Principal who) {
        return who == Principal::client ? client_meter_ : adversary_meter_;
    }
    const rb::WorkMeter& meter(Principal who) const {
        return who == Principal::client ? client_meter_ : adversary_meter_;
    }

    OpsMetrics& ops() { return ops_; }
    const OpsMetrics& ops() const { return ops_; }

    void attach_wallets(WalletOracle* oracle) { wallets_ = oracle; }
    WalletOracle* wallets() const { return wallets_; }

    void enable_trace(bool on) { trace_enabled_ = on; }
    const std::vector<TraceRow>& trace() const { return trace_; }

    uint64_t settled() const { return seq_; }
    uint64_t settled_with_challenge() const { return settled_with_challenge_; }

    Table& table() { return table_; }
    const Table& table() const { return table_; }

private:
    RequestOutcome settle(Principal who, rb::OpKind op, std::string_view key, Quote q);
    void enforce_roles(Principal who, rb::OpKind op, std::string_view key) const;

    Table& table_;
    rb::ChallengeStore& store_;
    CostLedger& ledger_;
    GoodObjectStats& stats_;
    rb::WorkMeter client_meter_;
    rb::WorkMeter adversary_meter_;
    OpsMetrics ops_;
    WalletOracle* wallets_ = nullptr;
    bool trace_enabled_ = false;
    std::vector<TraceRow> trace_;
    uint64_t seq_ = 0;
    uint64_t settled_with_challenge_ = 0;
};

}  // namespace depthcharge
