#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depthcharge/table.hpp"

namespace depthcharge {

enum class Principal : uint8_t { client = 0, adversary = 1 };

const char* to_string(Principal p);
const char* to_string(rb::OpKind op);

// One settled request as seen by the bookkeeping. `directed_key` marks
// attack-manufactured keys; the table itself never looks at this flag, only
// the harness does, so the served path stays label-blind.
struct SettledRecord {
    Principal who = Principal::client;
    rb::OpKind op = rb::OpKind::query;
    OutcomeKind outcome = OutcomeKind::rejected;
    uint32_t index = 0;
    uint32_t rb_charged = 0;
    uint32_t latency = 0;
    bool directed_key = false;
    std::optional<uint32_t> depth_before;
};

// Exact tallies of burned hardness, traversal latency, and request counts,
// per principal and per index. Totals include every settled request; the
// "model" accessors restrict to the well-behaved client traffic the closed
// form bounds speak about (accepted inserts, hit queries, hit deletes).
class CostLedger {
public:
    explicit CostLedger(uint32_t index_count);

    void record(const SettledRecord& r);

    uint32_t index_count() const { return static_cast<uint32_t>(by_index_.size()); }

    // Client side.
    uint64_t algorithm_rb() const { return algorithm_rb_; }
    uint64_t algorithm_latency() const { return algorithm_latency_; }
    uint64_t good_inserts() const { return good_inserts_; }    // I
    uint64_t good_queries() const { return good_queries_; }    // Q, hits and misses
    uint64_t good_deletes() const { return good_deletes_; }    // D
    uint64_t good_insert_rb() const { return good_insert_rb_; }
    // Accepted inserts plus hit queries/deletes only.
    uint64_t algorithm_model_rb() const { return good_insert_rb_ + good_hit_rb_total_; }

    // Adversary side.
    uint64_t adversary_rb() const { return adversary_rb_; }  // B
    uint64_t bad_inserts() const { return bad_inserts_; }    // accepted
    uint64_t bad_queries() const { return bad_queries_; }
    uint64_t bad_deletes() const { return bad_deletes_; }

    uint64_t settled_requests() const { return settled_; }
    uint64_t rejected_requests() const { return rejected_; }

    // Per index. Hit columns count client queries and deletes that found
    // their object; the per-list amortized bound is stated over those.
    uint64_t adversary_rb_at(uint32_t i) const { return by_index_[i].adversary_rb; }
    uint64_t good_insert_rb_at(uint32_t i) const { return by_index_[i].good_insert_rb; }
    uint64_t good_hits_at(uint32_t i) const { return by_index_[i].good_hits; }
    uint64_t good_hit_rb_at(uint32_t i) const { return by_index_[i].good_hit_rb; }
    uint64_t good_inserts_at(uint32_t i) const { return by_index_[i].good_inserts; }

private:
    struct PerIndex {
        uint64_t adversary_rb = 0;   // B_i
        uint64_t good_insert_rb = 0; // client insert spend landing here
        uint64_t good_hits = 0;      // client found queries + deletes, q_i
        uint64_t good_hit_rb = 0;
        uint64_t good_inserts = 0;
    };

    uint64_t algorithm_rb_ = 0;
    uint64_t algorithm_latency_ = 0;
    uint64_t good_inserts_ = 0;
    uint64_t good_queries_ = 0;
    uint64_t good_deletes_ = 0;
    uint64_t good_insert_rb_ = 0;
    uint64_t good_hit_rb_total_ = 0;
    uint64_t adversary_rb_ = 0;
    uint64_t bad_inserts_ = 0;
    uint64_t bad_queries_ = 0;
    uint64_t bad_deletes_ = 0;
    uint64_t settled_ = 0;
    uint64_t rejected_ = 0;
    std::vector<PerIndex> by_index_;
};

// Tracks how good (client-inserted) and bad (directed-key) objects populate
// the indices. Per-index good counts are kept both live and as a running
// maximum; the bounds use the running maximum, the pessimistic reading.
class GoodObjectStats {
public:
    explicit GoodObjectStats(uint32_t index_count);

    void on_insert(uint32_t index, bool directed);
    void on_remove(uint32_t index, bool directed);

    uint32_t index_count() const { return static_cast<uint32_t>(per_.size()); }
    uint32_t live_good_at(uint32_t i) const { return per_[i].live_good; }
    uint32_t max_good_at(uint32_t i) const { return per_[i].max_good; }  // ell_i
    uint64_t live_bad_at(uint32_t i) const { return per_[i].live_bad; }
    uint64_t bad_inserts_at(uint32_t i) const { return per_[i].cum_bad_inserts; }

    uint32_t ell_max() const { return ell_max_; }
    // Mean of the per-index running maxima over all indices.
    double ell_ave() const;

    // Attacked: received at least one bad insert. Targeted: attacked and ever
    // held a good object.
    uint32_t attacked_count() const;
    uint32_t targeted_count() const;
    std::vector<uint32_t> targeted_indices() const;
    uint64_t bad_inserts_in_targeted() const;

private:
    struct PerIndex {
        uint32_t live_good = 0;
        uint32_t max_good = 0;
        uint64_t live_bad = 0;
        uint64_t cum_bad_inserts = 0;
    };
    std::vector<PerIndex> per_;
    uint32_t ell_max_ = 0;
    uint64_t sum_max_good_ = 0;
};

}  // namespace depthcharge
