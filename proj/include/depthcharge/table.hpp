#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "depthcharge/keys.hpp"
#include "depthcharge/rb.hpp"

namespace depthcharge {

struct TableConfig {
    uint32_t index_count = 1024;  // fixed for the table's lifetime, no resizing
    uint64_t hash_seed = 0;
    // Disable only for negative-control experiments; the defense's query
    // amortization depends on the splice.
    bool move_to_front = true;
};

enum class OutcomeKind : uint8_t { inserted, found, not_found, deleted, rejected };

enum class RejectReason : uint8_t {
    none,
    unknown_challenge,
    expired,
    binding_mismatch,
    bad_proof,
    duplicate_key,
};

const char* to_string(OutcomeKind k);
const char* to_string(RejectReason r);

struct RequestOutcome {
    OutcomeKind kind = OutcomeKind::rejected;
    RejectReason reject = RejectReason::none;
    uint32_t latency = 0;     // list nodes traversed servicing the request
    uint32_t rb_charged = 0;  // hardness redeemed at settlement
    std::optional<uint32_t> depth_before;  // 1-based, set for found/deleted
};

// Priced admission ticket for one request. Hardness is fixed here and honored
// at settlement even if the bucket changed in between; a zero hardness
// (membership test on an empty bucket) carries no challenge.
struct Quote {
    rb::OpKind op = rb::OpKind::query;
    uint32_t index = 0;
    uint32_t hardness = 0;
    bool present = false;  // membership at quote time, for query/erase quotes
    std::optional<rb::Challenge> challenge;
};

struct TableSnapshot {
    std::vector<uint32_t> lengths;
    std::vector<std::vector<std::string>> buckets;  // keys in depth order, head first
    std::vector<bool> tail_ok;
    uint64_t live_objects = 0;
};

// Chained hash table that prices every request in resource-burning hardness:
// an insert costs one more than the destination chain's length and lands at
// the tail, a successful query costs the object's depth and splices it to the
// head, a miss costs the full chain length. Deletes are priced like queries.
// Settlement verifies the challenge solution through the shared store; a
// failed attempt consumes the challenge and the request must be re-quoted.
class Table {
public:
    Table(TableConfig cfg, rb::ChallengeStore& store);
    Table(const Table& other);  // deep copy, shares other's challenge store
    Table(const Table& other, rb::ChallengeStore& store);
    Table& operator=(const Table&) = delete;
    ~Table();

    const TableConfig& config() const { return cfg_; }
    uint32_t index_count() const { return cfg_.index_count; }
    uint64_t live_objects() const { return live_.size(); }

    // Directed keys resolve to their embedded index (modeling an adversary
    // that manufactures collisions); everything else takes the seeded hash.
    uint32_t hash_index(std::string_view key) const;

    uint32_t bucket_length(uint32_t index) const;  // throws std::out_of_range
    std::vector<std::string> bucket_keys(uint32_t index) const;
    bool contains(std::string_view key) const;
    // Read-only locate for harness and strategy code; the charged path never
    // uses it.
    std::optional<uint32_t> depth_of(std::string_view key) const;
    TableSnapshot snapshot() const;

    Quote quote_insert(uint32_t index, std::string_view key);
    Quote quote_query(std::string_view key);
    Quote quote_erase(std::string_view key);

    RequestOutcome settle_insert(const Quote& q, std::string_view key, const rb::Solution& sol);
    RequestOutcome settle_query(const Quote& q, std::string_view key, const rb::Solution& sol);
    RequestOutcome settle_erase(const Quote& q, std::string_view key, const rb::Solution& sol);

private:
    struct Node {
        std::string key;
        Node* prev = nullptr;
        Node* next = nullptr;
    };
    struct Bucket {
        Node* head = nullptr;
        Node* tail = nullptr;
        uint32_t len = 0;
    };

    struct TransparentHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    Node* find_in_bucket(const Bucket& b, std::string_view key, uint32_t& depth) const;
    Quote quote_lookup(std::string_view key, rb::OpKind op);
    void append_tail(Bucket& b, std::string_view key);
    void splice_to_head(Bucket& b, Node* n);
    void unlink(Bucket& b, Node* n);
    std::optional<RejectReason> redeem(const Quote& q, rb::OpKind op, std::string_view key,
                                       const rb::Solution& sol);
    void copy_from(const Table& other);
    void check_index(uint32_t index) const;

    TableConfig cfg_;
    rb::ChallengeStore* store_;
    std::vector<Bucket> buckets_;
    // Duplicate-key admission check only; never used to locate entries, so the
    // service path still pays full traversal for every lookup.
    std::unordered_set<std::string, TransparentHash, std::equal_to<>> live_;
};

}  // namespace depthcharge
