#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depthcharge/driver.hpp"

namespace depthcharge {

struct AttackOutcome {
    uint64_t spend = 0;      // hardness burned by this action
    uint64_t placed = 0;     // bad objects inserted
    uint64_t executed = 0;   // bad queries / probes performed
    uint64_t shortfall = 0;  // requested actions that had no material to act on
};

// The attack strategies. Every request goes through the driver and is metered
// like any other; strategies may freely read table snapshots before acting
// (the model grants the adversary full knowledge of the table state), but
// they only ever insert, query, or delete directed (bad) keys.
class Adversary {
public:
    explicit Adversary(RequestDriver& driver);

    // Greedy flood of one index: keeps inserting while the next quote fits
    // the remaining budget. Spend is exactly sum_{j=1}^{placed} (L_j + 1).
    AttackOutcome single_list_flood(uint32_t index, uint64_t budget);

    // Places `total` bad objects across the given indices, counts differing
    // by at most one, round robin. Requires total >= indices.size(); this is
    // the provably cheapest way to hit that many distinct indices.
    AttackOutcome even_spread(const std::vector<uint32_t>& indices, uint64_t total);

    // Raises the target good object's depth by up to `d`, one bad query at a
    // time, always querying the bad object sitting immediately below the
    // target: the cheapest schedule for depth-raising a single object. Steps
    // with no bad object below the target are recorded as shortfall. With no
    // explicit target, the shallowest good object at the index is used.
    AttackOutcome mtf_depth_pump(uint32_t index, uint32_t d,
                                 std::optional<std::string> target = std::nullopt);

    // Membership tests for absent keys at one index, each costing the full
    // chain length, while the budget lasts. On an empty bucket a probe is
    // free of charge, so a single probe is recorded and the action stops.
    AttackOutcome spurious_probe(uint32_t index, uint64_t budget);

    // Key for a script-declared bad object; ordinals live in their own range
    // so they never collide with strategy-generated keys.
    static std::string script_bad_key(uint32_t index, uint32_t ordinal);

    // Single scripted requests, metered like the strategies.
    RequestOutcome script_insert(uint32_t index, uint32_t ordinal);
    RequestOutcome script_query(const std::string& key);
    RequestOutcome script_delete(const std::string& key);

    uint64_t spend() const { return spend_; }
    uint64_t placed() const { return placed_; }
    uint64_t executed() const { return executed_; }
    uint64_t shortfall() const { return shortfall_; }
    // Spend by pump actions alone, for the pump cost identity check.
    uint64_t pump_spend() const { return pump_spend_; }

    std::string fresh_bad_key(uint32_t index);

private:
    std::string fresh_probe_key(uint32_t index);
    void absorb(const AttackOutcome& out);

    RequestDriver& d_;
    uint64_t spend_ = 0;
    uint64_t placed_ = 0;
    uint64_t executed_ = 0;
    uint64_t shortfall_ = 0;
    uint64_t pump_spend_ = 0;
    uint32_t insert_counter_ = 0;
    uint32_t probe_counter_ = 0;
};

}  // namespace depthcharge
