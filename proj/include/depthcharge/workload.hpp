#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "depthcharge/driver.hpp"

namespace depthcharge {

// Good-client request generation. Keys are fresh random byte strings, so the
// destination index of an insert is uniform; queries draw an index uniformly
// and redraw until they land on one that holds a good object, so every query
// names an object that exists. The generator keeps its own locator of live
// good keys — harness state, not table state — for uniform sampling.
class WorkloadGen {
public:
    WorkloadGen(RequestDriver& driver, uint64_t seed);

    RequestOutcome insert_uar();
    // Fresh random keys redrawn until one hashes to `index`; models
    // conditioning on where good keys landed, still through the normal path.
    RequestOutcome insert_at(uint32_t index);

    // nullopt when no good object is live anywhere (or at `index`).
    std::optional<RequestOutcome> query_uar();
    std::optional<RequestOutcome> query_at(uint32_t index);
    std::optional<RequestOutcome> delete_uar();

    RequestOutcome query_key(std::string_view key);
    RequestOutcome erase_key(std::string_view key);

    uint64_t live_goods() const { return all_.size(); }
    const std::vector<std::string>& goods_at(uint32_t index) const { return by_index_[index]; }
    std::mt19937_64& rng() { return rng_; }

private:
    struct Loc {
        uint32_t index;
        uint32_t pos_all;
        uint32_t pos_index;
    };

    uint32_t draw(uint32_t n) { return bounded(rng_(), n); }
    void track(const std::string& key, uint32_t index);
    void untrack(const std::string& key);

    RequestDriver& d_;
    std::mt19937_64 rng_;
    std::vector<std::string> all_;
    std::vector<std::vector<std::string>> by_index_;
    std::unordered_map<std::string, Loc> where_;
};

}  // namespace depthcharge
