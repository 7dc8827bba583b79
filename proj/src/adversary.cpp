#include "depthcharge/adversary.hpp"

#include <algorithm>
#include <stdexcept>

#include "depthcharge/keys.hpp"

namespace depthcharge {

namespace {
// Counter ranges keep strategy inserts, probe keys, and script-declared keys
// disjoint within a run.
constexpr uint32_t kProbeBase = 0x80000000u;
constexpr uint32_t kScriptBase = 0x40000000u;
}  // namespace

Adversary::Adversary(RequestDriver& driver) : d_(driver) {}

std::string Adversary::fresh_bad_key(uint32_t index) {
    if (insert_counter_ >= kScriptBase) throw std::logic_error("bad-key counter exhausted");
    return directed_key(index, insert_counter_++);
}

std::string Adversary::fresh_probe_key(uint32_t index) {
    return directed_key(index, kProbeBase + probe_counter_++);
}

std::string Adversary::script_bad_key(uint32_t index, uint32_t ordinal) {
    if (ordinal >= kProbeBase - kScriptBase)
        throw std::invalid_argument("script ordinal out of range");
    return directed_key(index, kScriptBase + ordinal);
}

void Adversary::absorb(const AttackOutcome& out) {
    spend_ += out.spend;
    placed_ += out.placed;
    executed_ += out.executed;
    shortfall_ += out.shortfall;
}

AttackOutcome Adversary::single_list_flood(uint32_t index, uint64_t budget) {
    AttackOutcome out;
    uint64_t remaining = budget;
    for (;;) {
        uint64_t cost = uint64_t{d_.table().bucket_length(index)} + 1;
        if (cost > remaining) break;
        auto res = d_.do_insert(Principal::adversary, fresh_bad_key(index), index);
        if (res.kind != OutcomeKind::inserted)
            throw std::logic_error("flood insert rejected");
        out.spend += res.rb_charged;
        remaining -= res.rb_charged;
        ++out.placed;
    }
    absorb(out);
    return out;
}

AttackOutcome Adversary::even_spread(const std::vector<uint32_t>& indices, uint64_t total) {
    if (indices.empty()) throw std::invalid_argument("even_spread needs at least one index");
    if (total < indices.size())
        throw std::invalid_argument("even_spread needs at least one object per index");
    std::vector<uint32_t> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("even_spread indices must be distinct");

    const uint64_t s = indices.size();
    const uint64_t base = total / s;
    const uint64_t extra = total % s;  // first `extra` indices get one more
    AttackOutcome out;
    for (uint64_t round = 0; round < base + (extra > 0 ? 1 : 0); ++round) {
        for (uint64_t k = 0; k < s; ++k) {
            uint64_t quota = base + (k < extra ? 1 : 0);
            if (round >= quota) continue;
            auto res = d_.do_insert(Principal::adversary, fresh_bad_key(indices[k]), indices[k]);
            if (res.kind != OutcomeKind::inserted)
                throw std::logic_error("spread insert rejected");
            out.spend += res.rb_charged;
            ++out.placed;
        }
    }
    absorb(out);
    return out;
}

AttackOutcome Adversary::mtf_depth_pump(uint32_t index, uint32_t d,
                                        std::optional<std::string> target) {
    AttackOutcome out;
    if (d == 0) return out;
    if (!target) {
        for (const auto& key : d_.table().bucket_keys(index)) {
            if (!is_directed_key(key)) {
                target = key;
                break;
            }
        }
    }
    if (!target) {
        out.shortfall = d;
        d_.ops().pump_shortfall += d;
        absorb(out);
        return out;
    }
    for (uint32_t j = 0; j < d; ++j) {
        auto keys = d_.table().bucket_keys(index);
        auto it = std::find(keys.begin(), keys.end(), *target);
        std::size_t pos = static_cast<std::size_t>(it - keys.begin());
        if (it == keys.end() || pos + 1 >= keys.size() || !is_directed_key(keys[pos + 1])) {
            // Target gone, at the tail, or a good object directly below it:
            // the canonical schedule has nothing legal to query.
            out.shortfall += d - j;
            d_.ops().pump_shortfall += d - j;
            break;
        }
        auto res = d_.do_query(Principal::adversary, keys[pos + 1]);
        if (res.kind != OutcomeKind::found) throw std::logic_error("pump query missed");
        out.spend += res.rb_charged;
        ++out.executed;
    }
    pump_spend_ += out.spend;
    absorb(out);
    return out;
}

RequestOutcome Adversary::script_insert(uint32_t index, uint32_t ordinal) {
    auto res = d_.do_insert(Principal::adversary, script_bad_key(index, ordinal), index);
    spend_ += res.rb_charged;
    if (res.kind == OutcomeKind::inserted) ++placed_;
    return res;
}

RequestOutcome Adversary::script_query(const std::string& key) {
    auto res = d_.do_query(Principal::adversary, key);
    spend_ += res.rb_charged;
    ++executed_;
    return res;
}

RequestOutcome Adversary::script_delete(const std::string& key) {
    auto res = d_.do_erase(Principal::adversary, key);
    spend_ += res.rb_charged;
    ++executed_;
    return res;
}

AttackOutcome Adversary::spurious_probe(uint32_t index, uint64_t budget) {
    AttackOutcome out;
    uint64_t remaining = budget;
    for (;;) {
        uint64_t len = d_.table().bucket_length(index);
        if (len == 0) {
            // Free of charge, and would stay free forever; probe once so the
            // traversal is on record, then stop.
            auto res = d_.do_query(Principal::adversary, fresh_probe_key(index));
            if (res.kind != OutcomeKind::not_found) throw std::logic_error("probe hit an object");
            ++out.executed;
            break;
        }
        if (len > remaining) break;
        auto res = d_.do_query(Principal::adversary, fresh_probe_key(index));
        if (res.kind != OutcomeKind::not_found) throw std::logic_error("probe hit an object");
        out.spend += res.rb_charged;
        remaining -= res.rb_charged;
        ++out.executed;
    }
    absorb(out);
    return out;
}

}  // namespace depthcharge
