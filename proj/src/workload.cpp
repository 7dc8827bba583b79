#include "depthcharge/workload.hpp"

#include <stdexcept>

#include "depthcharge/keys.hpp"

namespace depthcharge {

WorkloadGen::WorkloadGen(RequestDriver& driver, uint64_t seed)
    : d_(driver), rng_(mix64(seed ^ 0x676f6f64636c6900ull)) {
    by_index_.resize(d_.table().index_count());
}

void WorkloadGen::track(const std::string& key, uint32_t index) {
    Loc loc{index, static_cast<uint32_t>(all_.size()),
            static_cast<uint32_t>(by_index_[index].size())};
    all_.push_back(key);
    by_index_[index].push_back(key);
    where_.emplace(key, loc);
}

void WorkloadGen::untrack(const std::string& key) {
    auto it = where_.find(key);
    if (it == where_.end()) throw std::logic_error("untracked good key");
    Loc loc = it->second;
    where_.erase(it);

    all_[loc.pos_all] = all_.back();
    if (loc.pos_all + 1 != all_.size()) where_[all_[loc.pos_all]].pos_all = loc.pos_all;
    all_.pop_back();

    auto& bucket = by_index_[loc.index];
    bucket[loc.pos_index] = bucket.back();
    if (loc.pos_index + 1 != bucket.size()) where_[bucket[loc.pos_index]].pos_index = loc.pos_index;
    bucket.pop_back();
}

RequestOutcome WorkloadGen::insert_uar() {
    std::string key = random_key(rng_);
    uint32_t index = d_.table().hash_index(key);
    auto out = d_.do_insert(Principal::client, key, index);
    if (out.kind != OutcomeKind::inserted)
        throw std::logic_error("fresh random key rejected on insert");
    track(key, index);
    return out;
}

RequestOutcome WorkloadGen::insert_at(uint32_t index) {
    if (index >= d_.table().index_count()) throw std::out_of_range("insert_at index");
    std::string key = random_key(rng_);
    while (d_.table().hash_index(key) != index) key = random_key(rng_);
    auto out = d_.do_insert(Principal::client, key, index);
    if (out.kind != OutcomeKind::inserted)
        throw std::logic_error("fresh random key rejected on insert");
    track(key, index);
    return out;
}

std::optional<RequestOutcome> WorkloadGen::query_uar() {
    if (all_.empty()) return std::nullopt;
    for (;;) {
        uint32_t index = draw(d_.table().index_count());
        if (by_index_[index].empty()) {
            ++d_.ops().query_redraws;
            continue;
        }
        const auto& bucket = by_index_[index];
        return d_.do_query(Principal::client, bucket[draw(static_cast<uint32_t>(bucket.size()))]);
    }
}

std::optional<RequestOutcome> WorkloadGen::query_at(uint32_t index) {
    const auto& bucket = by_index_.at(index);
    if (bucket.empty()) return std::nullopt;
    return d_.do_query(Principal::client, bucket[draw(static_cast<uint32_t>(bucket.size()))]);
}

std::optional<RequestOutcome> WorkloadGen::delete_uar() {
    if (all_.empty()) return std::nullopt;
    std::string key = all_[draw(static_cast<uint32_t>(all_.size()))];
    auto out = d_.do_erase(Principal::client, key);
    if (out.kind != OutcomeKind::deleted) throw std::logic_error("tracked good key missing");
    untrack(key);
    return out;
}

RequestOutcome WorkloadGen::query_key(std::string_view key) {
    return d_.do_query(Principal::client, key);
}

RequestOutcome WorkloadGen::erase_key(std::string_view key) {
    std::string k(key);
    auto out = d_.do_erase(Principal::client, k);
    if (out.kind == OutcomeKind::deleted && where_.count(k) != 0) untrack(k);
    return out;
}

}  // namespace depthcharge
