#include "depthcharge/wallet_oracle.hpp"

#include <stdexcept>

#include "depthcharge/keys.hpp"

namespace depthcharge {

void WalletOracle::set_balance(const std::string& key, uint64_t dollars) {
    wallets_[key] = dollars;
}

uint64_t WalletOracle::balance(const std::string& key) const {
    auto it = wallets_.find(key);
    return it == wallets_.end() ? 0 : it->second;
}

void WalletOracle::note_violation(uint64_t seq, const std::string& key, uint32_t depth,
                                  uint64_t wallet) {
    ++violations_;
    if (!first_) first_ = Violation{seq, key, depth, wallet};
}

void WalletOracle::apply(uint64_t seq, const SettledRecord& r, const std::string& req_key,
                         const std::vector<std::string>& before,
                         const std::vector<std::string>& after) {
    std::unordered_map<std::string, uint32_t> before_depth;
    for (uint32_t i = 0; i < before.size(); ++i)
        if (!is_directed_key(before[i])) before_depth.emplace(before[i], i + 1);

    const bool good_request = !r.directed_key;
    if (good_request && r.outcome == OutcomeKind::inserted) {
        if (r.who != Principal::client)
            throw std::logic_error("good insert settled by the adversary");
        // rb_charged is L+1; the full deposit is twice that.
        wallets_[req_key] = uint64_t{2} * r.rb_charged;
    }
    if (good_request && r.outcome == OutcomeKind::found) {
        if (r.who != Principal::client)
            throw std::logic_error("good query settled by the adversary");
        wallets_[req_key] = 1;  // emptied for the depth charge, restarts with one dollar
    }
    if (good_request && r.outcome == OutcomeKind::deleted) wallets_.erase(req_key);

    // Displacement deposits, then the invariant sweep over the after state.
    for (uint32_t i = 0; i < after.size(); ++i) {
        const std::string& key = after[i];
        if (is_directed_key(key)) continue;
        uint32_t depth = i + 1;
        auto prev = before_depth.find(key);
        if (prev != before_depth.end() && depth > prev->second) {
            uint64_t delta = depth - prev->second;
            wallets_[key] += delta;
            displacement_deposits_ += delta;
        }
        uint64_t w = balance(key);
        if (w < depth) note_violation(seq, key, depth, w);
    }
}

}  // namespace depthcharge
