#include "depthcharge/rb.hpp"

#include <chrono>
#include <stdexcept>

namespace depthcharge::rb {

const char* to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::ok: return "ok";
        case VerifyStatus::unknown_challenge: return "unknown_challenge";
        case VerifyStatus::expired: return "expired";
        case VerifyStatus::binding_mismatch: return "binding_mismatch";
        case VerifyStatus::bad_proof: return "bad_proof";
    }
    return "?";
}

ChallengeStore::ChallengeStore(BackendKind kind, uint64_t seed, PowParams pow)
    : kind_(kind), pow_(pow), rng_(mix64(seed ^ 0x5265736f75726365ull)) {
    if (pow_.unit_threshold == 0) throw std::invalid_argument("unit_threshold must be positive");
}

uint64_t ChallengeStore::now() const {
    if (clock_) return clock_();
    auto t = std::chrono::steady_clock::now().time_since_epoch();
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(t).count());
}

Challenge ChallengeStore::issue(uint32_t hardness, const RequestBinding& binding) {
    if (hardness == 0) throw std::invalid_argument("hardness must be >= 1");
    std::lock_guard lk(mu_);
    Challenge ch;
    ch.id = ChallengeId{rng_(), rng_()};
    while (ch.id.is_zero()) ch.id = ChallengeId{rng_(), rng_()};  // zero id is reserved
    ch.hardness = hardness;
    ch.binding = binding;
    ch.salt_hi = rng_();
    ch.salt_lo = rng_();
    ch.issued_at_ms = now();
    pending_.emplace(ch.id, Pending{hardness, binding, ch.salt_hi, ch.salt_lo, ch.issued_at_ms});
    ++issued_;
    return ch;
}

VerifyStatus ChallengeStore::verify(const Solution& sol, const RequestBinding& expected) {
    std::lock_guard lk(mu_);
    auto it = pending_.find(sol.id);
    if (it == pending_.end()) return VerifyStatus::unknown_challenge;
    Pending p = std::move(it->second);
    pending_.erase(it);  // consumed whichever way this attempt is decided
    if (ttl_ms_ != 0 && now() > p.issued_at_ms + ttl_ms_) return VerifyStatus::expired;
    if (!(p.binding == expected)) return VerifyStatus::binding_mismatch;
    if (kind_ == BackendKind::ledger) {
        // Payment is the ledger debit recorded at solve time; the solution
        // itself carries no witnesses.
        return sol.proofs.empty() ? VerifyStatus::ok : VerifyStatus::bad_proof;
    }
    if (sol.proofs.size() != p.hardness) return VerifyStatus::bad_proof;
    for (uint32_t u = 0; u < p.hardness; ++u) {
        ++verify_evals_;
        if (pow_unit_hash(sol.id, p.salt_hi, p.salt_lo, u, sol.proofs[u]) >= pow_.unit_threshold)
            return VerifyStatus::bad_proof;
    }
    return VerifyStatus::ok;
}

Solution ChallengeStore::solve(const Challenge& ch, WorkMeter& meter) const {
    Solution sol;
    sol.id = ch.id;
    if (kind_ == BackendKind::ledger) {
        meter.ledger_debits += ch.hardness;
    } else {
        sol.proofs.reserve(ch.hardness);
        for (uint32_t u = 0; u < ch.hardness; ++u) {
            uint64_t nonce = 0;
            for (;; ++nonce) {
                ++meter.hash_evals;
                if (pow_unit_hash(ch.id, ch.salt_hi, ch.salt_lo, u, nonce) < pow_.unit_threshold)
                    break;
            }
            sol.proofs.push_back(nonce);
        }
    }
    ++meter.challenges_solved;
    meter.hardness_solved += ch.hardness;
    return sol;
}

void ChallengeStore::set_ttl_ms(uint64_t ttl_ms) {
    std::lock_guard lk(mu_);
    ttl_ms_ = ttl_ms;
}

void ChallengeStore::set_clock(std::function<uint64_t()> now_ms) {
    std::lock_guard lk(mu_);
    clock_ = std::move(now_ms);
}

std::size_t ChallengeStore::outstanding() const {
    std::lock_guard lk(mu_);
    return pending_.size();
}

uint64_t ChallengeStore::issued_total() const {
    std::lock_guard lk(mu_);
    return issued_;
}

uint64_t ChallengeStore::verify_evals() const {
    std::lock_guard lk(mu_);
    return verify_evals_;
}

}  // namespace depthcharge::rb
