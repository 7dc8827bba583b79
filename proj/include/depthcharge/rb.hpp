#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "depthcharge/hashing.hpp"

namespace depthcharge::rb {

enum class OpKind : uint8_t { insert = 0, query = 1, erase = 2 };

struct ChallengeId {
    uint64_t hi = 0;
    uint64_t lo = 0;
    friend bool operator==(const ChallengeId&, const ChallengeId&) = default;
    bool is_zero() const { return hi == 0 && lo == 0; }
};

struct ChallengeIdHash {
    std::size_t operator()(const ChallengeId& id) const {
        return static_cast<std::size_t>(mix64(id.hi ^ mix64(id.lo)));
    }
};

// A challenge is bound to one concrete request; a solution for it cannot be
// redeemed for any other operation, key, or index.
struct RequestBinding {
    OpKind op = OpKind::query;
    std::string key;
    uint32_t index = 0;
    friend bool operator==(const RequestBinding&, const RequestBinding&) = default;
};

struct Challenge {
    ChallengeId id;
    uint32_t hardness = 0;  // number of independent unit puzzles
    RequestBinding binding;
    uint64_t salt_hi = 0;
    uint64_t salt_lo = 0;
    uint64_t issued_at_ms = 0;
};

struct Solution {
    ChallengeId id;
    std::vector<uint64_t> proofs;  // one nonce per unit; empty for the ledger backend
};

enum class BackendKind : uint8_t { ledger, pow };

struct PowParams {
    // A unit puzzle is solved by a nonce whose keyed hash falls below this
    // threshold; the default gives an expected 2^64 / 2^56 = 256 evaluations
    // per unit.
    uint64_t unit_threshold = uint64_t{1} << 56;
};

// Per-principal spend meter. The ledger backend debits hardness directly;
// the PoW backend records the hash evaluations actually performed.
struct WorkMeter {
    uint64_t ledger_debits = 0;
    uint64_t hash_evals = 0;
    uint64_t challenges_solved = 0;
    uint64_t hardness_solved = 0;
};

enum class VerifyStatus : uint8_t {
    ok,
    unknown_challenge,
    expired,
    binding_mismatch,
    bad_proof,
};

const char* to_string(VerifyStatus s);

// Unit puzzle predicate input. Binding the challenge id, its salt, and the
// unit index keeps witnesses single-purpose: nothing precomputed for one
// challenge (or one unit) verifies for another.
inline uint64_t pow_unit_hash(const ChallengeId& id, uint64_t salt_hi, uint64_t salt_lo,
                              uint32_t unit, uint64_t nonce) {
    uint64_t h = mix64(id.hi ^ mix64(id.lo));
    h = mix64(h ^ salt_hi);
    h = mix64(h ^ salt_lo);
    h = mix64(h ^ ((uint64_t{unit} << 1) | 1));
    return mix64(h ^ nonce);
}

// Issues, verifies, and (for the honest requester in the harness) solves
// challenges. Thread safe. Any verification attempt on an outstanding
// challenge consumes it, pass or fail: a failed attempt requires a fresh
// quote, there is no cheaper re-try against the same challenge.
class ChallengeStore {
public:
    explicit ChallengeStore(BackendKind kind, uint64_t seed, PowParams pow = {});

    BackendKind backend() const { return kind_; }
    const PowParams& pow_params() const { return pow_; }

    // Requires hardness >= 1; zero-hard requests carry no challenge at all.
    Challenge issue(uint32_t hardness, const RequestBinding& binding);

    VerifyStatus verify(const Solution& sol, const RequestBinding& expected);

    // Burns resources on behalf of the requester and returns the proof.
    // Ledger backend: debits `hardness` to the meter. PoW backend: searches
    // nonces from zero per unit, metering every hash evaluation.
    Solution solve(const Challenge& ch, WorkMeter& meter) const;

    // Expiry is opt-in: ttl 0 means challenges never expire. The clock is
    // injectable so expiry is testable without sleeping.
    void set_ttl_ms(uint64_t ttl_ms);
    void set_clock(std::function<uint64_t()> now_ms);

    std::size_t outstanding() const;
    uint64_t issued_total() const;
    // Hash evaluations spent by this store verifying PoW solutions (one per
    // unit); stays zero for the ledger backend.
    uint64_t verify_evals() const;

private:
    struct Pending {
        uint32_t hardness;
        RequestBinding binding;
        uint64_t salt_hi;
        uint64_t salt_lo;
        uint64_t issued_at_ms;
    };

    uint64_t now() const;

    BackendKind kind_;
    PowParams pow_;
    mutable std::mutex mu_;
    std::mt19937_64 rng_;
    uint64_t ttl_ms_ = 0;
    std::function<uint64_t()> clock_;
    uint64_t issued_ = 0;
    uint64_t verify_evals_ = 0;
    std::unordered_map<ChallengeId, Pending, ChallengeIdHash> pending_;
};

}  // namespace depthcharge::rb
