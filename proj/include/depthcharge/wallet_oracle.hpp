#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "depthcharge/accounting.hpp"

namespace depthcharge {

// Test-only oracle for the amortized query analysis. Every live good object
// carries a dollar wallet; deposits follow fixed rules and the invariant
// "wallet >= current depth" must hold after every settled request:
//   - accepted good insert at depth L+1: wallet = 2(L+1). Half pays the
//     insertion charge, half is a down payment against future displacement.
//   - a good object's depth rises by delta (someone shallower was spliced
//     over it): wallet += delta, funded by whoever paid that query.
//   - good query that finds its object: the wallet is emptied to pay the
//     depth charge, then the object restarts at the head with one dollar.
//   - good delete: the wallet is destroyed.
// Depth decreases (deletions below) deposit nothing; the invariant only gets
// easier. A violation means the analysis bookkeeping broke, so tests treat
// any violation as failure. The oracle never drives behavior.
class WalletOracle {
public:
    struct Violation {
        uint64_t seq = 0;
        std::string key;
        uint32_t depth = 0;
        uint64_t wallet = 0;
    };

    // Seeds a balance directly; for replaying hand-built list states.
    void set_balance(const std::string& key, uint64_t dollars);
    uint64_t balance(const std::string& key) const;
    std::size_t tracked() const { return wallets_.size(); }

    // Applies one settled request given the touched bucket's key order before
    // and after settlement (head first). `req_key` is the key the request
    // named.
    void apply(uint64_t seq, const SettledRecord& r, const std::string& req_key,
               const std::vector<std::string>& before, const std::vector<std::string>& after);

    uint64_t violations() const { return violations_; }
    const std::optional<Violation>& first_violation() const { return first_; }
    uint64_t displacement_deposits() const { return displacement_deposits_; }

private:
    void note_violation(uint64_t seq, const std::string& key, uint32_t depth, uint64_t wallet);

    std::unordered_map<std::string, uint64_t> wallets_;
    uint64_t violations_ = 0;
    uint64_t displacement_deposits_ = 0;
    std::optional<Violation> first_;
};

}  // namespace depthcharge
