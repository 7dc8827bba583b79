#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depthcharge/accounting.hpp"
#include "depthcharge/wallet_oracle.hpp"

namespace depthcharge {

// Everything a bound check may read at end of run.
struct BoundContext {
    const CostLedger* ledger = nullptr;
    const GoodObjectStats* stats = nullptr;
    uint32_t max_chain = 0;  // longest bucket at end of run
    const WalletOracle* wallets = nullptr;
    uint64_t attack_spend = 0;
    uint64_t pump_spend = 0;
    std::optional<uint64_t> flood_budget;
    std::optional<uint32_t> flood_index;
    std::optional<uint32_t> last_good_query_rb;
};

// Closed-form inequalities the run is held to. All constants are explicit.
//
//   chain_length  max bucket length <= sqrt(2B) + ell_max.
//   flood_greedy  greedy flood puts exactly the largest b with
//                 b(b+1)/2 <= budget into its list, and b < sqrt(2*budget).
//   spread_lower  adversary spend B >= b^2 / (8s) for b bad inserts across
//                 s attacked indices (direction: measured >= bound).
//   insert_upper  client insert spend at targeted indices
//                 <= s*ell_max^2 + b_t*ell_max.
//   per_list      for every index with at least one client hit:
//                 hit spend_i <= A_ins_i + ell_i*(q_i + sqrt(2*q_i*B_i)).
//   global        client model spend <= (4N + 5*sqrt(2)*sqrt(N*B))*ell_max^2
//                 with N = I+Q+D. The two addends come from doubling the
//                 insert bound 2(I + sqrt(2*I*B))*ell_max^2 and aggregating
//                 the per-list bound by Cauchy-Schwarz; both are dominated
//                 by the single-constant form C = 8, reported in detail.
//   query_mean    mean client hit-query cost <= factor * ell_ave.
//   pump_exact    pump spend == d(d+3)/2 and the next client query of the
//                 pumped object costs exactly d+1.
//   wallet        zero wallet-below-depth violations.
//   budget       adversary spend <= the declared budget.
struct CheckSpec {
    std::string name;
    bool expect_violation = false;
    std::optional<double> factor;   // query_mean
    std::optional<uint32_t> d;      // pump_exact
    std::optional<uint64_t> budget; // budget
};

struct CheckResult {
    std::string name;
    double bound = 0.0;
    double measured = 0.0;
    bool satisfied = false;
    bool expect_violation = false;
    bool as_expected = false;
    std::string detail;
};

// Largest b with b(b+1)/2 <= budget.
uint64_t greedy_flood_count(uint64_t budget);

CheckResult evaluate_check(const CheckSpec& spec, const BoundContext& ctx);
std::vector<CheckResult> evaluate_checks(const std::vector<CheckSpec>& specs,
                                         const BoundContext& ctx);

}  // namespace depthcharge
