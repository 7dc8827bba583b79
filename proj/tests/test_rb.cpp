#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <set>
#include <thread>
#include <vector>

#include "depthcharge/rb.hpp"

using namespace depthcharge;
using namespace depthcharge::rb;

namespace {

RequestBinding bind_q(const std::string& key, uint32_t index = 0) {
    return RequestBinding{OpKind::query, key, index};
}

}  // namespace

TEST_CASE("ledger happy path: issue, solve (empty proofs), verify once") {
    ChallengeStore store(BackendKind::ledger, 1);
    WorkMeter m;
    auto ch = store.issue(3, bind_q("k"));
    CHECK(ch.hardness == 3);
    CHECK(!ch.id.is_zero());
    CHECK(store.outstanding() == 1);

    auto sol = store.solve(ch, m);
    CHECK(sol.proofs.empty());
    CHECK(m.ledger_debits == 3);
    CHECK(m.hardness_solved == 3);
    CHECK(m.challenges_solved == 1);

    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::ok);
    CHECK(store.outstanding() == 0);
}

TEST_CASE("a verified challenge cannot be replayed") {
    ChallengeStore store(BackendKind::ledger, 1);
    WorkMeter m;
    auto ch = store.issue(1, bind_q("k"));
    auto sol = store.solve(ch, m);
    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::ok);
    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::unknown_challenge);
}

TEST_CASE("any decided verification attempt consumes the challenge") {
    ChallengeStore store(BackendKind::ledger, 1);
    WorkMeter m;

    // Failed binding check: consumed.
    auto ch = store.issue(2, bind_q("good"));
    auto sol = store.solve(ch, m);
    CHECK(store.verify(sol, bind_q("evil")) == VerifyStatus::binding_mismatch);
    CHECK(store.verify(sol, bind_q("good")) == VerifyStatus::unknown_challenge);
    CHECK(store.outstanding() == 0);

    // Failed proof check: also consumed.
    ch = store.issue(2, bind_q("good"));
    Solution junk;
    junk.id = ch.id;
    junk.proofs = {7};  // the ledger backend wants no proofs
    CHECK(store.verify(junk, bind_q("good")) == VerifyStatus::bad_proof);
    auto honest = store.solve(ch, m);
    CHECK(store.verify(honest, bind_q("good")) == VerifyStatus::unknown_challenge);
}

TEST_CASE("binding covers op, key, and index") {
    ChallengeStore store(BackendKind::ledger, 1);
    WorkMeter m;
    RequestBinding b{OpKind::insert, "key", 5};

    auto check_mismatch = [&](RequestBinding wrong) {
        auto ch = store.issue(1, b);
        auto sol = store.solve(ch, m);
        CHECK(store.verify(sol, wrong) == VerifyStatus::binding_mismatch);
    };
    check_mismatch(RequestBinding{OpKind::erase, "key", 5});
    check_mismatch(RequestBinding{OpKind::insert, "yek", 5});
    check_mismatch(RequestBinding{OpKind::insert, "key", 6});

    auto ch = store.issue(1, b);
    auto sol = store.solve(ch, m);
    CHECK(store.verify(sol, b) == VerifyStatus::ok);
}

TEST_CASE("zero hardness is not issuable") {
    ChallengeStore store(BackendKind::ledger, 1);
    CHECK_THROWS_AS(store.issue(0, bind_q("k")), std::invalid_argument);
}

TEST_CASE("a solution naming no known challenge is unknown") {
    ChallengeStore store(BackendKind::ledger, 1);
    Solution sol;  // zero id: the reserved no-challenge value
    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::unknown_challenge);
    sol.id = {123, 456};
    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::unknown_challenge);
}

TEST_CASE("challenge ids are unique across many issues") {
    ChallengeStore store(BackendKind::ledger, 7);
    std::set<std::pair<uint64_t, uint64_t>> seen;
    for (int i = 0; i < 5000; ++i) {
        auto ch = store.issue(1, bind_q("k"));
        CHECK(seen.emplace(ch.id.hi, ch.id.lo).second);
    }
    CHECK(store.issued_total() == 5000);
}

TEST_CASE("expiry honors the injected clock; ttl zero means never") {
    ChallengeStore store(BackendKind::ledger, 1);
    uint64_t now = 1000;
    store.set_clock([&now] { return now; });
    store.set_ttl_ms(50);
    WorkMeter m;

    auto ch = store.issue(1, bind_q("k"));
    auto sol = store.solve(ch, m);
    now += 51;
    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::expired);
    CHECK(store.outstanding() == 0);  // expired attempts are consumed too

    // At the boundary the challenge still verifies.
    ch = store.issue(1, bind_q("k"));
    sol = store.solve(ch, m);
    now += 50;
    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::ok);

    store.set_ttl_ms(0);
    ch = store.issue(1, bind_q("k"));
    sol = store.solve(ch, m);
    now += 1000000;
    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::ok);
}

TEST_CASE("pow solve produces verifiable nonces and meters every evaluation") {
    PowParams pow{uint64_t{1} << 59};  // expected 32 evaluations per unit
    ChallengeStore store(BackendKind::pow, 3, pow);
    WorkMeter m;

    auto ch = store.issue(4, bind_q("k"));
    auto sol = store.solve(ch, m);
    REQUIRE(sol.proofs.size() == 4);
    CHECK(m.hash_evals >= 4);  // at least one evaluation per unit
    CHECK(m.ledger_debits == 0);
    for (uint32_t u = 0; u < 4; ++u)
        CHECK(pow_unit_hash(ch.id, ch.salt_hi, ch.salt_lo, u, sol.proofs[u]) < pow.unit_threshold);

    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::ok);
    CHECK(store.verify_evals() == 4);  // exactly one evaluation per unit
}

TEST_CASE("pow rejects a tampered or misordered solution") {
    PowParams pow{uint64_t{1} << 60};
    ChallengeStore store(BackendKind::pow, 3, pow);
    WorkMeter m;

    auto ch = store.issue(2, bind_q("k"));
    auto sol = store.solve(ch, m);
    auto tampered = sol;
    tampered.proofs[0] ^= 1;
    // Overwhelmingly likely to miss the threshold; skip the check otherwise.
    if (pow_unit_hash(ch.id, ch.salt_hi, ch.salt_lo, 0, tampered.proofs[0]) >= pow.unit_threshold)
        CHECK(store.verify(tampered, bind_q("k")) == VerifyStatus::bad_proof);
    else
        store.verify(tampered, bind_q("k"));

    // Nonces are unit-bound: swapping two valid proofs fails (unless they
    // happen to solve each other's unit, which the guard below rules out).
    ch = store.issue(2, bind_q("k"));
    sol = store.solve(ch, m);
    std::swap(sol.proofs[0], sol.proofs[1]);
    bool cross_valid =
        pow_unit_hash(ch.id, ch.salt_hi, ch.salt_lo, 0, sol.proofs[0]) < pow.unit_threshold &&
        pow_unit_hash(ch.id, ch.salt_hi, ch.salt_lo, 1, sol.proofs[1]) < pow.unit_threshold;
    if (!cross_valid) CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::bad_proof);

    // Wrong proof count never verifies.
    ch = store.issue(2, bind_q("k"));
    sol = store.solve(ch, m);
    sol.proofs.pop_back();
    CHECK(store.verify(sol, bind_q("k")) == VerifyStatus::bad_proof);
}

TEST_CASE("pow work concentrates around the expected evaluations per unit") {
    PowParams pow{uint64_t{1} << 58};  // expected 64 evaluations per unit
    ChallengeStore store(BackendKind::pow, 11, pow);
    WorkMeter m;
    const int trials = 800;
    for (int i = 0; i < trials; ++i) {
        auto ch = store.issue(1, bind_q("k" + std::to_string(i)));
        store.solve(ch, m);
    }
    double mean = static_cast<double>(m.hash_evals) / trials;
    CHECK(mean > 64.0 * 0.8);
    CHECK(mean < 64.0 * 1.2);
}

TEST_CASE("store survives concurrent issue, solve, and verify") {
    ChallengeStore store(BackendKind::ledger, 5);
    std::atomic<int> ok{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            WorkMeter m;
            for (int i = 0; i < 500; ++i) {
                auto b = bind_q("t" + std::to_string(t) + "-" + std::to_string(i));
                auto ch = store.issue(1, b);
                auto sol = store.solve(ch, m);
                if (store.verify(sol, b) == VerifyStatus::ok) ++ok;
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(ok == 2000);
    CHECK(store.outstanding() == 0);
    CHECK(store.issued_total() == 2000);
}
