// Acceptance gate: ten end-to-end criteria, one [PASS]/[FAIL] line each,
// nonzero exit if any fail. Every bound is written out with its constants;
// where a criterion carries a runtime budget, wall time is part of the check.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "depthcharge/adversary.hpp"
#include "depthcharge/bounds.hpp"
#include "depthcharge/driver.hpp"
#include "depthcharge/hashing.hpp"
#include "depthcharge/keys.hpp"
#include "depthcharge/scenario.hpp"
#include "depthcharge/wallet_oracle.hpp"
#include "depthcharge/workload.hpp"
#include "reference_table.hpp"

using namespace depthcharge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void require(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + ("FAILED " + what);
    }
}

void enforce_budget(Outcome& o, double elapsed, double limit) {
    require(o, elapsed < limit, fmt("runtime %.2fs exceeds %.0fs budget", elapsed, limit));
}

struct Rig {
    rb::ChallengeStore store;
    Table table;
    CostLedger ledger;
    GoodObjectStats stats;
    RequestDriver driver;
    WorkloadGen workload;
    Adversary adversary;

    Rig(uint32_t t, uint64_t seed, uint64_t hash_seed, bool mtf = true)
        : store(rb::BackendKind::ledger, seed),
          table(TableConfig{t, hash_seed, mtf}, store),
          ledger(t),
          stats(t),
          driver(table, store, ledger, stats),
          workload(driver, seed),
          adversary(driver) {}
};

BoundContext context_of(Rig& r) {
    BoundContext ctx;
    ctx.ledger = &r.ledger;
    ctx.stats = &r.stats;
    uint32_t mc = 0;
    for (uint32_t i = 0; i < r.table.index_count(); ++i)
        mc = std::max(mc, r.table.bucket_length(i));
    ctx.max_chain = mc;
    return ctx;
}

// ---- 1. greedy flood obeys the chain-length bound -------------------------

Outcome chain_length_bound() {
    Outcome o;
    auto t0 = Clock::now();
    const uint64_t expect_1e6 = 1413;  // largest b with b(b+1)/2 <= 1e6
    for (uint64_t budget : {uint64_t{100}, uint64_t{10000}, uint64_t{1000000}}) {
        Scenario sc;
        sc.name = "flood-accept";
        sc.table = TableConfig{1024, 0x51ab, true};
        sc.seed = 1;
        Phase f;
        f.kind = Phase::Kind::flood;
        f.index = 0;
        f.budget = budget;
        sc.phases.push_back(f);
        CheckSpec fg, cl;
        fg.name = "flood_greedy";
        cl.name = "chain_length";
        sc.checks = {fg, cl};

        RunSummary s = run_scenario(sc);
        uint64_t b = s.bad_inserts;
        require(o, s.all_as_expected, fmt("checks at B=%llu", (unsigned long long)budget));
        require(o, b == greedy_flood_count(budget), fmt("greedy count at B=%llu", (unsigned long long)budget));
        require(o, b * (b + 1) / 2 <= budget, fmt("triangle spend at B=%llu", (unsigned long long)budget));
        require(o, double(b) < std::sqrt(2.0 * double(budget)),
                fmt("b < sqrt(2B) at B=%llu", (unsigned long long)budget));
        if (budget == 1000000) require(o, b == expect_1e6, "b != 1413 at B=1e6");
        o.detail += fmt("%sB=%llu b=%llu", o.detail.empty() ? "" : ", ",
                        (unsigned long long)budget, (unsigned long long)b);
    }
    enforce_budget(o, seconds_since(t0), 1.0);
    return o;
}

// ---- 2. even spread attains the exhaustive placement minimum --------------

Outcome spread_optimality() {
    Outcome o;
    auto t0 = Clock::now();
    uint64_t pairs = 0, runs = 0;
    for (uint32_t s = 1; s <= 3; ++s) {
        for (uint64_t b = 1; b <= 8; ++b) {
            // Every way to deal b inserts onto s lists, in order; the cost of
            // an insert is one more than the list's current length.
            uint64_t seqs = 1;
            for (uint64_t i = 0; i < b; ++i) seqs *= s;
            uint64_t min_cost = UINT64_MAX;
            for (uint64_t code = 0; code < seqs; ++code) {
                uint64_t c = code, cost = 0;
                uint32_t counts[3] = {0, 0, 0};
                for (uint64_t i = 0; i < b; ++i) {
                    uint32_t slot = static_cast<uint32_t>(c % s);
                    c /= s;
                    cost += counts[slot] + 1;
                    ++counts[slot];
                }
                min_cost = std::min(min_cost, cost);
            }
            require(o, double(min_cost) >= double(b) * double(b) / (8.0 * s),
                    fmt("min < b^2/8s at b=%llu s=%u", (unsigned long long)b, s));
            ++pairs;

            if (b < s) continue;  // the strategy needs one object per index
            Rig rig(8, 1, 0xacce55);
            std::vector<uint32_t> indices;
            for (uint32_t i = 0; i < s; ++i) indices.push_back(i);
            rig.adversary.even_spread(indices, b);
            require(o, rig.ledger.adversary_rb() == min_cost,
                    fmt("spread not minimal at b=%llu s=%u", (unsigned long long)b, s));
            CheckSpec spec;
            spec.name = "spread_lower";
            require(o, evaluate_check(spec, context_of(rig)).satisfied,
                    fmt("spread_lower check at b=%llu s=%u", (unsigned long long)b, s));
            ++runs;
        }
    }
    o.detail += fmt("%llu (b,s) pairs enumerated, %llu spreads minimal",
                    (unsigned long long)pairs, (unsigned long long)runs);
    enforce_budget(o, seconds_since(t0), 1.0);
    return o;
}

// ---- 3. targeted insert cost ceiling --------------------------------------

Outcome insert_cost_ceiling() {
    Outcome o;
    auto t0 = Clock::now();
    uint64_t runs = 0;
    double worst_ratio = 0.0;
    for (uint64_t seed = 0; seed < 20 && o.pass; ++seed) {
        for (uint32_t s : {1u, 8u, 64u}) {
            for (uint64_t b : {uint64_t{64}, uint64_t{1024}, uint64_t{4096}}) {
                for (uint32_t lm : {1u, 4u, 8u}) {
                    Scenario sc;
                    sc.name = "insert-ceiling-accept";
                    sc.table = TableConfig{64, 0xbead + seed * 977, true};
                    sc.seed = seed;
                    Phase spread;
                    spread.kind = Phase::Kind::spread;
                    for (uint32_t i = 0; i < s; ++i) spread.indices.push_back(i);
                    spread.count = b;
                    sc.phases.push_back(spread);
                    Phase each;
                    each.kind = Phase::Kind::good_inserts_each;
                    each.indices = spread.indices;
                    each.count_each = lm;
                    sc.phases.push_back(each);
                    CheckSpec iu;
                    iu.name = "insert_upper";
                    sc.checks.push_back(iu);

                    RunSummary r = run_scenario(sc);
                    uint64_t measured = 0;
                    for (const auto& row : r.per_index)
                        if (row.index < s) measured += row.good_insert_rb;
                    uint64_t bound = uint64_t{s} * lm * lm + b * lm;
                    require(o, measured <= bound && r.all_as_expected,
                            fmt("s=%u b=%llu lm=%u seed=%llu: %llu > %llu", s,
                                (unsigned long long)b, lm, (unsigned long long)seed,
                                (unsigned long long)measured, (unsigned long long)bound));
                    worst_ratio = std::max(worst_ratio, double(measured) / double(bound));
                    ++runs;
                }
            }
        }
    }
    o.detail += fmt("%llu runs to (s,b,lm)=(64,4096,8), worst measured/bound %.3f",
                    (unsigned long long)runs, worst_ratio);
    enforce_budget(o, seconds_since(t0), 10.0);
    return o;
}

// ---- 4. wallet invariant under randomized interleavings -------------------

Outcome wallet_invariant() {
    Outcome o;
    auto t0 = Clock::now();
    uint64_t sequences = 0, requests = 0;
    for (uint64_t seed = 0; seed < 100 && o.pass; ++seed) {
        for (uint64_t rep = 0; rep < 100; ++rep) {
            std::mt19937_64 rng(mix64(seed * 1000003 + rep));
            uint32_t t = uint32_t{1} << (rng() % 4);
            Rig rig(t, seed, 0x3a11e7 + rep);
            WalletOracle wallets;
            rig.driver.attach_wallets(&wallets);

            std::vector<std::pair<uint32_t, uint32_t>> scripted;  // (index, ordinal)
            uint32_t next_ordinal = 0;
            const uint64_t budget = 30 + rng() % 940;
            while (rig.driver.settled() < budget) {
                uint32_t idx = static_cast<uint32_t>(rng() % t);
                switch (rng() % 11) {
                    case 0: rig.workload.insert_uar(); break;
                    case 1: rig.workload.insert_at(idx); break;
                    case 2: rig.workload.query_uar(); break;
                    case 3: rig.workload.delete_uar(); break;
                    case 4: rig.adversary.single_list_flood(idx, 1 + rng() % 30); break;
                    case 5: {
                        uint32_t k = 1 + static_cast<uint32_t>(rng() % t);
                        std::vector<uint32_t> indices;
                        for (uint32_t i = 0; i < k; ++i) indices.push_back(i);
                        rig.adversary.even_spread(indices, k + rng() % 20);
                        break;
                    }
                    case 6: rig.adversary.mtf_depth_pump(idx, 1 + rng() % 4); break;
                    case 7: rig.adversary.spurious_probe(idx, rng() % 10); break;
                    case 8:
                        rig.adversary.script_insert(idx, next_ordinal);
                        scripted.emplace_back(idx, next_ordinal++);
                        break;
                    case 9:
                        if (!scripted.empty()) {
                            auto [i, n] = scripted[rng() % scripted.size()];
                            rig.adversary.script_query(Adversary::script_bad_key(i, n));
                        }
                        break;
                    case 10:
                        if (!scripted.empty()) {
                            auto [i, n] = scripted[rng() % scripted.size()];
                            rig.adversary.script_delete(Adversary::script_bad_key(i, n));
                        }
                        break;
                }
            }
            requests += rig.driver.settled();
            ++sequences;
            if (wallets.violations() != 0) {
                const auto& v = *wallets.first_violation();
                require(o, false,
                        fmt("seed=%llu rep=%llu: wallet %llu < depth %u at seq %llu",
                            (unsigned long long)seed, (unsigned long long)rep,
                            (unsigned long long)v.wallet, v.depth, (unsigned long long)v.seq));
                break;
            }
        }
    }
    o.detail += fmt("%llu sequences, %llu requests, zero wallet-below-depth",
                    (unsigned long long)sequences, (unsigned long long)requests);
    enforce_budget(o, seconds_since(t0), 60.0);
    return o;
}

// ---- 5. per-list amortized ceiling, with a negative control ---------------

Outcome per_list_ceiling() {
    Outcome o;
    auto t0 = Clock::now();

    auto scenario_for = [](uint32_t q, const DrSchedule& dr, bool mtf) {
        Scenario sc;
        sc.name = "pump-repeat-accept";
        sc.table = TableConfig{16, 0x9096, mtf};
        sc.seed = 1;
        Phase flood;
        flood.kind = Phase::Kind::flood;
        flood.index = 0;
        flood.budget = 10000;  // 140 bad objects
        sc.phases.push_back(flood);
        Phase ins;
        ins.kind = Phase::Kind::good_insert_at;
        ins.index = 0;
        ins.count = 1;
        sc.phases.push_back(ins);
        Phase pre;  // bring the target to the head so round one has material
        pre.kind = Phase::Kind::good_query_at;
        pre.index = 0;
        pre.count = 1;
        sc.phases.push_back(pre);
        Phase pump;
        pump.kind = Phase::Kind::pump_rounds;
        pump.index = 0;
        pump.rounds = q;
        pump.dr = dr;
        sc.phases.push_back(pump);
        CheckSpec pl;
        pl.name = "per_list";
        sc.checks.push_back(pl);
        return sc;
    };

    DrSchedule constant32;
    constant32.kind = DrSchedule::Kind::constant;
    constant32.value = 32;
    DrSchedule geometric;
    geometric.kind = DrSchedule::Kind::geometric;
    geometric.start = 1;
    geometric.factor = 2;
    geometric.cap = 64;

    for (uint32_t q : {10u, 100u}) {
        DrSchedule front;
        front.kind = DrSchedule::Kind::front_loaded;
        front.total = 32 * q;
        const DrSchedule* schedules[] = {&constant32, &geometric, &front};
        const char* labels[] = {"constant", "geometric", "front"};
        for (int i = 0; i < 3; ++i) {
            RunSummary s = run_scenario(scenario_for(q, *schedules[i], true));
            require(o, s.checks.size() == 1 && s.checks[0].satisfied,
                    fmt("per_list q=%u %s", q, labels[i]));
            if (q == 100 && i == 0)
                o.detail += fmt("q=100 constant: %.0f <= %.0f", s.checks[0].measured,
                                s.checks[0].bound);
        }
    }

    // Negative control: no splice, no amortization; the same schedule must
    // now break the ceiling.
    RunSummary bad = run_scenario(scenario_for(100, constant32, false));
    require(o, bad.checks.size() == 1 && !bad.checks[0].satisfied, "nomtf control still passed");
    o.detail += fmt("; nomtf control %.0f > %.0f", bad.checks[0].measured, bad.checks[0].bound);
    enforce_budget(o, seconds_since(t0), 60.0);
    return o;
}

// ---- 6. depth-pump asymmetry, pointwise -----------------------------------

Outcome pump_asymmetry() {
    Outcome o;
    for (uint32_t d = 1; d <= 64 && o.pass; ++d) {
        Rig rig(4, 1, 0xd009);
        rig.workload.insert_at(0);  // the target, head of its list
        for (uint32_t j = 0; j < d; ++j) rig.adversary.script_insert(0, j);
        std::string target = rig.workload.goods_at(0).front();

        AttackOutcome pump = rig.adversary.mtf_depth_pump(0, d, target);
        require(o, pump.executed == d && pump.shortfall == 0, fmt("pump stalled at d=%u", d));
        require(o, pump.spend == uint64_t{d} * (d + 3) / 2,
                fmt("spend %llu != d(d+3)/2 at d=%u", (unsigned long long)pump.spend, d));

        RequestOutcome q = rig.workload.query_key(target);
        require(o, q.kind == OutcomeKind::found && q.rb_charged == d + 1,
                fmt("next query cost %u != d+1 at d=%u", q.rb_charged, d));

        CheckSpec spec;
        spec.name = "pump_exact";
        spec.d = d;
        BoundContext ctx = context_of(rig);
        ctx.pump_spend = rig.adversary.pump_spend();
        ctx.last_good_query_rb = q.rb_charged;
        require(o, evaluate_check(spec, ctx).satisfied, fmt("pump_exact check at d=%u", d));
    }
    o.detail += "d=1..64: spend d(d+3)/2 and next query d+1, exact";
    return o;
}

// ---- 7. random-query mean vs an independent Monte-Carlo oracle ------------

// The no-adversary move-to-front process, rebuilt from nothing but vectors
// and a stock RNG: uniform inserts, queries that redraw empty bins, cost =
// one-based position, hit moves to the front.
double oracle_mean(uint64_t seed, uint32_t t, uint32_t inserts, uint64_t queries) {
    std::mt19937_64 rng(seed ^ 0x0bac1e0ddull);
    std::vector<std::vector<int>> bins(t);
    std::uniform_int_distribution<uint32_t> bin(0, t - 1);
    for (uint32_t i = 0; i < inserts; ++i) bins[bin(rng)].push_back(static_cast<int>(i));
    double total = 0.0;
    for (uint64_t q = 0; q < queries; ++q) {
        uint32_t b;
        do {
            b = bin(rng);
        } while (bins[b].empty());
        std::uniform_int_distribution<std::size_t> pos(0, bins[b].size() - 1);
        std::size_t p = pos(rng);
        total += double(p + 1);
        int v = bins[b][static_cast<std::ptrdiff_t>(p)];
        bins[b].erase(bins[b].begin() + static_cast<std::ptrdiff_t>(p));
        bins[b].insert(bins[b].begin(), v);
    }
    return total / double(queries);
}

Outcome random_query_mean() {
    Outcome o;
    auto t0 = Clock::now();
    for (uint64_t budget : {uint64_t{0}, uint64_t{1000}}) {
        double sys_sum = 0.0, oracle_sum = 0.0;
        for (uint64_t seed = 0; seed < 20; ++seed) {
            Scenario sc;
            sc.name = "random-query-accept";
            sc.table = TableConfig{256, 0x7ab1e, true};
            sc.seed = seed;
            if (budget > 0) {
                Phase flood;
                flood.kind = Phase::Kind::flood;
                flood.index = 0;
                flood.budget = budget;
                sc.phases.push_back(flood);
            }
            Phase ins;
            ins.kind = Phase::Kind::good_inserts;
            ins.count = 256;
            sc.phases.push_back(ins);
            Phase qry;  // Q = clamp(ell_max^2 * B, 1e4, 1e6)
            qry.kind = Phase::Kind::good_queries;
            qry.auto_count = true;
            qry.auto_min = 10000;
            qry.auto_cap = 1000000;
            sc.phases.push_back(qry);

            RunSummary s = run_scenario(sc);
            uint64_t insert_rb = 0;
            for (const auto& row : s.per_index) insert_rb += row.good_insert_rb;
            double sys_mean = double(s.algorithm_model_rb - insert_rb) / double(s.good_queries);
            sys_sum += sys_mean;
            oracle_sum += oracle_mean(seed, 256, 256, s.good_queries);
        }
        double sys_avg = sys_sum / 20.0, oracle_avg = oracle_sum / 20.0;
        require(o, sys_avg <= 1.25 * oracle_avg,
                fmt("B=%llu: mean %.3f > 1.25 x %.3f", (unsigned long long)budget, sys_avg,
                    oracle_avg));
        o.detail += fmt("%sB=%llu mean %.3f vs oracle %.3f", o.detail.empty() ? "" : ", ",
                        (unsigned long long)budget, sys_avg, oracle_avg);
    }
    enforce_budget(o, seconds_since(t0), 60.0);
    return o;
}

// ---- 8. proof-of-work cost is linear in hardness --------------------------

Outcome pow_linearity() {
    Outcome o;
    auto t0 = Clock::now();
    rb::PowParams pow;  // default threshold: expected 256 evaluations a unit
    rb::ChallengeStore store(rb::BackendKind::pow, 77, pow);
    rb::WorkMeter meter;

    const uint32_t xs[] = {1, 4, 16, 64};
    const int trials = 1000;
    double mean[4] = {};
    for (int k = 0; k < 4; ++k) {
        uint64_t before = meter.hash_evals;
        for (int trial = 0; trial < trials; ++trial) {
            rb::RequestBinding bind{rb::OpKind::query, "pw" + std::to_string(trial), xs[k]};
            rb::Challenge ch = store.issue(xs[k], bind);
            rb::Solution sol = store.solve(ch, meter);
            if (store.verify(sol, bind) != rb::VerifyStatus::ok) {
                require(o, false, fmt("solution failed to verify at x=%u", xs[k]));
                return o;
            }
        }
        mean[k] = double(meter.hash_evals - before) / trials;
    }

    double xbar = (1 + 4 + 16 + 64) / 4.0, ybar = (mean[0] + mean[1] + mean[2] + mean[3]) / 4.0;
    double num = 0, den = 0;
    for (int k = 0; k < 4; ++k) {
        num += (xs[k] - xbar) * (mean[k] - ybar);
        den += (xs[k] - xbar) * (xs[k] - xbar);
    }
    double slope = num / den;
    require(o, std::abs(slope - 256.0) <= 0.20 * 256.0,
            fmt("slope %.1f outside 256 +- 51.2", slope));
    o.detail += fmt("slope %.1f evals/unit over x in {1,4,16,64}, 1000 trials each", slope);
    enforce_budget(o, seconds_since(t0), 30.0);
    return o;
}

// ---- 9. exhaustive equivalence against the from-scratch model -------------

struct EquivCounters {
    uint64_t nodes = 0;
    uint64_t divergences = 0;
    std::string first;
};

bool equiv_apply(Table& sys, rb::ChallengeStore& store, ref::ReferenceTable& model, int op,
                 const std::string& key) {
    Quote q;
    if (op == 0) q = sys.quote_insert(sys.hash_index(key), key);
    else if (op == 1) q = sys.quote_query(key);
    else q = sys.quote_erase(key);
    rb::Solution sol;
    rb::WorkMeter scratch;
    if (q.challenge) sol = store.solve(*q.challenge, scratch);
    RequestOutcome out = op == 0   ? sys.settle_insert(q, key, sol)
                         : op == 1 ? sys.settle_query(q, key, sol)
                                   : sys.settle_erase(q, key, sol);

    ref::Result want = op == 0 ? model.insert(key) : op == 1 ? model.query(key) : model.erase(key);
    if (out.kind != want.kind || out.rb_charged != want.charged || out.latency != want.latency ||
        out.depth_before != want.depth)
        return false;
    for (uint32_t i = 0; i < sys.index_count(); ++i)
        if (sys.bucket_keys(i) != model.list_at(i)) return false;
    return true;
}

void equiv_dfs(const Table& sys, rb::ChallengeStore& store, const ref::ReferenceTable& model,
               int depth_left, std::string& path, EquivCounters& c) {
    static const char* keys[3] = {"a", "b", "c"};
    static const char opc[3] = {'i', 'q', 'e'};
    for (int op = 0; op < 3; ++op) {
        for (int k = 0; k < 3; ++k) {
            Table s2(sys, store);
            ref::ReferenceTable m2 = model;
            ++c.nodes;
            path.push_back(opc[op]);
            path.push_back(static_cast<char>('a' + k));
            if (!equiv_apply(s2, store, m2, op, keys[k])) {
                ++c.divergences;
                if (c.first.empty()) c.first = path;
            } else if (depth_left > 1) {
                equiv_dfs(s2, store, m2, depth_left - 1, path, c);
            }
            path.pop_back();
            path.pop_back();
        }
    }
}

Outcome model_equivalence() {
    Outcome o;
    auto t0 = Clock::now();

    // For t=2, pick a hash seed that splits the keys 'a','c' | 'b' so the
    // sequences cover collision, separation, and cross-bucket traffic.
    uint64_t seed2 = 0;
    while (!(bounded(keyed_hash("a", seed2), 2) == 0 && bounded(keyed_hash("b", seed2), 2) == 1 &&
             bounded(keyed_hash("c", seed2), 2) == 0))
        ++seed2;

    const uint64_t per_config = 48427560;  // sum of 9^l for l = 1..8
    for (uint32_t t : {1u, 2u}) {
        uint64_t hash_seed = t == 1 ? 0 : seed2;
        rb::ChallengeStore store(rb::BackendKind::ledger, 3);
        Table sys(TableConfig{t, hash_seed, true}, store);
        ref::ReferenceTable model(t, hash_seed, true);
        EquivCounters c;
        std::string path;
        equiv_dfs(sys, store, model, 8, path, c);
        require(o, c.divergences == 0,
                fmt("t=%u: %llu divergences, first at [%s]", t, (unsigned long long)c.divergences,
                    c.first.c_str()));
        require(o, c.nodes == per_config, fmt("t=%u: traversal incomplete", t));
        o.detail += fmt("%st=%u: %llu prefixes", o.detail.empty() ? "" : ", ", t,
                        (unsigned long long)c.nodes);
    }
    o.detail += fmt(" (%.0fs)", seconds_since(t0));
    return o;
}

// ---- 10. byte-identical summaries on re-run -------------------------------

Outcome deterministic_output() {
    Outcome o;
    uint64_t compared = 0;
    for (const std::string& name : builtin_names()) {
        for (std::optional<uint64_t> seed : {std::optional<uint64_t>{}, std::optional<uint64_t>{7}}) {
            Scenario sc = builtin_scenario(name);
            RunOptions opt;
            opt.seed = seed;
            RunSummary a = run_scenario(sc, opt);
            RunSummary b = run_scenario(sc, opt);
            bool same = summary_json(a).dump(2) == summary_json(b).dump(2) &&
                        summary_csv(a) == summary_csv(b);
            require(o, same, fmt("%s seed=%llu differs", name.c_str(),
                                 (unsigned long long)seed.value_or(sc.seed)));
            ++compared;
        }
    }
    o.detail += fmt("%llu builtin runs re-ran byte-identical", (unsigned long long)compared);
    return o;
}

}  // namespace

int main() {
    struct Entry {
        const char* label;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"chain length bounded by greedy flood budget", chain_length_bound},
        {"even spread attains the placement minimum", spread_optimality},
        {"targeted insert cost ceiling", insert_cost_ceiling},
        {"wallet never below depth", wallet_invariant},
        {"per-list amortized ceiling (with negative control)", per_list_ceiling},
        {"depth-pump pays quadratic, query pays linear", pump_asymmetry},
        {"random-query mean within 1.25x of MC oracle", random_query_mean},
        {"proof-of-work cost linear in hardness", pow_linearity},
        {"exhaustive equivalence vs reference model", model_equivalence},
        {"byte-identical summaries on re-run", deterministic_output},
    };

    int failures = 0;
    int idx = 0;
    for (const Entry& e : entries) {
        auto t0 = Clock::now();
        Outcome o = e.fn();
        double dt = seconds_since(t0);
        std::printf("[%s] %2d. %-52s (%6.2fs) %s\n", o.pass ? "PASS" : "FAIL", ++idx, e.label, dt,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    if (failures > 0) std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
