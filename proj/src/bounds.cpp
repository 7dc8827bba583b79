#include "depthcharge/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace depthcharge {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

CheckResult finish(CheckResult r, const CheckSpec& spec) {
    r.expect_violation = spec.expect_violation;
    r.as_expected = (r.satisfied != spec.expect_violation);
    return r;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

uint64_t greedy_flood_count(uint64_t budget) {
    // b(b+1)/2 <= budget, solved by the quadratic formula then nudged exact.
    uint64_t b = static_cast<uint64_t>((std::sqrt(8.0 * static_cast<double>(budget) + 1.0) - 1.0) / 2.0);
    while ((b + 1) * (b + 2) / 2 <= budget) ++b;
    while (b > 0 && b * (b + 1) / 2 > budget) --b;
    return b;
}

CheckResult evaluate_check(const CheckSpec& spec, const BoundContext& ctx) {
    const CostLedger& led = *ctx.ledger;
    const GoodObjectStats& st = *ctx.stats;
    CheckResult r;
    r.name = spec.name;

    if (spec.name == "chain_length") {
        double B = static_cast<double>(led.adversary_rb());
        r.bound = std::sqrt(2.0 * B) + st.ell_max();
        r.measured = ctx.max_chain;
        r.satisfied = r.measured <= r.bound;
        r.detail = "B=" + fmt(B) + " ell_max=" + fmt(st.ell_max());
        return finish(r, spec);
    }

    if (spec.name == "flood_greedy") {
        if (!ctx.flood_budget || !ctx.flood_index)
            throw std::invalid_argument("flood_greedy requires a flood phase");
        uint64_t budget = *ctx.flood_budget;
        uint64_t b = st.bad_inserts_at(*ctx.flood_index);
        uint64_t expect = greedy_flood_count(budget);
        r.bound = static_cast<double>(expect);
        r.measured = static_cast<double>(b);
        bool fits = b * (b + 1) / 2 <= budget;
        bool below_root = static_cast<double>(b) < std::sqrt(2.0 * static_cast<double>(budget));
        r.satisfied = (b == expect) && fits && below_root;
        r.detail = "budget=" + std::to_string(budget) + " spend=" + std::to_string(b * (b + 1) / 2) +
                   " sqrt(2*budget)=" + fmt(std::sqrt(2.0 * static_cast<double>(budget)));
        return finish(r, spec);
    }

    if (spec.name == "spread_lower") {
        uint64_t b = led.bad_inserts();
        uint32_t s = st.attacked_count();
        r.bound = s == 0 ? 0.0
                         : static_cast<double>(b) * static_cast<double>(b) / (8.0 * s);
        r.measured = static_cast<double>(led.adversary_rb());
        r.satisfied = r.measured >= r.bound;
        r.detail = "b=" + std::to_string(b) + " s=" + std::to_string(s) + " (measured >= bound)";
        return finish(r, spec);
    }

    if (spec.name == "insert_upper") {
        uint32_t s = st.targeted_count();
        uint64_t bt = st.bad_inserts_in_targeted();
        double ell = st.ell_max();
        uint64_t measured = 0;
        for (uint32_t i : st.targeted_indices()) measured += led.good_insert_rb_at(i);
        r.bound = s * ell * ell + static_cast<double>(bt) * ell;
        r.measured = static_cast<double>(measured);
        r.satisfied = r.measured <= r.bound;
        r.detail = "s=" + std::to_string(s) + " b_t=" + std::to_string(bt) + " ell_max=" + fmt(ell);
        return finish(r, spec);
    }

    if (spec.name == "per_list") {
        r.satisfied = true;
        double worst_ratio = -1.0;
        for (uint32_t i = 0; i < led.index_count(); ++i) {
            uint64_t q = led.good_hits_at(i);
            if (q == 0) continue;
            double Bi = static_cast<double>(led.adversary_rb_at(i));
            double ell = st.max_good_at(i);
            double bound = static_cast<double>(led.good_insert_rb_at(i)) +
                           ell * (static_cast<double>(q) + std::sqrt(2.0 * q * Bi));
            double measured = static_cast<double>(led.good_hit_rb_at(i));
            if (measured > bound) r.satisfied = false;
            double ratio = bound > 0 ? measured / bound : 0.0;
            if (ratio > worst_ratio) {
                worst_ratio = ratio;
                r.bound = bound;
                r.measured = measured;
                r.detail = "worst index=" + std::to_string(i) + " q_i=" + std::to_string(q) +
                           " B_i=" + fmt(Bi) + " ell_i=" + fmt(ell);
            }
        }
        if (worst_ratio < 0) r.detail = "no client hits anywhere";
        return finish(r, spec);
    }

    if (spec.name == "global") {
        double N = static_cast<double>(led.good_inserts() + led.good_queries() + led.good_deletes());
        double B = static_cast<double>(led.adversary_rb());
        double ell2 = static_cast<double>(st.ell_max()) * st.ell_max();
        r.bound = (4.0 * N + 5.0 * kSqrt2 * std::sqrt(N * B)) * ell2;
        r.measured = static_cast<double>(led.algorithm_model_rb());
        r.satisfied = r.measured <= r.bound;
        double c8 = 8.0 * (N + std::sqrt(N * B)) * ell2;
        r.detail = "N=" + fmt(N) + " B=" + fmt(B) + " ell_max=" + std::to_string(st.ell_max()) +
                   " C8_form=" + fmt(c8);
        return finish(r, spec);
    }

    if (spec.name == "query_mean") {
        if (!spec.factor) throw std::invalid_argument("query_mean requires a factor");
        uint64_t hits = 0, rb = 0;
        for (uint32_t i = 0; i < led.index_count(); ++i) {
            hits += led.good_hits_at(i);
            rb += led.good_hit_rb_at(i);
        }
        r.bound = *spec.factor * st.ell_ave();
        r.measured = hits == 0 ? 0.0 : static_cast<double>(rb) / static_cast<double>(hits);
        r.satisfied = r.measured <= r.bound;
        r.detail = "hits=" + std::to_string(hits) + " ell_ave=" + fmt(st.ell_ave()) +
                   " factor=" + fmt(*spec.factor);
        return finish(r, spec);
    }

    if (spec.name == "pump_exact") {
        if (!spec.d) throw std::invalid_argument("pump_exact requires d");
        uint64_t d = *spec.d;
        r.bound = static_cast<double>(d * (d + 3) / 2);
        r.measured = static_cast<double>(ctx.pump_spend);
        bool query_ok = ctx.last_good_query_rb && *ctx.last_good_query_rb == d + 1;
        r.satisfied = (ctx.pump_spend == d * (d + 3) / 2) && query_ok;
        r.detail = "next query rb=" +
                   (ctx.last_good_query_rb ? std::to_string(*ctx.last_good_query_rb)
                                           : std::string("none")) +
                   " want=" + std::to_string(d + 1);
        return finish(r, spec);
    }

    if (spec.name == "wallet") {
        if (ctx.wallets == nullptr)
            throw std::invalid_argument("wallet check requires the oracle attached");
        r.bound = 0.0;
        r.measured = static_cast<double>(ctx.wallets->violations());
        r.satisfied = ctx.wallets->violations() == 0;
        if (auto v = ctx.wallets->first_violation())
            r.detail = "first at seq=" + std::to_string(v->seq) +
                       " depth=" + std::to_string(v->depth) +
                       " wallet=" + std::to_string(v->wallet);
        return finish(r, spec);
    }

    if (spec.name == "budget") {
        if (!spec.budget) throw std::invalid_argument("budget check requires a budget");
        r.bound = static_cast<double>(*spec.budget);
        r.measured = static_cast<double>(ctx.attack_spend);
        r.satisfied = ctx.attack_spend <= *spec.budget;
        return finish(r, spec);
    }

    throw std::invalid_argument("unknown check: " + spec.name);
}

std::vector<CheckResult> evaluate_checks(const std::vector<CheckSpec>& specs,
                                         const BoundContext& ctx) {
    std::vector<CheckResult> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(evaluate_check(s, ctx));
    return out;
}

}  // namespace depthcharge
