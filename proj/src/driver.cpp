#include "depthcharge/driver.hpp"

#include <stdexcept>

#include "depthcharge/keys.hpp"

namespace depthcharge {

RequestDriver::RequestDriver(Table& table, rb::ChallengeStore& store, CostLedger& ledger,
                             GoodObjectStats& stats)
    : table_(table), store_(store), ledger_(ledger), stats_(stats) {}

void RequestDriver::enforce_roles(Principal who, rb::OpKind op, std::string_view key) const {
    const bool directed = is_directed_key(key);
    if (who == Principal::adversary && !directed)
        throw std::logic_error("adversary request on a non-directed key");
    if (who == Principal::client && directed)
        throw std::logic_error("client request on a directed key");
    (void)op;
}

RequestOutcome RequestDriver::do_insert(Principal who, std::string_view key, uint32_t index) {
    enforce_roles(who, rb::OpKind::insert, key);
    return settle(who, rb::OpKind::insert, key, table_.quote_insert(index, key));
}

RequestOutcome RequestDriver::do_query(Principal who, std::string_view key) {
    enforce_roles(who, rb::OpKind::query, key);
    return settle(who, rb::OpKind::query, key, table_.quote_query(key));
}

RequestOutcome RequestDriver::do_erase(Principal who, std::string_view key) {
    enforce_roles(who, rb::OpKind::erase, key);
    return settle(who, rb::OpKind::erase, key, table_.quote_erase(key));
}

RequestOutcome RequestDriver::settle(Principal who, rb::OpKind op, std::string_view key,
                                     Quote q) {
    rb::Solution sol;
    if (q.challenge) {
        sol = store_.solve(*q.challenge, meter(who));
        ++settled_with_challenge_;
    }

    std::vector<std::string> before;
    if (wallets_ != nullptr) before = table_.bucket_keys(q.index);

    RequestOutcome out;
    switch (op) {
        case rb::OpKind::insert: out = table_.settle_insert(q, key, sol); break;
        case rb::OpKind::query: out = table_.settle_query(q, key, sol); break;
        case rb::OpKind::erase: out = table_.settle_erase(q, key, sol); break;
    }

    // Single-threaded settlement follows its quote immediately, so the quoted
    // charge, the traversal, and the prior depth must agree exactly.
    if (out.kind == OutcomeKind::found || out.kind == OutcomeKind::deleted) {
        if (!out.depth_before || out.rb_charged != out.latency ||
            out.rb_charged != *out.depth_before)
            throw std::logic_error("charge/depth mismatch on a hit");
    } else if (out.kind == OutcomeKind::not_found) {
        if (out.rb_charged != out.latency)
            throw std::logic_error("charge/length mismatch on a miss");
    }

    ++seq_;
    if (q.hardness == 0 && out.kind == OutcomeKind::not_found) ++ops_.free_probes;

    SettledRecord rec;
    rec.who = who;
    rec.op = op;
    rec.outcome = out.kind;
    rec.index = q.index;
    rec.rb_charged = out.rb_charged;
    rec.latency = out.latency;
    rec.directed_key = is_directed_key(key);
    rec.depth_before = out.depth_before;
    ledger_.record(rec);

    if (out.kind == OutcomeKind::inserted) stats_.on_insert(q.index, rec.directed_key);
    if (out.kind == OutcomeKind::deleted) stats_.on_remove(q.index, rec.directed_key);

    if (wallets_ != nullptr)
        wallets_->apply(seq_, rec, std::string(key), before, table_.bucket_keys(q.index));

    if (trace_enabled_) {
        TraceRow row;
        row.seq = seq_;
        row.who = who;
        row.op = op;
        row.index = q.index;
        row.outcome = out.kind;
        row.reject = out.reject;
        row.rb_charged = out.rb_charged;
        row.latency = out.latency;
        row.depth_before = out.depth_before;
        row.key = std::string(key);
        trace_.push_back(std::move(row));
    }
    return out;
}

}  // namespace depthcharge
