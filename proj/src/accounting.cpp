#include "depthcharge/accounting.hpp"

#include <stdexcept>

namespace depthcharge {

const char* to_string(Principal p) {
    return p == Principal::client ? "client" : "adversary";
}

const char* to_string(rb::OpKind op) {
    switch (op) {
        case rb::OpKind::insert: return "insert";
        case rb::OpKind::query: return "query";
        case rb::OpKind::erase: return "delete";
    }
    return "?";
}

CostLedger::CostLedger(uint32_t index_count) : by_index_(index_count) {
    if (index_count == 0) throw std::invalid_argument("index_count must be >= 1");
}

void CostLedger::record(const SettledRecord& r) {
    if (r.index >= by_index_.size()) throw std::out_of_range("record index out of range");
    ++settled_;
    if (r.outcome == OutcomeKind::rejected) ++rejected_;
    PerIndex& at = by_index_[r.index];
    if (r.who == Principal::adversary) {
        adversary_rb_ += r.rb_charged;
        at.adversary_rb += r.rb_charged;
        if (r.outcome == OutcomeKind::inserted) ++bad_inserts_;
        if (r.op == rb::OpKind::query && r.outcome != OutcomeKind::rejected) ++bad_queries_;
        if (r.op == rb::OpKind::erase && r.outcome == OutcomeKind::deleted) ++bad_deletes_;
        return;
    }
    algorithm_rb_ += r.rb_charged;
    algorithm_latency_ += r.latency;
    switch (r.op) {
        case rb::OpKind::insert:
            if (r.outcome == OutcomeKind::inserted) {
                ++good_inserts_;
                ++at.good_inserts;
                good_insert_rb_ += r.rb_charged;
                at.good_insert_rb += r.rb_charged;
            }
            break;
        case rb::OpKind::query:
            if (r.outcome != OutcomeKind::rejected) ++good_queries_;
            if (r.outcome == OutcomeKind::found) {
                ++at.good_hits;
                at.good_hit_rb += r.rb_charged;
                good_hit_rb_total_ += r.rb_charged;
            }
            break;
        case rb::OpKind::erase:
            if (r.outcome != OutcomeKind::rejected) ++good_deletes_;
            if (r.outcome == OutcomeKind::deleted) {
                ++at.good_hits;
                at.good_hit_rb += r.rb_charged;
                good_hit_rb_total_ += r.rb_charged;
            }
            break;
    }
}

GoodObjectStats::GoodObjectStats(uint32_t index_count) : per_(index_count) {
    if (index_count == 0) throw std::invalid_argument("index_count must be >= 1");
}

void GoodObjectStats::on_insert(uint32_t index, bool directed) {
    PerIndex& p = per_.at(index);
    if (directed) {
        ++p.live_bad;
        ++p.cum_bad_inserts;
        return;
    }
    ++p.live_good;
    if (p.live_good > p.max_good) {
        ++p.max_good;
        ++sum_max_good_;
        if (p.max_good > ell_max_) ell_max_ = p.max_good;
    }
}

void GoodObjectStats::on_remove(uint32_t index, bool directed) {
    PerIndex& p = per_.at(index);
    if (directed) {
        if (p.live_bad == 0) throw std::logic_error("bad-object count underflow");
        --p.live_bad;
        return;
    }
    if (p.live_good == 0) throw std::logic_error("good-object count underflow");
    --p.live_good;
}

double GoodObjectStats::ell_ave() const {
    return static_cast<double>(sum_max_good_) / static_cast<double>(per_.size());
}

uint32_t GoodObjectStats::attacked_count() const {
    uint32_t n = 0;
    for (const auto& p : per_)
        if (p.cum_bad_inserts > 0) ++n;
    return n;
}

uint32_t GoodObjectStats::targeted_count() const {
    uint32_t n = 0;
    for (const auto& p : per_)
        if (p.cum_bad_inserts > 0 && p.max_good > 0) ++n;
    return n;
}

std::vector<uint32_t> GoodObjectStats::targeted_indices() const {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < per_.size(); ++i)
        if (per_[i].cum_bad_inserts > 0 && per_[i].max_good > 0) out.push_back(i);
    return out;
}

uint64_t GoodObjectStats::bad_inserts_in_targeted() const {
    uint64_t n = 0;
    for (const auto& p : per_)
        if (p.cum_bad_inserts > 0 && p.max_good > 0) n += p.cum_bad_inserts;
    return n;
}

}  // namespace depthcharge
