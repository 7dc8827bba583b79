#include "depthcharge/table.hpp"

#include <stdexcept>

namespace depthcharge {

const char* to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::inserted: return "inserted";
        case OutcomeKind::found: return "found";
        case OutcomeKind::not_found: return "not_found";
        case OutcomeKind::deleted: return "deleted";
        case OutcomeKind::rejected: return "rejected";
    }
    return "?";
}

const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::none: return "none";
        case RejectReason::unknown_challenge: return "unknown_challenge";
        case RejectReason::expired: return "expired";
        case RejectReason::binding_mismatch: return "binding_mismatch";
        case RejectReason::bad_proof: return "bad_proof";
        case RejectReason::duplicate_key: return "duplicate_key";
    }
    return "?";
}

Table::Table(TableConfig cfg, rb::ChallengeStore& store) : cfg_(cfg), store_(&store) {
    if (cfg_.index_count == 0) throw std::invalid_argument("index_count must be >= 1");
    buckets_.resize(cfg_.index_count);
}

Table::Table(const Table& other) : Table(other, *other.store_) {}

Table::Table(const Table& other, rb::ChallengeStore& store)
    : cfg_(other.cfg_), store_(&store) {
    buckets_.resize(cfg_.index_count);
    copy_from(other);
}

void Table::copy_from(const Table& other) {
    for (uint32_t i = 0; i < cfg_.index_count; ++i)
        for (Node* n = other.buckets_[i].head; n != nullptr; n = n->next)
            append_tail(buckets_[i], n->key);
    live_ = other.live_;
}

Table::~Table() {
    for (auto& b : buckets_) {
        Node* n = b.head;
        while (n != nullptr) {
            Node* next = n->next;
            delete n;
            n = next;
        }
    }
}

uint32_t Table::hash_index(std::string_view key) const {
    if (is_directed_key(key)) return directed_index(key) % cfg_.index_count;
    return bounded(keyed_hash(key, cfg_.hash_seed), cfg_.index_count);
}

void Table::check_index(uint32_t index) const {
    if (index >= cfg_.index_count) throw std::out_of_range("bucket index out of range");
}

uint32_t Table::bucket_length(uint32_t index) const {
    check_index(index);
    return buckets_[index].len;
}

std::vector<std::string> Table::bucket_keys(uint32_t index) const {
    check_index(index);
    std::vector<std::string> out;
    out.reserve(buckets_[index].len);
    for (Node* n = buckets_[index].head; n != nullptr; n = n->next) out.push_back(n->key);
    return out;
}

bool Table::contains(std::string_view key) const { return live_.find(key) != live_.end(); }

std::optional<uint32_t> Table::depth_of(std::string_view key) const {
    const Bucket& b = buckets_[hash_index(key)];
    uint32_t depth = 0;
    if (find_in_bucket(b, key, depth) != nullptr) return depth;
    return std::nullopt;
}

TableSnapshot Table::snapshot() const {
    TableSnapshot s;
    s.lengths.reserve(cfg_.index_count);
    s.buckets.reserve(cfg_.index_count);
    s.tail_ok.reserve(cfg_.index_count);
    for (uint32_t i = 0; i < cfg_.index_count; ++i) {
        const Bucket& b = buckets_[i];
        s.lengths.push_back(b.len);
        s.buckets.push_back(bucket_keys(i));
        bool ok = (b.len == s.buckets.back().size());
        if (b.len == 0) {
            ok = ok && b.head == nullptr && b.tail == nullptr;
        } else {
            ok = ok && b.tail != nullptr && b.tail->next == nullptr && b.head->prev == nullptr &&
                 b.tail->key == s.buckets.back().back();
        }
        s.tail_ok.push_back(ok);
        s.live_objects += b.len;
    }
    return s;
}

Table::Node* Table::find_in_bucket(const Bucket& b, std::string_view key, uint32_t& depth) const {
    uint32_t d = 0;
    for (Node* n = b.head; n != nullptr; n = n->next) {
        ++d;
        if (n->key == key) {
            depth = d;
            return n;
        }
    }
    depth = b.len;
    return nullptr;
}

void Table::append_tail(Bucket& b, std::string_view key) {
    Node* n = new Node{std::string(key), b.tail, nullptr};
    if (b.tail != nullptr)
        b.tail->next = n;
    else
        b.head = n;
    b.tail = n;
    ++b.len;
}

void Table::unlink(Bucket& b, Node* n) {
    if (n->prev != nullptr)
        n->prev->next = n->next;
    else
        b.head = n->next;
    if (n->next != nullptr)
        n->next->prev = n->prev;
    else
        b.tail = n->prev;
    n->prev = n->next = nullptr;
    --b.len;
}

void Table::splice_to_head(Bucket& b, Node* n) {
    if (b.head == n) return;
    unlink(b, n);
    n->next = b.head;
    if (b.head != nullptr) b.head->prev = n;
    b.head = n;
    if (b.tail == nullptr) b.tail = n;
    ++b.len;
}

Quote Table::quote_insert(uint32_t index, std::string_view key) {
    check_index(index);
    Quote q;
    q.op = rb::OpKind::insert;
    q.index = index;
    q.hardness = buckets_[index].len + 1;
    q.challenge =
        store_->issue(q.hardness, rb::RequestBinding{q.op, std::string(key), index});
    return q;
}

Quote Table::quote_lookup(std::string_view key, rb::OpKind op) {
    Quote q;
    q.op = op;
    q.index = hash_index(key);
    uint32_t depth = 0;
    q.present = find_in_bucket(buckets_[q.index], key, depth) != nullptr;
    q.hardness = q.present ? depth : buckets_[q.index].len;
    if (q.hardness > 0)
        q.challenge = store_->issue(q.hardness, rb::RequestBinding{op, std::string(key), q.index});
    return q;
}

Quote Table::quote_query(std::string_view key) { return quote_lookup(key, rb::OpKind::query); }

// Deletes are priced exactly like queries; only the bound operation differs.
Quote Table::quote_erase(std::string_view key) { return quote_lookup(key, rb::OpKind::erase); }

std::optional<RejectReason> Table::redeem(const Quote& q, rb::OpKind op, std::string_view key,
                                          const rb::Solution& sol) {
    if (q.op != op) return RejectReason::binding_mismatch;
    if (q.hardness == 0) {
        // Nothing was charged and nothing is owed; only query/erase quotes can
        // be zero-hard.
        return std::nullopt;
    }
    if (!q.challenge) return RejectReason::unknown_challenge;
    auto status = store_->verify(sol, rb::RequestBinding{op, std::string(key), q.index});
    switch (status) {
        case rb::VerifyStatus::ok: return std::nullopt;
        case rb::VerifyStatus::unknown_challenge: return RejectReason::unknown_challenge;
        case rb::VerifyStatus::expired: return RejectReason::expired;
        case rb::VerifyStatus::binding_mismatch: return RejectReason::binding_mismatch;
        case rb::VerifyStatus::bad_proof: return RejectReason::bad_proof;
    }
    return RejectReason::bad_proof;
}

RequestOutcome Table::settle_insert(const Quote& q, std::string_view key,
                                    const rb::Solution& sol) {
    RequestOutcome out;
    if (auto reject = redeem(q, rb::OpKind::insert, key, sol)) {
        out.kind = OutcomeKind::rejected;
        out.reject = *reject;
        return out;
    }
    out.rb_charged = q.hardness;  // burned even if the table refuses the key
    if (contains(key)) {
        out.kind = OutcomeKind::rejected;
        out.reject = RejectReason::duplicate_key;
        return out;
    }
    append_tail(buckets_[q.index], key);
    live_.emplace(key);
    out.kind = OutcomeKind::inserted;
    out.latency = 1;  // tail pointer append, no traversal
    return out;
}

RequestOutcome Table::settle_query(const Quote& q, std::string_view key, const rb::Solution& sol) {
    RequestOutcome out;
    if (auto reject = redeem(q, rb::OpKind::query, key, sol)) {
        out.kind = OutcomeKind::rejected;
        out.reject = *reject;
        return out;
    }
    out.rb_charged = q.hardness;
    Bucket& b = buckets_[q.index];
    uint32_t depth = 0;
    Node* n = find_in_bucket(b, key, depth);
    if (n == nullptr) {
        out.kind = OutcomeKind::not_found;
        out.latency = b.len;
        return out;
    }
    out.kind = OutcomeKind::found;
    out.latency = depth;
    out.depth_before = depth;
    if (cfg_.move_to_front) splice_to_head(b, n);
    return out;
}

RequestOutcome Table::settle_erase(const Quote& q, std::string_view key, const rb::Solution& sol) {
    RequestOutcome out;
    if (auto reject = redeem(q, rb::OpKind::erase, key, sol)) {
        out.kind = OutcomeKind::rejected;
        out.reject = *reject;
        return out;
    }
    out.rb_charged = q.hardness;
    Bucket& b = buckets_[q.index];
    uint32_t depth = 0;
    Node* n = find_in_bucket(b, key, depth);
    if (n == nullptr) {
        out.kind = OutcomeKind::not_found;
        out.latency = b.len;
        return out;
    }
    out.kind = OutcomeKind::deleted;
    out.latency = depth;
    out.depth_before = depth;
    unlink(b, n);
    live_.erase(live_.find(n->key));
    delete n;
    return out;
}

}  // namespace depthcharge
