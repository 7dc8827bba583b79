#include "depthcharge/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <unordered_set>

namespace depthcharge {

namespace {

constexpr uint32_t kMaxFrame = 1 << 20;

// Socket-level failure, as opposed to a malformed or refused exchange;
// only these are worth a reconnect.
struct ConnectionLost : WireError {
    using WireError::WireError;
};

void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v));
}

void put_u32(std::string& out, uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>(v >> shift));
}

void put_u64(std::string& out, uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>(v >> shift));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    uint8_t u8() {
        if (pos + 1 > buf.size()) throw WireError("truncated frame");
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint16_t u16() {
        uint16_t v = u8();
        return static_cast<uint16_t>(v << 8 | u8());
    }
    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | u8();
        return v;
    }
    uint64_t u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | u8();
        return v;
    }
    std::string bytes(std::size_t n) {
        if (pos + n > buf.size()) throw WireError("truncated frame");
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
    void done() const {
        if (pos != buf.size()) throw WireError("trailing bytes in frame");
    }
};

std::string frame(FrameType type, const std::string& body) {
    std::string payload;
    payload.reserve(2 + body.size());
    put_u8(payload, kWireVersion);
    put_u8(payload, static_cast<uint8_t>(type));
    payload += body;
    std::string out;
    out.reserve(4 + payload.size());
    put_u32(out, static_cast<uint32_t>(payload.size()));
    out += payload;
    return out;
}

Reader open_payload(const std::string& payload, FrameType want) {
    Reader r{payload};
    if (r.u8() != kWireVersion) throw WireError("unsupported protocol version");
    auto got = static_cast<FrameType>(r.u8());
    if (got != want) throw WireError("unexpected frame type");
    return r;
}

uint8_t op_code(rb::OpKind op) {
    switch (op) {
        case rb::OpKind::insert: return 0;
        case rb::OpKind::query: return 1;
        case rb::OpKind::erase: return 2;
    }
    throw WireError("bad op");
}

rb::OpKind op_from(uint8_t code) {
    switch (code) {
        case 0: return rb::OpKind::insert;
        case 1: return rb::OpKind::query;
        case 2: return rb::OpKind::erase;
    }
    throw WireError("bad op code");
}

// Socket helpers. All return false on EOF or error; callers close.

bool read_exact(int fd, void* buf, std::size_t n) {
    auto* p = static_cast<char*>(buf);
    while (n > 0) {
        ssize_t got = ::recv(fd, p, n, 0);
        if (got <= 0) {
            if (got < 0 && errno == EINTR) continue;
            return false;
        }
        p += got;
        n -= static_cast<std::size_t>(got);
    }
    return true;
}

bool write_all(int fd, const std::string& data) {
    const char* p = data.data();
    std::size_t n = data.size();
    while (n > 0) {
        ssize_t sent = ::send(fd, p, n, MSG_NOSIGNAL);
        if (sent <= 0) {
            if (sent < 0 && errno == EINTR) continue;
            return false;
        }
        p += sent;
        n -= static_cast<std::size_t>(sent);
    }
    return true;
}

bool read_frame(int fd, std::string& payload) {
    uint8_t hdr[4];
    if (!read_exact(fd, hdr, 4)) return false;
    uint32_t len = uint32_t{hdr[0]} << 24 | uint32_t{hdr[1]} << 16 | uint32_t{hdr[2]} << 8 | hdr[3];
    if (len < 2 || len > kMaxFrame) return false;
    payload.resize(len);
    return read_exact(fd, payload.data(), len);
}

}  // namespace

std::string encode_request(const WireRequest& r) {
    std::string body;
    put_u8(body, op_code(r.op));
    put_u8(body, r.declared_index ? 1 : 0);
    if (r.declared_index) put_u32(body, *r.declared_index);
    if (r.key.size() > UINT16_MAX) throw WireError("key too long");
    put_u16(body, static_cast<uint16_t>(r.key.size()));
    body += r.key;
    return frame(FrameType::request, body);
}

std::string encode_challenge(const WireChallenge& c) {
    std::string body;
    put_u64(body, c.id.hi);
    put_u64(body, c.id.lo);
    put_u32(body, c.hardness);
    put_u64(body, c.salt_hi);
    put_u64(body, c.salt_lo);
    return frame(FrameType::challenge, body);
}

std::string encode_solution(const WireSolution& s) {
    std::string body;
    put_u64(body, s.id.hi);
    put_u64(body, s.id.lo);
    put_u32(body, static_cast<uint32_t>(s.nonces.size()));
    for (uint64_t n : s.nonces) put_u64(body, n);
    return frame(FrameType::solution, body);
}

std::string encode_result(const WireResult& r) {
    std::string body;
    put_u8(body, static_cast<uint8_t>(r.outcome));
    put_u8(body, static_cast<uint8_t>(r.reject));
    put_u32(body, r.latency);
    put_u32(body, r.rb_charged);
    put_u32(body, r.depth_before);
    put_u32(body, r.index);
    return frame(FrameType::result, body);
}

std::string encode_error(const std::string& msg) {
    std::string body;
    std::string clipped = msg.substr(0, 512);
    put_u16(body, static_cast<uint16_t>(clipped.size()));
    body += clipped;
    return frame(FrameType::error, body);
}

FrameType payload_type(const std::string& payload) {
    Reader r{payload};
    if (r.u8() != kWireVersion) throw WireError("unsupported protocol version");
    uint8_t t = r.u8();
    if (t < 1 || t > 5) throw WireError("unknown frame type");
    return static_cast<FrameType>(t);
}

WireRequest decode_request(const std::string& payload) {
    Reader r = open_payload(payload, FrameType::request);
    WireRequest out;
    out.op = op_from(r.u8());
    uint8_t flags = r.u8();
    if (flags & ~uint8_t{1}) throw WireError("unknown request flags");
    if (flags & 1) out.declared_index = r.u32();
    out.key = r.bytes(r.u16());
    r.done();
    if (out.key.empty()) throw WireError("empty key");
    return out;
}

WireChallenge decode_challenge(const std::string& payload) {
    Reader r = open_payload(payload, FrameType::challenge);
    WireChallenge out;
    out.id.hi = r.u64();
    out.id.lo = r.u64();
    out.hardness = r.u32();
    out.salt_hi = r.u64();
    out.salt_lo = r.u64();
    r.done();
    if (out.id.is_zero() != (out.hardness == 0)) throw WireError("zero id must mean zero hardness");
    return out;
}

WireSolution decode_solution(const std::string& payload) {
    Reader r = open_payload(payload, FrameType::solution);
    WireSolution out;
    out.id.hi = r.u64();
    out.id.lo = r.u64();
    uint32_t count = r.u32();
    if (count > kMaxFrame / 8) throw WireError("solution too large");
    out.nonces.reserve(count);
    for (uint32_t i = 0; i < count; ++i) out.nonces.push_back(r.u64());
    r.done();
    return out;
}

WireResult decode_result(const std::string& payload) {
    Reader r = open_payload(payload, FrameType::result);
    WireResult out;
    uint8_t outcome = r.u8();
    if (outcome > static_cast<uint8_t>(OutcomeKind::rejected)) throw WireError("bad outcome");
    out.outcome = static_cast<OutcomeKind>(outcome);
    uint8_t reject = r.u8();
    if (reject > static_cast<uint8_t>(RejectReason::duplicate_key)) throw WireError("bad reject");
    out.reject = static_cast<RejectReason>(reject);
    out.latency = r.u32();
    out.rb_charged = r.u32();
    out.depth_before = r.u32();
    out.index = r.u32();
    r.done();
    return out;
}

std::string decode_error(const std::string& payload) {
    Reader r = open_payload(payload, FrameType::error);
    std::string msg = r.bytes(r.u16());
    r.done();
    return msg;
}

// ---- server ----

Server::Server(ServerConfig cfg)
    : cfg_(std::move(cfg)),
      store_(cfg_.backend, cfg_.store_seed, cfg_.pow),
      table_(cfg_.table, store_) {
    store_.set_ttl_ms(cfg_.challenge_ttl_ms);
    if (cfg_.clock) store_.set_clock(cfg_.clock);
}

Server::~Server() { stop(); }

void Server::start(uint16_t port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw WireError("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    if (::inet_pton(AF_INET, cfg_.bind_addr.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw WireError("bad bind address: " + cfg_.bind_addr);
    }
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw WireError("bind() failed");
    }
    if (::listen(listen_fd_, 16) < 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw WireError("listen() failed");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    running_.store(true);
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
    if (!running_.exchange(false)) {
        if (accept_thread_.joinable()) accept_thread_.join();
        return;
    }
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
    if (accept_thread_.joinable()) accept_thread_.join();
    {
        // Unblock workers parked in recv() on live connections. Only fds
        // still registered get shut down, so a number the worker already
        // closed (and the OS may have reissued) is never touched.
        std::lock_guard lk(conns_mu_);
        for (int fd : conns_) ::shutdown(fd, SHUT_RDWR);
    }
    std::vector<std::thread> workers;
    {
        std::lock_guard lk(workers_mu_);
        workers.swap(workers_);
    }
    for (auto& w : workers)
        if (w.joinable()) w.join();
}

void Server::accept_loop() {
    while (running_.load()) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            break;  // listen socket closed by stop()
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        {
            std::lock_guard lk(conns_mu_);
            conns_.insert(fd);
        }
        std::lock_guard lk(workers_mu_);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void Server::serve_connection(int fd) {
    std::string payload;
    while (running_.load() && read_frame(fd, payload)) {
        bool keep = true;
        try {
            if (payload_type(payload) != FrameType::request) {
                keep = write_all(fd, encode_error("expected a request frame"));
            } else {
                keep = handle_request(fd, payload);
            }
        } catch (const WireError& e) {
            keep = write_all(fd, encode_error(e.what()));
        }
        if (!keep) break;
    }
    {
        std::lock_guard lk(conns_mu_);
        conns_.erase(fd);
    }
    ::close(fd);
}

bool Server::handle_request(int fd, const std::string& payload) {
    WireRequest req;
    try {
        req = decode_request(payload);
    } catch (const WireError& e) {
        return write_all(fd, encode_error(e.what()));
    }

    Quote q;
    try {
        std::shared_lock lk(table_mu_);
        if (req.op == rb::OpKind::insert) {
            uint32_t index;
            if (cfg_.simulation_mode && req.declared_index) {
                index = *req.declared_index;
                if (index >= table_.index_count())
                    return write_all(fd, encode_error("declared index out of range"));
            } else {
                index = table_.hash_index(req.key);
            }
            q = table_.quote_insert(index, req.key);
        } else if (req.op == rb::OpKind::query) {
            q = table_.quote_query(req.key);
        } else {
            q = table_.quote_erase(req.key);
        }
    } catch (const std::exception& e) {
        return write_all(fd, encode_error(e.what()));
    }

    WireChallenge wc;
    if (q.challenge) {
        wc.id = q.challenge->id;
        wc.hardness = q.challenge->hardness;
        wc.salt_hi = q.challenge->salt_hi;
        wc.salt_lo = q.challenge->salt_lo;
    }
    if (!write_all(fd, encode_challenge(wc))) return false;

    std::string sol_payload;
    if (!read_frame(fd, sol_payload)) return false;  // quote abandoned
    WireSolution ws;
    try {
        ws = decode_solution(sol_payload);
    } catch (const WireError& e) {
        return write_all(fd, encode_error(e.what()));
    }

    rb::Solution sol;
    sol.id = ws.id;
    sol.proofs = std::move(ws.nonces);

    RequestOutcome out;
    {
        std::unique_lock lk(table_mu_);
        switch (req.op) {
            case rb::OpKind::insert: out = table_.settle_insert(q, req.key, sol); break;
            case rb::OpKind::query: out = table_.settle_query(q, req.key, sol); break;
            case rb::OpKind::erase: out = table_.settle_erase(q, req.key, sol); break;
        }
    }
    served_.fetch_add(1);

    WireResult res;
    res.outcome = out.kind;
    res.reject = out.reject;
    res.latency = out.latency;
    res.rb_charged = out.rb_charged;
    res.depth_before = out.depth_before.value_or(0);
    res.index = q.index;
    return write_all(fd, encode_result(res));
}

// ---- client ----

Client::Client(const std::string& host, uint16_t port, rb::BackendKind backend, rb::PowParams pow)
    : host_(host), port_(port), backend_(backend), pow_(pow) {
    connect_or_throw();
}

Client::~Client() { close_fd(); }

void Client::close_fd() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Client::connect_or_throw() {
    close_fd();
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw WireError("socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port_);
    if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1) {
        close_fd();
        throw WireError("bad host address: " + host_);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        close_fd();
        throw WireError("connect() failed");
    }
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

WireResult Client::insert(const std::string& key, std::optional<uint32_t> declared_index) {
    WireRequest r;
    r.op = rb::OpKind::insert;
    r.declared_index = declared_index;
    r.key = key;
    return round_trip(r);
}

WireResult Client::query(const std::string& key) {
    WireRequest r;
    r.op = rb::OpKind::query;
    r.key = key;
    return round_trip(r);
}

WireResult Client::erase(const std::string& key) {
    WireRequest r;
    r.op = rb::OpKind::erase;
    r.key = key;
    return round_trip(r);
}

WireResult Client::round_trip(const WireRequest& req) {
    try {
        return round_trip_once(req);
    } catch (const ConnectionLost&) {
        // One reconnect, one fresh quote. A challenge stranded on the old
        // connection just expires server-side.
        connect_or_throw();
        return round_trip_once(req);
    }
}

WireResult Client::round_trip_once(const WireRequest& req) {
    if (fd_ < 0) connect_or_throw();
    if (!write_all(fd_, encode_request(req))) throw ConnectionLost("send failed");

    std::string payload;
    if (!read_frame(fd_, payload)) throw ConnectionLost("connection lost awaiting challenge");
    if (payload_type(payload) == FrameType::error)
        throw WireError("server: " + decode_error(payload));
    WireChallenge wc = decode_challenge(payload);

    WireSolution ws;
    ws.id = wc.id;
    if (wc.hardness > 0) {
        rb::Challenge ch;
        ch.id = wc.id;
        ch.hardness = wc.hardness;
        ch.salt_hi = wc.salt_hi;
        ch.salt_lo = wc.salt_lo;
        rb::ChallengeStore solver(backend_, 0, pow_);
        rb::Solution sol = solver.solve(ch, meter_);
        ws.nonces = std::move(sol.proofs);
    }
    if (!write_all(fd_, encode_solution(ws))) throw ConnectionLost("send failed");

    if (!read_frame(fd_, payload)) throw ConnectionLost("connection lost awaiting result");
    if (payload_type(payload) == FrameType::error)
        throw WireError("server: " + decode_error(payload));
    return decode_result(payload);
}

}  // namespace depthcharge
