#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "depthcharge/rb.hpp"
#include "depthcharge/table.hpp"

namespace depthcharge {

// Binary framing, all integers big-endian on the wire:
//
//   frame   := u32 payload_len, payload
//   payload := u8 version (=1), u8 type, body
//
//   REQUEST  (1): u8 op (0 insert, 1 query, 2 delete), u8 flags
//                 (bit0: declared index follows), [u32 index],
//                 u16 key_len, key bytes
//   CHALLENGE(2): u64 id_hi, u64 id_lo, u32 hardness, u64 salt_hi,
//                 u64 salt_lo — an all-zero id means hardness 0,
//                 nothing to solve, send an empty SOLUTION back
//   SOLUTION (3): u64 id_hi, u64 id_lo, u32 count, count x u64 nonce
//   RESULT   (4): u8 outcome, u8 reject, u32 latency, u32 rb_charged,
//                 u32 depth_before (0 when absent), u32 index
//   ERROR    (5): u16 msg_len, msg bytes
//
// One round trip: client sends REQUEST, server answers CHALLENGE,
// client sends SOLUTION, server answers RESULT. Errors close the
// conversation for that request but keep the connection.

constexpr uint8_t kWireVersion = 1;

enum class FrameType : uint8_t {
    request = 1,
    challenge = 2,
    solution = 3,
    result = 4,
    error = 5,
};

struct WireRequest {
    rb::OpKind op = rb::OpKind::query;
    std::optional<uint32_t> declared_index;  // honored only in simulation mode
    std::string key;
};

struct WireChallenge {
    rb::ChallengeId id;  // zero id: hardness 0, no work owed
    uint32_t hardness = 0;
    uint64_t salt_hi = 0;
    uint64_t salt_lo = 0;
};

struct WireSolution {
    rb::ChallengeId id;
    std::vector<uint64_t> nonces;
};

struct WireResult {
    OutcomeKind outcome = OutcomeKind::rejected;
    RejectReason reject = RejectReason::none;
    uint32_t latency = 0;
    uint32_t rb_charged = 0;
    uint32_t depth_before = 0;  // 0 = not applicable
    uint32_t index = 0;
};

struct WireError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Codec. encode_* yields the full frame (length prefix included);
// decode_* takes the payload only and throws WireError on malformed input.
std::string encode_request(const WireRequest& r);
std::string encode_challenge(const WireChallenge& c);
std::string encode_solution(const WireSolution& s);
std::string encode_result(const WireResult& r);
std::string encode_error(const std::string& msg);

FrameType payload_type(const std::string& payload);
WireRequest decode_request(const std::string& payload);
WireChallenge decode_challenge(const std::string& payload);
WireSolution decode_solution(const std::string& payload);
WireResult decode_result(const std::string& payload);
std::string decode_error(const std::string& payload);

struct ServerConfig {
    TableConfig table;
    rb::BackendKind backend = rb::BackendKind::pow;
    rb::PowParams pow;
    uint64_t store_seed = 0;
    uint64_t challenge_ttl_ms = 300000;
    std::string bind_addr = "127.0.0.1";
    // Simulation mode lets a request carry a declared index, standing in for
    // an adversary with knowledge of the hash function. Off, every request is
    // placed by hashing its key.
    bool simulation_mode = false;
    std::function<uint64_t()> clock;  // optional injected clock for the store
};

// Serves the table over TCP, one thread per connection. Quotes take the
// table lock shared, settlements take it exclusive; the challenge store does
// its own locking.
class Server {
public:
    explicit Server(ServerConfig cfg);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds and starts accepting. Port 0 picks an ephemeral port; port()
    // reports the bound one.
    void start(uint16_t port = 0);
    void stop();
    uint16_t port() const { return port_; }

    uint64_t requests_served() const { return served_.load(); }
    uint64_t verify_evals() const { return store_.verify_evals(); }

    Table& table() { return table_; }
    rb::ChallengeStore& store() { return store_; }

private:
    void accept_loop();
    void serve_connection(int fd);
    bool handle_request(int fd, const std::string& payload);

    ServerConfig cfg_;
    rb::ChallengeStore store_;
    Table table_;
    mutable std::shared_mutex table_mu_;
    int listen_fd_ = -1;
    uint16_t port_ = 0;
    std::atomic<bool> running_{false};
    std::atomic<uint64_t> served_{0};
    std::thread accept_thread_;
    std::vector<std::thread> workers_;
    std::mutex workers_mu_;
    // Open connection fds, so stop() can shut them down and unblock workers
    // parked in recv(). Workers deregister before closing their own fd.
    std::unordered_set<int> conns_;
    std::mutex conns_mu_;
};

// Blocking client for one server. Solves whatever challenge the server
// quotes, metering the work, and retries a lost connection once with a
// fresh quote.
class Client {
public:
    Client(const std::string& host, uint16_t port,
           rb::BackendKind backend = rb::BackendKind::pow,
           rb::PowParams pow = {});
    ~Client();

    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;

    WireResult insert(const std::string& key, std::optional<uint32_t> declared_index = {});
    WireResult query(const std::string& key);
    WireResult erase(const std::string& key);

    const rb::WorkMeter& meter() const { return meter_; }

private:
    WireResult round_trip(const WireRequest& req);
    WireResult round_trip_once(const WireRequest& req);
    void connect_or_throw();
    void close_fd();

    std::string host_;
    uint16_t port_;
    rb::BackendKind backend_;
    rb::PowParams pow_;
    int fd_ = -1;
    rb::WorkMeter meter_;
};

}  // namespace depthcharge
