#pragma once

#include "idsbench/ipv4.hpp"
#include "idsbench/plan.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace idsbench {

struct Timestamp {
  std::int64_t sec = 0;
  std::int32_t usec = 0;

  std::int64_t micros() const { return sec * 1'000'000 + usec; }
  static Timestamp from_micros(std::int64_t us) {
    auto s = us / 1'000'000;
    auto r = us % 1'000'000;
    if (r < 0) r += 1'000'000, --s;
    return {s, static_cast<std::int32_t>(r)};
  }
  double seconds() const { return static_cast<double>(micros()) / 1e6; }

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

namespace ipproto {
inline constexpr std::uint8_t kIcmp = 1;
inline constexpr std::uint8_t kTcp = 6;
inline constexpr std::uint8_t kUdp = 17;
}  // namespace ipproto

/// One captured Ethernet frame plus its decoded IPv4/L4 summary.
struct PacketRecord {
  Timestamp timestamp;
  bool ipv4 = false;
  Ipv4 src_addr;
  Ipv4 dst_addr;
  std::optional<std::uint16_t> src_port;
  std::optional<std::uint16_t> dst_port;
  std::uint8_t protocol = 0;  ///< IP protocol number
  std::uint32_t payload_len = 0;
  std::uint32_t orig_len = 0;  ///< on-wire length from the pcap record header
  std::vector<std::uint8_t> raw_bytes;

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

std::string protocol_name(std::uint8_t protocol);

/// Re-derives the summary fields from raw_bytes.
void decode_frame(PacketRecord& packet);

// Classic pcap, microsecond timestamps, Ethernet link type.
inline constexpr std::uint32_t kPcapMagic = 0xA1B2C3D4;
inline constexpr std::size_t kPcapGlobalHeaderLen = 24;
inline constexpr std::size_t kPcapRecordHeaderLen = 16;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;

std::vector<PacketRecord> decode_capture(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_capture(std::span<const PacketRecord> packets);
std::vector<PacketRecord> read_capture(const std::filesystem::path& path);
void write_capture(std::span<const PacketRecord> packets, const std::filesystem::path& path);

/// Ones-complement sum folded to 16 bits (not complemented).
std::uint16_t ones_complement_sum(std::span<const std::uint8_t> data, std::uint32_t initial = 0);

/// Recomputes IPv4 header and TCP/UDP checksums in place. UDP checksum 0 stays 0.
void recompute_checksums(PacketRecord& packet);

/// Builds an Ethernet/IPv4 frame with valid checksums. tcp_flags is ignored for non-TCP.
PacketRecord make_packet(Timestamp ts, Ipv4 src, Ipv4 dst, std::uint8_t protocol,
                         std::uint16_t src_port, std::uint16_t dst_port,
                         std::span<const std::uint8_t> payload, std::uint8_t tcp_flags = 0);

namespace tcpflag {
inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kRst = 0x04;
inline constexpr std::uint8_t kPsh = 0x08;
inline constexpr std::uint8_t kAck = 0x10;
}  // namespace tcpflag

struct AttackTrace {
  std::string trace_id;
  AttackType attack_type;
  Ipv4 source_address;
  Ipv4 target_address;
  std::vector<PacketRecord> packets;

  std::size_t packet_count() const { return packets.size(); }
};

/// Keeps only packets sent by the attacker, in order. Throws ValidationError if none remain.
std::vector<PacketRecord> strip_responses(std::span<const PacketRecord> packets, Ipv4 attacker);

/// Sets every source address to new_src and recomputes checksums. Non-IPv4 frames throw.
std::vector<PacketRecord> rewrite_source(std::span<const PacketRecord> packets, Ipv4 new_src);

/// strip -> keep attacker->target -> rewrite -> sort and re-base timestamps to 0.
AttackTrace prepare_trace(std::span<const PacketRecord> raw, std::string trace_id,
                          AttackType attack_type, Ipv4 attacker, Ipv4 new_src, Ipv4 target);
AttackTrace prepare_trace(const std::filesystem::path& raw_path, AttackType attack_type,
                          Ipv4 attacker, Ipv4 new_src, Ipv4 target);

/// Throws ValidationError on an empty trace.
void write_trace(const AttackTrace& trace, const std::filesystem::path& path);

// Addresses used by the synthetic capture generator.
inline constexpr Ipv4 kSynthAttacker{192, 168, 56, 101};
inline constexpr Ipv4 kSynthTarget{192, 168, 56, 102};

/// Deterministic two-way capture of one attack, standing in for a recorded lab capture.
/// Flood types emit at least min_flood_packets forward packets.
std::vector<PacketRecord> synth_attack_capture(AttackType type, std::uint64_t seed,
                                               int min_flood_packets = kDefaultFloodThreshold);

}  // namespace idsbench
