#include "idsbench/traceprep.hpp"

#include "idsbench/error.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace idsbench {
namespace {

constexpr std::size_t kEthHeaderLen = 14;
constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
constexpr std::uint16_t kEtherTypeVlan = 0x8100;
constexpr std::uint16_t kEtherTypeIpv6 = 0x86DD;

std::uint16_t be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

void put16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 8);
  p[1] = static_cast<std::uint8_t>(v);
}

void put32(std::uint8_t* p, std::uint32_t v) {
  put16(p, static_cast<std::uint16_t>(v >> 16));
  put16(p + 2, static_cast<std::uint16_t>(v));
}

struct Layout {
  std::size_t l3 = 0;
  std::uint16_t ethertype = 0;
};

Layout link_layout(const std::vector<std::uint8_t>& raw) {
  if (raw.size() < kEthHeaderLen) return {0, 0};
  std::size_t off = 12;
  std::uint16_t type = be16(raw.data() + off);
  if (type == kEtherTypeVlan && raw.size() >= kEthHeaderLen + 4) {
    off += 4;
    type = be16(raw.data() + off);
  }
  return {off + 2, type};
}

struct Ipv4View {
  std::size_t l3 = 0;
  std::size_t ihl = 0;
  std::size_t total_len = 0;  ///< clipped to the captured bytes
  std::size_t declared_len = 0;
  std::uint8_t protocol = 0;
  bool fragmented = false;  ///< MF set or nonzero offset
  bool first_fragment = true;
};

std::optional<Ipv4View> ipv4_view(const std::vector<std::uint8_t>& raw) {
  auto layout = link_layout(raw);
  if (layout.ethertype != kEtherTypeIpv4) return std::nullopt;
  std::size_t l3 = layout.l3;
  if (raw.size() < l3 + 20) return std::nullopt;
  const std::uint8_t* ip = raw.data() + l3;
  if ((ip[0] >> 4) != 4) return std::nullopt;
  Ipv4View v;
  v.l3 = l3;
  v.ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
  if (v.ihl < 20 || raw.size() < l3 + v.ihl) return std::nullopt;
  v.declared_len = be16(ip + 2);
  v.total_len = std::min(v.declared_len, raw.size() - l3);
  v.protocol = ip[9];
  std::uint16_t frag = be16(ip + 6);
  v.fragmented = (frag & 0x2000) != 0 || (frag & 0x1fff) != 0;
  v.first_fragment = (frag & 0x1fff) == 0;
  return v;
}

std::size_t l4_checksum_offset(std::uint8_t protocol) {
  return protocol == ipproto::kTcp ? 16 : 6;
}

bool has_l4_checksum(const Ipv4View& v, std::size_t captured) {
  if (v.protocol != ipproto::kTcp && v.protocol != ipproto::kUdp) return false;
  if (!v.first_fragment) return false;
  std::size_t need = v.protocol == ipproto::kTcp ? 20 : 8;
  return captured >= v.l3 + v.ihl + need;
}

std::uint16_t compute_l4_checksum(const std::vector<std::uint8_t>& raw, const Ipv4View& v) {
  const std::uint8_t* ip = raw.data() + v.l3;
  std::size_t l4_len = v.declared_len - v.ihl;
  std::array<std::uint8_t, 12> pseudo{};
  std::copy(ip + 12, ip + 20, pseudo.begin());
  pseudo[9] = v.protocol;
  put16(pseudo.data() + 10, static_cast<std::uint16_t>(l4_len));
  std::uint32_t sum = ones_complement_sum(pseudo);
  std::vector<std::uint8_t> segment(raw.begin() + static_cast<std::ptrdiff_t>(v.l3 + v.ihl),
                                    raw.begin() + static_cast<std::ptrdiff_t>(v.l3 + v.ihl + l4_len));
  put16(segment.data() + l4_checksum_offset(v.protocol), 0);
  std::uint16_t c = static_cast<std::uint16_t>(~ones_complement_sum(segment, sum));
  if (v.protocol == ipproto::kUdp && c == 0) c = 0xffff;
  return c;
}

// RFC 1624 incremental update for a 32-bit field change.
std::uint16_t adjust_checksum(std::uint16_t check, std::uint32_t old_value, std::uint32_t new_value) {
  std::uint32_t sum = static_cast<std::uint16_t>(~check);
  sum += static_cast<std::uint16_t>(~(old_value >> 16));
  sum += static_cast<std::uint16_t>(~old_value);
  sum += new_value >> 16;
  sum += new_value & 0xffff;
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

void write_ip_checksum(std::vector<std::uint8_t>& raw, const Ipv4View& v) {
  std::uint8_t* ip = raw.data() + v.l3;
  put16(ip + 10, 0);
  put16(ip + 10, static_cast<std::uint16_t>(~ones_complement_sum({ip, v.ihl})));
}

}  // namespace

std::string protocol_name(std::uint8_t protocol) {
  switch (protocol) {
    case ipproto::kTcp: return "TCP";
    case ipproto::kUdp: return "UDP";
    case ipproto::kIcmp: return "ICMP";
    default: return "PROTO:" + std::to_string(protocol);
  }
}

std::uint16_t ones_complement_sum(std::span<const std::uint8_t> data, std::uint32_t initial) {
  std::uint64_t sum = initial;
  std::size_t i = 0;
  for (; i + 1 < data.size(); i += 2) sum += (std::uint32_t{data[i]} << 8) | data[i + 1];
  if (i < data.size()) sum += std::uint32_t{data[i]} << 8;
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(sum);
}

void decode_frame(PacketRecord& p) {
  p.ipv4 = false;
  p.src_addr = p.dst_addr = Ipv4{};
  p.src_port.reset();
  p.dst_port.reset();
  p.protocol = 0;
  auto v = ipv4_view(p.raw_bytes);
  if (!v) {
    p.payload_len = 0;
    return;
  }
  const std::uint8_t* ip = p.raw_bytes.data() + v->l3;
  p.ipv4 = true;
  p.protocol = v->protocol;
  p.src_addr = Ipv4{be32(ip + 12)};
  p.dst_addr = Ipv4{be32(ip + 16)};
  std::size_t l4 = v->l3 + v->ihl;
  std::size_t l4_avail = v->total_len > v->ihl ? v->total_len - v->ihl : 0;
  std::size_t header = 0;
  if (v->first_fragment && (v->protocol == ipproto::kTcp || v->protocol == ipproto::kUdp) &&
      p.raw_bytes.size() >= l4 + 4) {
    p.src_port = be16(p.raw_bytes.data() + l4);
    p.dst_port = be16(p.raw_bytes.data() + l4 + 2);
    if (v->protocol == ipproto::kUdp) {
      header = 8;
    } else if (p.raw_bytes.size() >= l4 + 13) {
      header = static_cast<std::size_t>(p.raw_bytes[l4 + 12] >> 4) * 4;
    }
  }
  p.payload_len = static_cast<std::uint32_t>(l4_avail > header ? l4_avail - header : 0);
}

void recompute_checksums(PacketRecord& p) {
  auto v = ipv4_view(p.raw_bytes);
  if (!v) throw ValidationError("not an IPv4 frame");
  write_ip_checksum(p.raw_bytes, *v);
  if (!has_l4_checksum(*v, p.raw_bytes.size())) return;
  if (v->fragmented || v->declared_len > p.raw_bytes.size() - v->l3)
    throw ValidationError("cannot recompute L4 checksum of a fragmented or truncated packet");
  std::uint8_t* field = p.raw_bytes.data() + v->l3 + v->ihl + l4_checksum_offset(v->protocol);
  if (v->protocol == ipproto::kUdp && be16(field) == 0) return;
  put16(field, compute_l4_checksum(p.raw_bytes, *v));
}

PacketRecord make_packet(Timestamp ts, Ipv4 src, Ipv4 dst, std::uint8_t protocol,
                         std::uint16_t src_port, std::uint16_t dst_port,
                         std::span<const std::uint8_t> payload, std::uint8_t tcp_flags) {
  std::size_t l4_header = protocol == ipproto::kTcp ? 20 : protocol == ipproto::kUdp ? 8 : 0;
  std::size_t ip_len = 20 + l4_header + payload.size();
  std::vector<std::uint8_t> raw(kEthHeaderLen + ip_len, 0);
  // locally administered MACs, direction encoded in the last byte
  std::array<std::uint8_t, 6> mac_a{0x02, 0x00, 0x00, 0x00, 0x00, 0x01};
  std::array<std::uint8_t, 6> mac_b{0x02, 0x00, 0x00, 0x00, 0x00, 0x02};
  std::copy(mac_b.begin(), mac_b.end(), raw.begin());
  std::copy(mac_a.begin(), mac_a.end(), raw.begin() + 6);
  put16(raw.data() + 12, kEtherTypeIpv4);
  std::uint8_t* ip = raw.data() + kEthHeaderLen;
  ip[0] = 0x45;
  put16(ip + 2, static_cast<std::uint16_t>(ip_len));
  put16(ip + 4, static_cast<std::uint16_t>((src_port * 31 + dst_port + ts.usec) & 0xffff));
  put16(ip + 6, 0x4000);  // DF
  ip[8] = 64;
  ip[9] = protocol;
  put32(ip + 12, src.value());
  put32(ip + 16, dst.value());
  std::uint8_t* l4 = ip + 20;
  if (protocol == ipproto::kTcp) {
    put16(l4, src_port);
    put16(l4 + 2, dst_port);
    put32(l4 + 4, 0x1000u * src_port + dst_port);
    put32(l4 + 8, (tcp_flags & tcpflag::kAck) ? 0x2000u * dst_port + 1 : 0);
    l4[12] = 5 << 4;
    l4[13] = tcp_flags;
    put16(l4 + 14, 29200);
  } else if (protocol == ipproto::kUdp) {
    put16(l4, src_port);
    put16(l4 + 2, dst_port);
    put16(l4 + 4, static_cast<std::uint16_t>(8 + payload.size()));
  }
  std::copy(payload.begin(), payload.end(), l4 + l4_header);

  PacketRecord p;
  p.timestamp = ts;
  p.raw_bytes = std::move(raw);
  p.orig_len = static_cast<std::uint32_t>(p.raw_bytes.size());
  if (protocol == ipproto::kUdp) put16(l4 + 6, 1);  // nonzero so recompute fills it in
  if (protocol == ipproto::kIcmp && payload.size() >= 4) {
    put16(l4 + 2, 0);
    put16(l4 + 2, static_cast<std::uint16_t>(~ones_complement_sum({l4, payload.size()})));
  }
  recompute_checksums(p);
  decode_frame(p);
  return p;
}

std::vector<PacketRecord> strip_responses(std::span<const PacketRecord> packets, Ipv4 attacker) {
  std::vector<PacketRecord> out;
  for (auto& p : packets)
    if (p.ipv4 && p.src_addr == attacker) out.push_back(p);
  if (out.empty())
    throw ValidationError("no packets from attacker " + attacker.to_string() + " in capture");
  return out;
}

std::vector<PacketRecord> rewrite_source(std::span<const PacketRecord> packets, Ipv4 new_src) {
  std::vector<PacketRecord> out;
  out.reserve(packets.size());
  for (std::size_t i = 0; i < packets.size(); ++i) {
    PacketRecord p = packets[i];
    auto v = ipv4_view(p.raw_bytes);
    if (!v) {
      auto layout = link_layout(p.raw_bytes);
      throw ValidationError("packet " + std::to_string(i) + " is not IPv4" +
                            (layout.ethertype == kEtherTypeIpv6 ? " (IPv6)" : ""));
    }
    std::uint8_t* ip = p.raw_bytes.data() + v->l3;
    std::uint32_t old_src = be32(ip + 12);
    if (old_src != new_src.value()) {
      put32(ip + 12, new_src.value());
      write_ip_checksum(p.raw_bytes, *v);
      if (has_l4_checksum(*v, p.raw_bytes.size())) {
        std::uint8_t* field = p.raw_bytes.data() + v->l3 + v->ihl + l4_checksum_offset(v->protocol);
        bool udp_disabled = v->protocol == ipproto::kUdp && be16(field) == 0;
        bool complete = !v->fragmented && v->declared_len <= p.raw_bytes.size() - v->l3;
        if (udp_disabled) {
          // left disabled
        } else if (complete) {
          put16(field, compute_l4_checksum(p.raw_bytes, *v));
        } else {
          // payload not fully captured: patch the pseudo-header contribution only
          std::uint16_t c = adjust_checksum(be16(field), old_src, new_src.value());
          if (v->protocol == ipproto::kUdp && c == 0) c = 0xffff;
          put16(field, c);
        }
      }
    }
    decode_frame(p);
    out.push_back(std::move(p));
  }
  return out;
}

AttackTrace prepare_trace(std::span<const PacketRecord> raw, std::string trace_id,
                          AttackType attack_type, Ipv4 attacker, Ipv4 new_src, Ipv4 target) {
  if (new_src == target)
    throw ValidationError("new source address equals the target address " + target.to_string());
  auto forward = strip_responses(raw, attacker);
  std::erase_if(forward, [&](const PacketRecord& p) { return p.dst_addr != target; });
  if (forward.empty())
    throw ValidationError("no packets from " + attacker.to_string() + " to " + target.to_string());
  auto packets = rewrite_source(forward, new_src);
  std::stable_sort(packets.begin(), packets.end(),
                   [](const PacketRecord& a, const PacketRecord& b) { return a.timestamp < b.timestamp; });
  const std::int64_t t0 = packets.front().timestamp.micros();
  for (auto& p : packets) p.timestamp = Timestamp::from_micros(p.timestamp.micros() - t0);
  return AttackTrace{std::move(trace_id), attack_type, new_src, target, std::move(packets)};
}

AttackTrace prepare_trace(const std::filesystem::path& raw_path, AttackType attack_type,
                          Ipv4 attacker, Ipv4 new_src, Ipv4 target) {
  auto raw = read_capture(raw_path);
  return prepare_trace(raw, raw_path.stem().string(), attack_type, attacker, new_src, target);
}

void write_trace(const AttackTrace& trace, const std::filesystem::path& path) {
  if (trace.packets.empty())
    throw ValidationError("trace '" + trace.trace_id + "' has no packets");
  write_capture(trace.packets, path);
}

// ---------------------------------------------------------------------------
// Synthetic captures

namespace {

constexpr std::array<std::uint16_t, 32> kScanPorts = {
    21,  22,  23,  25,   53,   80,   110,  111,  135,  139,  143,  443,  445,  993,  995,  1723,
    3306, 3389, 5900, 8080, 8443, 1025, 5432, 6379, 9200, 27017, 161, 389, 636, 2049, 5060, 11211};

constexpr std::array<std::uint16_t, 3> kOpenPorts = {22, 80, 443};

bool is_open(std::uint16_t port) {
  return std::find(kOpenPorts.begin(), kOpenPorts.end(), port) != kOpenPorts.end();
}

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

class CaptureBuilder {
 public:
  explicit CaptureBuilder(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::uint16_t ephemeral_port() {
    return static_cast<std::uint16_t>(std::uniform_int_distribution<int>(32768, 60999)(rng_));
  }

  void forward(std::uint8_t proto, std::uint16_t sport, std::uint16_t dport,
               std::span<const std::uint8_t> payload = {}, std::uint8_t flags = 0) {
    emit(kSynthAttacker, kSynthTarget, proto, sport, dport, payload, flags);
  }

  void reply(std::uint8_t proto, std::uint16_t sport, std::uint16_t dport,
             std::span<const std::uint8_t> payload = {}, std::uint8_t flags = 0) {
    emit(kSynthTarget, kSynthAttacker, proto, sport, dport, payload, flags);
  }

  /// ICMP port unreachable quoting the last forward packet's IP header + 8 bytes.
  void port_unreachable() {
    std::vector<std::uint8_t> body{3, 3, 0, 0, 0, 0, 0, 0};
    if (!last_forward_.empty()) {
      auto quote_begin = last_forward_.begin() + kEthHeaderLen;
      auto quote_len = std::min<std::size_t>(28, last_forward_.size() - kEthHeaderLen);
      body.insert(body.end(), quote_begin, quote_begin + static_cast<std::ptrdiff_t>(quote_len));
    }
    emit(kSynthTarget, kSynthAttacker, ipproto::kIcmp, 0, 0, body, 0);
  }

  void icmp_echo(bool request) {
    std::vector<std::uint8_t> body{static_cast<std::uint8_t>(request ? 8 : 0), 0, 0, 0, 0x12, 0x34, 0, 1};
    for (int i = 0; i < 32; ++i) body.push_back(static_cast<std::uint8_t>('a' + i % 23));
    if (request)
      emit(kSynthAttacker, kSynthTarget, ipproto::kIcmp, 0, 0, body, 0);
    else
      emit(kSynthTarget, kSynthAttacker, ipproto::kIcmp, 0, 0, body, 0);
  }

  void tcp_handshake(std::uint16_t sport, std::uint16_t dport) {
    forward(ipproto::kTcp, sport, dport, {}, tcpflag::kSyn);
    reply(ipproto::kTcp, dport, sport, {}, tcpflag::kSyn | tcpflag::kAck);
    forward(ipproto::kTcp, sport, dport, {}, tcpflag::kAck);
  }

  void ssh_session(const std::string& client_banner, int auth_rounds, bool success) {
    auto sport = ephemeral_port();
    tcp_handshake(sport, 22);
    auto server = bytes_of("SSH-2.0-OpenSSH_7.2p2 Ubuntu-4ubuntu2.2\r\n");
    reply(ipproto::kTcp, 22, sport, server, tcpflag::kPsh | tcpflag::kAck);
    auto client = bytes_of(client_banner);
    forward(ipproto::kTcp, sport, 22, client, tcpflag::kPsh | tcpflag::kAck);
    std::uniform_int_distribution<int> len(48, 160);
    for (int i = 0; i < auth_rounds; ++i) {
      std::vector<std::uint8_t> blob(static_cast<std::size_t>(len(rng_)));
      for (auto& b : blob) b = static_cast<std::uint8_t>(rng_());
      forward(ipproto::kTcp, sport, 22, blob, tcpflag::kPsh | tcpflag::kAck);
      std::vector<std::uint8_t> answer(static_cast<std::size_t>(len(rng_)));
      for (auto& b : answer) b = static_cast<std::uint8_t>(rng_());
      reply(ipproto::kTcp, 22, sport, answer, tcpflag::kPsh | tcpflag::kAck);
    }
    if (success) {
      std::vector<std::uint8_t> shell(512);
      for (auto& b : shell) b = static_cast<std::uint8_t>(rng_());
      reply(ipproto::kTcp, 22, sport, shell, tcpflag::kPsh | tcpflag::kAck);
      forward(ipproto::kTcp, sport, 22, std::span(shell).first(64), tcpflag::kPsh | tcpflag::kAck);
    }
    forward(ipproto::kTcp, sport, 22, {}, tcpflag::kFin | tcpflag::kAck);
    reply(ipproto::kTcp, 22, sport, {}, tcpflag::kFin | tcpflag::kAck);
  }

  std::vector<PacketRecord> take() { return std::move(packets_); }

 private:
  void emit(Ipv4 src, Ipv4 dst, std::uint8_t proto, std::uint16_t sport, std::uint16_t dport,
            std::span<const std::uint8_t> payload, std::uint8_t flags) {
    clock_us_ += std::uniform_int_distribution<std::int64_t>(50, 4000)(rng_);
    auto p = make_packet(Timestamp::from_micros(clock_us_), src, dst, proto, sport, dport, payload, flags);
    if (src == kSynthAttacker) last_forward_ = p.raw_bytes;
    packets_.push_back(std::move(p));
  }

  std::mt19937_64 rng_;
  std::int64_t clock_us_ = 1503922394LL * 1'000'000;
  std::vector<PacketRecord> packets_;
  std::vector<std::uint8_t> last_forward_;
};

void syn_scan(CaptureBuilder& b, std::size_t port_count) {
  auto sport = b.ephemeral_port();
  for (std::size_t i = 0; i < port_count; ++i) {
    auto port = kScanPorts[i];
    b.forward(ipproto::kTcp, sport, port, {}, tcpflag::kSyn);
    if (is_open(port))
      b.reply(ipproto::kTcp, port, sport, {}, tcpflag::kSyn | tcpflag::kAck);
    else
      b.reply(ipproto::kTcp, port, sport, {}, tcpflag::kRst | tcpflag::kAck);
  }
}

}  // namespace

std::vector<PacketRecord> synth_attack_capture(AttackType type, std::uint64_t seed, int min_flood_packets) {
  CaptureBuilder b(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(type) + 1);
  auto& rng = b.rng();
  const auto flood_count = static_cast<std::size_t>(std::max(min_flood_packets, 1)) + seed % 50;
  switch (type) {
    case AttackType::SshBruteForceSuccess:
    case AttackType::SshBruteForceFailure: {
      bool success = type == AttackType::SshBruteForceSuccess;
      int sessions = 3 + static_cast<int>(seed % 4);
      for (int s = 0; s < sessions; ++s)
        b.ssh_session("SSH-2.0-Ruby/Net::SSH_2.9.2 x86_64-linux\r\n", 2,
                      success && s == sessions - 1);
      break;
    }
    case AttackType::TcpConnectFlood: {
      // each connection contributes two forward packets (SYN, ACK)
      for (std::size_t i = 0; i < (flood_count + 1) / 2; ++i) b.tcp_handshake(b.ephemeral_port(), 80);
      break;
    }
    case AttackType::TcpSynFlood: {
      for (std::size_t i = 0; i < flood_count; ++i) {
        auto sport = b.ephemeral_port();
        b.forward(ipproto::kTcp, sport, 80, {}, tcpflag::kSyn);
        if (i % 8 == 0) b.reply(ipproto::kTcp, 80, sport, {}, tcpflag::kSyn | tcpflag::kAck);
      }
      break;
    }
    case AttackType::UdpFlood: {
      std::vector<std::uint8_t> payload(64 + seed % 64, 0x58);
      std::uniform_int_distribution<int> dport(1, 65535);
      for (std::size_t i = 0; i < flood_count; ++i) {
        b.forward(ipproto::kUdp, b.ephemeral_port(), static_cast<std::uint16_t>(dport(rng)), payload);
        if (i % 10 == 0) b.port_unreachable();
      }
      break;
    }
    case AttackType::SynScan:
      syn_scan(b, 10 + seed % (kScanPorts.size() - 9));
      break;
    case AttackType::SynOsScan: {
      syn_scan(b, 10 + seed % (kScanPorts.size() - 9));
      // OS fingerprint probes against an open and a closed port
      auto sport = b.ephemeral_port();
      for (std::uint8_t flags : {std::uint8_t{tcpflag::kSyn}, std::uint8_t{0},
                                 std::uint8_t{tcpflag::kSyn | tcpflag::kFin | tcpflag::kPsh | 0x20},
                                 std::uint8_t{tcpflag::kAck}}) {
        b.forward(ipproto::kTcp, sport, 22, {}, flags);
        b.reply(ipproto::kTcp, 22, sport, {}, tcpflag::kRst);
      }
      b.icmp_echo(true);
      b.icmp_echo(false);
      std::vector<std::uint8_t> probe(300, 0x43);
      b.forward(ipproto::kUdp, sport, 40125, probe);
      b.port_unreachable();
      break;
    }
    case AttackType::UdpScan: {
      auto sport = b.ephemeral_port();
      std::size_t count = 10 + seed % (kScanPorts.size() - 9);
      for (std::size_t i = 0; i < count; ++i) {
        auto port = kScanPorts[i];
        b.forward(ipproto::kUdp, sport, port, {});
        if (port == 53)
          b.reply(ipproto::kUdp, 53, sport, bytes_of("\x12\x34\x81\x80"));
        else if (port != 161)
          b.port_unreachable();
      }
      break;
    }
    case AttackType::UserEnumeration: {
      int users = 4 + static_cast<int>(seed % 5);
      for (int u = 0; u < users; ++u) b.ssh_session("SSH-2.0-libssh_0.7.4\r\n", 1, false);
      break;
    }
  }
  return b.take();
}

}  // namespace idsbench
