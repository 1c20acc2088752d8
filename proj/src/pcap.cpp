#include "idsbench/error.hpp"
#include "idsbench/traceprep.hpp"

#include <fstream>
#include <iterator>

namespace idsbench {
namespace {

std::uint32_t load_u32(const std::uint8_t* p, bool swap) {
  std::uint32_t le = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                     (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
  if (!swap) return le;
  return (le >> 24) | ((le >> 8) & 0xff00) | ((le << 8) & 0xff0000) | (le << 24);
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void store_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

// Sanity bound on a single record; larger values mean a corrupt file.
constexpr std::uint32_t kMaxRecordLen = 262144;

}  // namespace

std::vector<PacketRecord> decode_capture(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPcapGlobalHeaderLen)
    throw ParseError("pcap: file shorter than the 24-byte global header");
  bool swap = false;
  std::uint32_t magic = load_u32(bytes.data(), false);
  if (magic == kPcapMagic) {
    swap = false;
  } else if (load_u32(bytes.data(), true) == kPcapMagic) {
    swap = true;
  } else {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08X", magic);
    throw ParseError(std::string("pcap: bad magic ") + buf);
  }
  std::uint32_t linktype = load_u32(bytes.data() + 20, swap);
  if (linktype != kLinkTypeEthernet)
    throw ParseError("pcap: unsupported link type " + std::to_string(linktype));

  std::vector<PacketRecord> packets;
  std::size_t offset = kPcapGlobalHeaderLen;
  while (offset < bytes.size()) {
    if (bytes.size() - offset < kPcapRecordHeaderLen)
      throw ParseError("pcap: truncated record header at byte offset " + std::to_string(offset));
    const std::uint8_t* h = bytes.data() + offset;
    PacketRecord p;
    p.timestamp.sec = load_u32(h, swap);
    p.timestamp.usec = static_cast<std::int32_t>(load_u32(h + 4, swap));
    std::uint32_t incl = load_u32(h + 8, swap);
    p.orig_len = load_u32(h + 12, swap);
    if (incl > kMaxRecordLen)
      throw ParseError("pcap: implausible record length " + std::to_string(incl) +
                       " at byte offset " + std::to_string(offset));
    if (bytes.size() - offset - kPcapRecordHeaderLen < incl)
      throw ParseError("pcap: truncated record data at byte offset " + std::to_string(offset) +
                       " (need " + std::to_string(incl) + " bytes, have " +
                       std::to_string(bytes.size() - offset - kPcapRecordHeaderLen) + ")");
    auto data = bytes.subspan(offset + kPcapRecordHeaderLen, incl);
    p.raw_bytes.assign(data.begin(), data.end());
    decode_frame(p);
    packets.push_back(std::move(p));
    offset += kPcapRecordHeaderLen + incl;
  }
  return packets;
}

std::vector<std::uint8_t> encode_capture(std::span<const PacketRecord> packets) {
  std::vector<std::uint8_t> out;
  store_u32(out, kPcapMagic);
  store_u16(out, 2);
  store_u16(out, 4);
  store_u32(out, 0);  // thiszone
  store_u32(out, 0);  // sigfigs
  store_u32(out, 65535);
  store_u32(out, kLinkTypeEthernet);
  for (auto& p : packets) {
    store_u32(out, static_cast<std::uint32_t>(p.timestamp.sec));
    store_u32(out, static_cast<std::uint32_t>(p.timestamp.usec));
    store_u32(out, static_cast<std::uint32_t>(p.raw_bytes.size()));
    store_u32(out, std::max<std::uint32_t>(p.orig_len, static_cast<std::uint32_t>(p.raw_bytes.size())));
    out.insert(out.end(), p.raw_bytes.begin(), p.raw_bytes.end());
  }
  return out;
}

std::vector<PacketRecord> read_capture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open capture '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_capture(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_capture(std::span<const PacketRecord> packets, const std::filesystem::path& path) {
  auto bytes = encode_capture(packets);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace idsbench
