#include "cdsh/messages.hpp"

#include <algorithm>

#include "cdsh/error.hpp"

namespace cdsh {

Did Did::from_string(std::string_view id) { return from_bytes(as_bytes(id)); }

Did Did::from_bytes(ByteView b) {
  if (b.size() > 32) throw Error(ErrorCode::kInvalidIdentity, "identity longer than 32 bytes");
  Did d;
  std::copy(b.begin(), b.end(), d.bytes.begin());
  return d;
}

std::string Did::display() const {
  std::size_t len = bytes.size();
  while (len > 0 && bytes[len - 1] == 0) --len;
  const bool printable = std::all_of(bytes.begin(), bytes.begin() + static_cast<long>(len),
                                     [](std::uint8_t c) { return c >= 0x20 && c < 0x7f; });
  if (printable && len > 0) return std::string(bytes.begin(), bytes.begin() + static_cast<long>(len));
  return to_hex(bytes);
}

namespace wire {
namespace {

void put_pseudonym(const Group& g, const Pseudonym& pid, Bytes& out) {
  g.encode_point_into(pid.pid1, out);
  append(out, pid.pid2);
}

Pseudonym get_pseudonym(const Group& g, ByteReader& r) {
  Pseudonym pid;
  pid.pid1 = g.decode_point(r.take(g.point_bytes()));
  pid.pid2 = r.digest();
  return pid;
}

std::string get_type(ByteReader& r) {
  const ByteView t = r.prefixed();
  return std::string(t.begin(), t.end());
}

}  // namespace

Bytes encode_pseudonym(const Group& g, const Pseudonym& pid) {
  Bytes out;
  put_pseudonym(g, pid, out);
  return out;
}

Pseudonym decode_pseudonym(const Group& g, ByteView b) {
  ByteReader r(b, ErrorCode::kMessageParse);
  Pseudonym pid = get_pseudonym(g, r);
  r.expect_done();
  return pid;
}

Bytes encode_core(const Group& g, const UploadMessage& m) {
  Bytes out;
  put_pseudonym(g, m.pid, out);
  append(out, g.encode_scalar(m.theta));
  append(out, m.rv);
  append_u32(out, m.t);
  return out;
}

Bytes encode_core(const Group& g, const LedgerRecord& rec) {
  Bytes out;
  put_pseudonym(g, rec.pid, out);
  append(out, rec.v);
  append(out, rec.pindex);
  append_u32(out, rec.t);
  return out;
}

Bytes encode_core(const Group& g, const RequestMessage& m) {
  Bytes out;
  put_pseudonym(g, m.pid, out);
  append(out, g.encode_scalar(m.delta));
  append_u32(out, m.t);
  return out;
}

Bytes encode_core(const TransferResponse& r) {
  Bytes out;
  append(out, r.pindex_prime);
  append(out, r.v);
  append(out, r.k);
  append_u32(out, r.t_k);
  return out;
}

Bytes encode(const Group& g, const UploadMessage& m) {
  Bytes out;
  append_prefixed(out, as_bytes(m.m_type));
  append(out, encode_core(g, m));
  append_prefixed(out, m.c);
  return out;
}

Bytes encode(const Group& g, const LedgerRecord& rec) {
  Bytes out;
  append_prefixed(out, as_bytes(rec.m_type));
  append(out, encode_core(g, rec));
  return out;
}

Bytes encode(const Group& g, const RequestMessage& m) {
  Bytes out;
  append_prefixed(out, as_bytes(m.m_type));
  append(out, encode_core(g, m));
  return out;
}

Bytes encode(const TransferResponse& r) { return encode_core(r); }

UploadMessage decode_upload(const Group& g, ByteView b) {
  ByteReader r(b, ErrorCode::kMessageParse);
  UploadMessage m;
  m.m_type = get_type(r);
  m.pid = get_pseudonym(g, r);
  m.theta = g.decode_scalar(r.take(g.scalar_bytes()));
  m.rv = r.digest();
  m.t = r.u32();
  const ByteView c = r.prefixed();
  m.c.assign(c.begin(), c.end());
  r.expect_done();
  return m;
}

LedgerRecord decode_record(const Group& g, ByteView b) {
  ByteReader r(b, ErrorCode::kMessageParse);
  LedgerRecord rec;
  rec.m_type = get_type(r);
  rec.pid = get_pseudonym(g, r);
  rec.v = r.digest();
  rec.pindex = r.digest();
  rec.t = r.u32();
  r.expect_done();
  return rec;
}

RequestMessage decode_request(const Group& g, ByteView b) {
  ByteReader r(b, ErrorCode::kMessageParse);
  RequestMessage m;
  m.m_type = get_type(r);
  m.pid = get_pseudonym(g, r);
  m.delta = g.decode_scalar(r.take(g.scalar_bytes()));
  m.t = r.u32();
  r.expect_done();
  return m;
}

TransferResponse decode_transfer(ByteView b) {
  ByteReader r(b, ErrorCode::kMessageParse);
  TransferResponse t;
  t.pindex_prime = r.digest();
  t.v = r.digest();
  t.k = r.digest();
  t.t_k = r.u32();
  r.expect_done();
  return t;
}

}  // namespace wire
}  // namespace cdsh
