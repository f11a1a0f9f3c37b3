#include "biask/format.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "biask/error.hpp"

namespace biask {

namespace {

constexpr char kMagic[4] = {'B', 'A', 'S', 'K'};
// Flag bits beyond the running total.
constexpr std::uint8_t kFlagLoadHash = 0x02;
constexpr std::uint8_t kFlagNegative = 0x04;
constexpr std::uint8_t kKnownFlags = kFlagRunningTotal | kFlagLoadHash | kFlagNegative;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f64s(std::span<const double> v) {
    for (double x : v) f64(x);
  }
  void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1, "u8")); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2, "u16")); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4, "u32")); }
  std::uint64_t u64() { return le(8, "u64"); }
  double f64() { return std::bit_cast<double>(le(8, "f64")); }
  void f64s(std::span<double> out) {
    need(out.size() * 8, "f64 array");
    for (double& x : out) x = f64();
  }
  void magic() {
    need(4, "magic");
    if (std::memcmp(in_.data(), kMagic, 4) != 0) fail("bad magic");
    pos_ += 4;
  }
  void finish() const {
    if (pos_ != in_.size()) fail("trailing bytes after payload");
  }
  std::size_t pos() const noexcept { return pos_; }
  [[noreturn]] void fail(const std::string& msg) const { throw FormatError(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    throw FormatError(at, msg);
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) fail(std::string("truncated input reading ") + what);
  }
  std::uint64_t le(int width, const char* what) {
    need(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

struct Header {
  FileKind kind{};
  std::uint8_t flags = 0;
  std::uint64_t n = 0;
  SketchConfig cfg;
  std::uint64_t master_seed = 0;
};

void write_header(Writer& w, const Header& h) {
  if (h.cfg.d > std::numeric_limits<std::uint16_t>::max()) {
    raise(Errc::config, "depth does not fit the file header");
  }
  w.bytes(kMagic, 4);
  w.u16(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(h.kind));
  w.u8(h.flags);
  w.u64(h.n);
  w.u32(h.cfg.s);
  w.u16(static_cast<std::uint16_t>(h.cfg.d));
  w.u32(h.cfg.k);
  w.f64(h.cfg.c_s);
  w.u64(h.master_seed);
}

Header read_header(Reader& r) {
  Header h;
  r.magic();
  const std::size_t at_version = r.pos();
  const std::uint16_t version = r.u16();
  if (version != kFormatVersion) {
    r.fail_at(at_version, "unsupported version " + std::to_string(version));
  }
  const std::size_t at_kind = r.pos();
  const std::uint8_t kind = r.u8();
  if (kind > static_cast<std::uint8_t>(FileKind::dyadic)) {
    r.fail_at(at_kind, "unknown sketch kind " + std::to_string(kind));
  }
  h.kind = static_cast<FileKind>(kind);
  const std::size_t at_flags = r.pos();
  h.flags = r.u8();
  if (h.flags & ~kKnownFlags) r.fail_at(at_flags, "unknown flag bits");
  h.n = r.u64();
  h.cfg.s = r.u32();
  h.cfg.d = r.u16();
  h.cfg.k = r.u32();
  h.cfg.c_s = r.f64();
  h.master_seed = r.u64();
  if (h.n == 0 || h.cfg.s == 0 || h.cfg.d == 0 || h.cfg.k == 0) {
    r.fail_at(8, "header has a zero dimension");
  }
  return h;
}

void require_derived(const SeedSet& seeds) {
  if (!seeds.derived) {
    raise(Errc::argument, "hand-built seed sets cannot be serialized");
  }
}

Header header_for(const PlainSketch& p, FileKind kind) {
  require_derived(p.seeds());
  Header h;
  h.kind = kind;
  h.n = p.dimension();
  h.cfg = p.config();
  h.master_seed = p.seeds().master_seed;
  if (p.seeds().load_hash) h.flags |= kFlagLoadHash;
  return h;
}

PlainSketch read_rows(Reader& r, const Header& h, SketchKind kind) {
  SeedSet seeds = derive_seed_set(h.master_seed, h.n, h.cfg.s, h.cfg.d,
                                  (h.flags & kFlagLoadHash) != 0);
  PlainSketch sk(kind, h.cfg, std::move(seeds));
  r.f64s(sk.mutable_cells());
  return sk;
}

}  // namespace

std::vector<std::uint8_t> serialize(const AnySketch& any) {
  Writer w;
  const FileKind kind = kind_of(any);
  std::visit(
      [&](const auto& sk) {
        using T = std::decay_t<decltype(sk)>;
        if constexpr (std::is_same_v<T, PlainSketch>) {
          Header h = header_for(sk, kind);
          if (sk.tracks_total()) h.flags |= kFlagRunningTotal;
          write_header(w, h);
          w.f64s(sk.cells());
          if (sk.tracks_total()) w.f64(sk.total());
        } else if constexpr (std::is_same_v<T, L1Sketch>) {
          write_header(w, header_for(sk.cm(), kind));
          w.f64s(sk.cm().cells());
          const auto pos = sk.sample_positions();
          const auto val = sk.sample_values();
          w.u32(static_cast<std::uint32_t>(pos.size()));
          for (std::size_t i = 0; i < pos.size(); ++i) {
            w.u64(pos[i]);
            w.f64(val[i]);
          }
        } else if constexpr (std::is_same_v<T, L2Sketch>) {
          write_header(w, header_for(sk.cs(), kind));
          w.f64s(sk.cs().cells());
          w.f64s(sk.load_row());
        } else {
          Header h;
          h.kind = kind;
          h.n = sk.dimension();
          h.cfg = sk.config();
          h.master_seed = sk.master_seed();
          if (sk.saw_negative()) h.flags |= kFlagNegative;
          write_header(w, h);
          w.u16(static_cast<std::uint16_t>(sk.levels()));
          w.f64(sk.total());
          for (std::uint32_t l = 1; l <= sk.levels(); ++l) {
            const auto& lv = sk.level(l);
            if (lv.is_exact()) {
              w.f64s(lv.exact);
            } else {
              w.f64s(lv.sketch->cells());
            }
          }
        }
      },
      any);
  return w.take();
}

AnySketch deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const Header h = read_header(r);
  try {
    h.cfg.validate();
  } catch (const Error& e) {
    r.fail_at(8, e.what());
  }

  switch (h.kind) {
    case FileKind::cm:
    case FileKind::cs: {
      PlainSketch sk = read_rows(r, h, h.kind == FileKind::cm ? SketchKind::cm : SketchKind::cs);
      if (h.flags & kFlagRunningTotal) {
        sk.set_tracks_total(true);
        sk.set_total(r.f64());
      }
      r.finish();
      return sk;
    }
    case FileKind::l1: {
      SeedSet seeds = derive_seed_set(h.master_seed, h.n, h.cfg.s, h.cfg.d,
                                      (h.flags & kFlagLoadHash) != 0);
      L1Sketch sk(h.cfg, std::move(seeds));
      r.f64s(sk.mutable_cm().mutable_cells());
      const std::size_t at_t = r.pos();
      const std::uint32_t t = r.u32();
      const auto pos = sk.sample_positions();
      if (t != pos.size()) {
        r.fail_at(at_t, "sample count " + std::to_string(t) + " does not match dimension");
      }
      auto val = sk.mutable_sample_values();
      for (std::uint32_t i = 0; i < t; ++i) {
        const std::size_t at = r.pos();
        if (r.u64() != pos[i]) r.fail_at(at, "sample index does not match the seed");
        val[i] = r.f64();
      }
      r.finish();
      return sk;
    }
    case FileKind::l2: {
      if (!(h.flags & kFlagLoadHash)) r.fail_at(5, "l2 sketch without a load hash");
      if (std::uint64_t{h.cfg.s} < 4ull * h.cfg.k) r.fail_at(8, "l2 sketch needs s >= 4k");
      SeedSet seeds = derive_seed_set(h.master_seed, h.n, h.cfg.s, h.cfg.d, true);
      L2Sketch sk(h.cfg, std::move(seeds));
      r.f64s(sk.mutable_cs().mutable_cells());
      r.f64s(sk.mutable_load_row());
      r.finish();
      return sk;
    }
    case FileKind::dyadic: {
      DyadicSketch sk(h.n, h.cfg, h.master_seed);
      const std::size_t at_l = r.pos();
      const std::uint16_t levels = r.u16();
      if (levels != sk.levels()) r.fail_at(at_l, "level count does not match dimension");
      sk.set_total(r.f64());
      for (std::uint32_t l = 1; l <= sk.levels(); ++l) {
        auto& lv = sk.mutable_level(l);
        if (lv.is_exact()) {
          r.f64s(lv.exact);
        } else {
          r.f64s(lv.sketch->mutable_cells());
        }
      }
      if (h.flags & kFlagNegative) sk.mark_negative();
      r.finish();
      return sk;
    }
  }
  r.fail_at(6, "unknown sketch kind");
}

std::uint64_t sketch_words(const AnySketch& sk) { return words_for_bytes(serialize(sk).size()); }

void sketch_save(const std::string& path, const AnySketch& sk) {
  const auto bytes = serialize(sk);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(Errc::io, "write failed for " + path);
}

AnySketch sketch_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace biask
