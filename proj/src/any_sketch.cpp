#include "biask/any_sketch.hpp"

#include "biask/error.hpp"

namespace biask {

namespace {
template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;
}  // namespace

const char* file_kind_name(FileKind kind) noexcept {
  switch (kind) {
    case FileKind::cm: return "cm";
    case FileKind::cs: return "cs";
    case FileKind::l1: return "l1";
    case FileKind::l2: return "l2";
    case FileKind::dyadic: return "dyadic";
  }
  return "?";
}

FileKind kind_of(const AnySketch& sk) noexcept {
  return std::visit(overloaded{
                        [](const PlainSketch& p) {
                          return p.kind() == SketchKind::cm ? FileKind::cm : FileKind::cs;
                        },
                        [](const L1Sketch&) { return FileKind::l1; },
                        [](const L2Sketch&) { return FileKind::l2; },
                        [](const DyadicSketch&) { return FileKind::dyadic; },
                    },
                    sk);
}

std::uint64_t dimension_of(const AnySketch& sk) noexcept {
  return std::visit([](const auto& s) { return s.dimension(); }, sk);
}

const SketchConfig& config_of(const AnySketch& sk) noexcept {
  return std::visit([](const auto& s) -> const SketchConfig& { return s.config(); }, sk);
}

std::uint64_t master_seed_of(const AnySketch& sk) noexcept {
  return std::visit(overloaded{
                        [](const DyadicSketch& d) { return d.master_seed(); },
                        [](const auto& s) { return s.seeds().master_seed; },
                    },
                    sk);
}

void update(AnySketch& sk, std::uint64_t j, double delta) {
  std::visit([&](auto& s) { s.update(j, delta); }, sk);
}

void add_scaled(AnySketch& sk, const AnySketch& other, double alpha) {
  if (sk.index() != other.index()) raise(Errc::incompatible, "sketch kinds differ");
  std::visit(
      [&](auto& s) {
        using T = std::decay_t<decltype(s)>;
        s.add_scaled(std::get<T>(other), alpha);
      },
      sk);
}

AnySketch merge(const AnySketch& a, const AnySketch& b) {
  AnySketch out = a;
  add_scaled(out, b, 1.0);
  return out;
}

}  // namespace biask
