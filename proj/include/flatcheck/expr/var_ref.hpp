#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace flatcheck {

enum class VarKind : uint8_t { State = 0, Input = 1, Param = 2 };

// HalfTan never appears inside an expression; it only keys the
// tan(theta/2) value of a trig base in an evaluation point.
enum class Trig : uint8_t { None = 0, Sin = 1, Cos = 2, HalfTan = 3 };

// One variable of the shared universe. Inputs carry a derivative order.
// Ordering: states, then inputs by (index, order), then params; a trig
// atom sorts right after its base.
struct VarRef {
  VarKind kind = VarKind::State;
  Trig trig = Trig::None;
  int32_t index = 0;
  int32_t order = 0;

  static VarRef state(int i) { return {VarKind::State, Trig::None, i, 0}; }
  static VarRef input(int i, int k) { return {VarKind::Input, Trig::None, i, k}; }
  static VarRef param(int i) { return {VarKind::Param, Trig::None, i, 0}; }

  VarRef with_trig(Trig t) const { return {kind, t, index, order}; }
  VarRef sin() const { return with_trig(Trig::Sin); }
  VarRef cos() const { return with_trig(Trig::Cos); }
  VarRef half_tan() const { return with_trig(Trig::HalfTan); }
  VarRef base() const { return with_trig(Trig::None); }
  bool is_trig() const { return trig != Trig::None; }

  uint64_t key() const {
    return (uint64_t(kind) << 60) | (uint64_t(uint32_t(index)) << 28) |
           (uint64_t(uint32_t(order) & 0xFFFFFF) << 4) | uint64_t(trig);
  }

  friend bool operator==(const VarRef& a, const VarRef& b) { return a.key() == b.key(); }
  friend bool operator!=(const VarRef& a, const VarRef& b) { return a.key() != b.key(); }
  friend bool operator<(const VarRef& a, const VarRef& b) { return a.key() < b.key(); }
};

// Renders a non-trig variable; trig wrapping is added by the printer.
using NameFn = std::function<std::string(const VarRef&)>;

// Default names: x1.., u1 / u1' .., p1..
std::string default_name(const VarRef& v);

}  // namespace flatcheck

template <>
struct std::hash<flatcheck::VarRef> {
  size_t operator()(const flatcheck::VarRef& v) const noexcept { return std::hash<uint64_t>{}(v.key()); }
};
