#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>

namespace memlab {

// Language integers are arbitrary precision; offsets may wander arbitrarily
// far out of bounds without wrapping.
using Int = boost::multiprecision::cpp_int;

// Block identifiers are opaque naturals. Allocation never reuses one under
// strict freshness, and runs are far too short to exhaust 64 bits.
using BlockId = std::uint64_t;

using Var = std::string;

struct Ptr {
  BlockId block = 0;
  Int offset;

  friend bool operator==(const Ptr& a, const Ptr& b) {
    return a.block == b.block && a.offset == b.offset;
  }
  friend bool operator<(const Ptr& a, const Ptr& b) {
    if (a.block != b.block) return a.block < b.block;
    return a.offset < b.offset;
  }
};

struct Nil {
  friend bool operator==(Nil, Nil) { return true; }
  friend bool operator<(Nil, Nil) { return false; }
};

// A value is an integer, a boolean, nil, or a block/offset pointer.
class Value {
 public:
  Value() : v_(Nil{}) {}

  static Value integer(Int n) { return Value(std::move(n)); }
  static Value integer(long n) { return Value(Int(n)); }
  static Value boolean(bool b) { return Value(b); }
  static Value nil() { return Value(); }
  static Value pointer(BlockId block, Int offset) {
    return Value(Ptr{block, std::move(offset)});
  }
  static Value pointer(Ptr p) { return Value(std::move(p)); }

  bool is_int() const { return std::holds_alternative<Int>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_nil() const { return std::holds_alternative<Nil>(v_); }
  bool is_ptr() const { return std::holds_alternative<Ptr>(v_); }

  const Int& int_val() const { return std::get<Int>(v_); }
  bool bool_val() const { return std::get<bool>(v_); }
  const Ptr& ptr_val() const { return std::get<Ptr>(v_); }

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b) { return a.v_ < b.v_; }

 private:
  explicit Value(Int n) : v_(std::move(n)) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(Ptr p) : v_(std::move(p)) {}

  std::variant<Int, bool, Nil, Ptr> v_;
};

std::string show_value(const Value& v);

}  // namespace memlab
