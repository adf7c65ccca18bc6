// allocation.hpp — binary treatment allocation vectors.
#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mivnet {

// z in {0,1}^n; z[i] = 1 means unit i is treated. Orders lexicographically
// on the bit vector, i.e. by the integer value of the bitstring with unit 0
// as the most significant bit.
struct Allocation {
  std::vector<std::uint8_t> bits;

  Allocation() = default;
  explicit Allocation(int n) : bits(static_cast<std::size_t>(n), 0) {}
  Allocation(std::initializer_list<int> vals) {
    bits.reserve(vals.size());
    for (int v : vals) bits.push_back(static_cast<std::uint8_t>(v != 0));
  }

  static Allocation zeros(int n) { return Allocation(n); }
  static Allocation ones(int n) {
    Allocation z(n);
    for (auto& b : z.bits) b = 1;
    return z;
  }
  // e_i: only unit i treated.
  static Allocation unit(int n, int i) {
    Allocation z(n);
    z.bits.at(static_cast<std::size_t>(i)) = 1;
    return z;
  }
  static Allocation from_string(const std::string& s) {
    Allocation z(static_cast<int>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1')
        z.bits[i] = 1;
      else if (s[i] != '0')
        throw std::invalid_argument("allocation bitstring must be over {0,1}: " + s);
    }
    return z;
  }

  int size() const { return static_cast<int>(bits.size()); }
  std::uint8_t operator[](int i) const { return bits[static_cast<std::size_t>(i)]; }
  std::uint8_t& operator[](int i) { return bits[static_cast<std::size_t>(i)]; }

  int treated_count() const {
    int s = 0;
    for (auto b : bits) s += b;
    return s;
  }
  bool all_zero() const { return treated_count() == 0; }
  bool all_one() const { return treated_count() == size(); }
  bool trivial() const { return all_zero() || all_one(); }

  std::string to_string() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i]) s[i] = '1';
    return s;
  }

  auto operator<=>(const Allocation&) const = default;
};

}  // namespace mivnet
