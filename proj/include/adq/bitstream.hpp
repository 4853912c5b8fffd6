#pragma once

#include <cstddef>
#include <vector>

namespace adq {

enum class Alphabet { pm1, pm01 };

struct Bitstream {
  std::vector<int> bits;
  Alphabet alphabet = Alphabet::pm1;

  std::size_t size() const { return bits.size(); }
  int operator[](std::size_t i) const { return bits[i]; }
};

// Throws ConfigError if a pm1 stream contains a symbol other than ±1.
void validate(const Bitstream& stream);

// b -> (b + 1) / 2, mapping a pm1 stream onto {0,1}.
Bitstream to_zero_one(const Bitstream& stream);

// Σ_{i<count} bits[first + i] · t^(power + i), by Horner's rule.
double power_sum(const std::vector<int>& bits, std::size_t first,
                 std::size_t count, double t, int power);

}  // namespace adq
