#include "adq/bitstream.hpp"

#include <cmath>

#include "adq/errors.hpp"

namespace adq {

void validate(const Bitstream& stream) {
  for (int b : stream.bits) {
    const bool ok = stream.alphabet == Alphabet::pm1 ? (b == 1 || b == -1)
                                                     : (b == 0 || b == 1);
    if (!ok) throw ConfigError("bitstream symbol outside its alphabet");
  }
}

Bitstream to_zero_one(const Bitstream& stream) {
  if (stream.alphabet != Alphabet::pm1) {
    throw ConfigError("to_zero_one expects a pm1 stream");
  }
  Bitstream out{{}, Alphabet::pm01};
  out.bits.reserve(stream.size());
  for (int b : stream.bits) out.bits.push_back((b + 1) / 2);
  return out;
}

double power_sum(const std::vector<int>& bits, std::size_t first,
                 std::size_t count, double t, int power) {
  if (first + count > bits.size()) {
    throw RangeError("power sum runs past the end of the stream");
  }
  double acc = 0.0;
  for (std::size_t i = count; i-- > 0;) acc = acc * t + bits[first + i];
  return acc * std::pow(t, power);
}

}  // namespace adq
