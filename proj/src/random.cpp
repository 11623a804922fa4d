#include "tsvfarm/random.hpp"

#include <limits>

#include "tsvfarm/errors.hpp"

namespace tsvfarm {

double Mt64Source::uniform() {
  // 53 high bits -> [0, 1) on the double lattice.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Mt64Source::below(std::size_t n) {
  if (n == 0) throw DomainError("below(0)");
  if (n == 1) return 0;
  const std::uint64_t bound = n;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<std::size_t>(v % bound);
}

}  // namespace tsvfarm
