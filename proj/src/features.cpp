#include "pvikit/features.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "pvikit/text.hpp"

namespace pvikit {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline void mix_byte(std::uint64_t& h, std::uint8_t b) {
  h ^= b;
  h *= kFnvPrime;
}

// FNV-1a over (field salt, order, scalars as 4 little-endian bytes), then a
// final avalanche so the low bits used as the bucket are well mixed.
std::uint64_t hash_ngram(std::uint8_t salt, unsigned order, const char32_t* first) {
  std::uint64_t h = kFnvOffset;
  mix_byte(h, salt);
  mix_byte(h, static_cast<std::uint8_t>(order));
  for (unsigned k = 0; k < order; ++k) {
    const auto cp = static_cast<std::uint32_t>(first[k]);
    for (int b = 0; b < 4; ++b) mix_byte(h, static_cast<std::uint8_t>(cp >> (8 * b)));
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

void add_field(std::string_view s, std::uint8_t salt, std::uint64_t mask,
               const std::vector<unsigned>& orders, std::unordered_map<std::uint32_t, double>& acc) {
  const auto scalars = text::decode_utf8(s);
  for (unsigned order : orders) {
    if (order == 0) throw std::invalid_argument("n-gram order must be positive");
    if (scalars.size() < order) continue;
    for (std::size_t i = 0; i + order <= scalars.size(); ++i) {
      acc[static_cast<std::uint32_t>(hash_ngram(salt, order, scalars.data() + i) & mask)] += 1.0;
    }
  }
}

}  // namespace

double FeatureVector::total_weight() const {
  double sum = 0.0;
  for (const auto& [idx, w] : entries) sum += w;
  return sum;
}

FeatureVector featurize(std::string_view premise, std::string_view hypothesis, unsigned hash_bits,
                        const std::vector<unsigned>& ngram_orders) {
  if (hash_bits == 0 || hash_bits > 30) throw std::invalid_argument("hash_bits must be in [1, 30]");
  const std::uint64_t mask = (std::uint64_t{1} << hash_bits) - 1;
  std::unordered_map<std::uint32_t, double> acc;
  add_field(premise, 'P', mask, ngram_orders, acc);
  add_field(hypothesis, 'H', mask, ngram_orders, acc);
  FeatureVector fv;
  fv.entries.assign(acc.begin(), acc.end());
  std::sort(fv.entries.begin(), fv.entries.end());
  return fv;
}

}  // namespace pvikit
