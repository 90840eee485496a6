#include "pvikit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pvikit/errors.hpp"
#include "pvikit/io.hpp"
#include "pvikit/random.hpp"
#include "pvikit/text.hpp"

namespace pvikit {

namespace {

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

Label LabelSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Label>(i);
  }
  throw std::out_of_range("unknown label '" + std::string(name) + "'");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::original: return "original";
    case Provenance::imbalanced: return "imbalanced";
    case Provenance::noisy: return "noisy";
    case Provenance::synthetic: return "synthetic";
    case Provenance::null_view: return "null-view";
    case Provenance::subset: return "subset";
  }
  return "original";
}

Provenance provenance_from_string(std::string_view s) {
  for (auto p : {Provenance::original, Provenance::imbalanced, Provenance::noisy,
                 Provenance::synthetic, Provenance::null_view, Provenance::subset}) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown provenance '" + std::string(s) + "'");
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& inst : instances) {
    if (inst.label < num_classes) ++counts[inst.label];
  }
  return counts;
}

void validate(const Dataset& dataset) {
  if (dataset.num_classes < 2) throw std::invalid_argument("a dataset needs at least 2 classes");
  std::set<std::size_t> seen;
  for (const auto& inst : dataset.instances) {
    if (inst.label >= dataset.num_classes) {
      throw std::invalid_argument("label " + std::to_string(inst.label) + " out of range at index " +
                                  std::to_string(inst.original_index));
    }
    if (!seen.insert(inst.original_index).second) {
      throw std::invalid_argument("duplicate original_index " + std::to_string(inst.original_index));
    }
  }
}

Format format_from_string(std::string_view s) {
  if (s == "jsonl") return Format::jsonl;
  if (s == "tsv") return Format::tsv;
  throw std::invalid_argument("unsupported format '" + std::string(s) + "' (expected jsonl or tsv)");
}

std::string_view to_string(Format f) { return f == Format::jsonl ? "jsonl" : "tsv"; }

Dataset parse_dataset(std::string_view content, Format format, const LabelSet& labels,
                      const std::string& source) {
  if (labels.size() < 2) throw std::invalid_argument("label set needs at least 2 classes");
  Dataset out;
  out.num_classes = labels.size();
  out.provenance = Provenance::original;

  const auto lines = split_lines(content);
  std::size_t record = 0;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const std::size_t line_no = ln + 1;
    // A trailing blank line is tolerated; interior blank lines are records
    // with missing fields.
    if (line.empty() && ln + 1 == lines.size()) break;

    LabeledInstance inst;
    inst.original_index = record;
    std::string label_name;
    if (format == Format::jsonl) {
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError(source, line_no, std::string("invalid JSON: ") + e.what());
      }
      if (!obj.is_object()) throw DataError(source, line_no, "record is not a JSON object");
      for (const char* key : {"premise", "hypothesis", "label"}) {
        if (!obj.contains(key) || !obj[key].is_string()) {
          throw DataError(source, line_no, std::string("missing or non-string field '") + key + "'");
        }
      }
      inst.premise = obj["premise"].get<std::string>();
      inst.hypothesis = obj["hypothesis"].get<std::string>();
      label_name = obj["label"].get<std::string>();
    } else {
      std::vector<std::string_view> cols;
      std::size_t start = 0;
      while (true) {
        auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
          cols.push_back(line.substr(start));
          break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
      }
      if (cols.size() != 3) {
        throw DataError(source, line_no,
                        "expected 3 tab-separated columns, found " + std::to_string(cols.size()));
      }
      inst.premise = std::string(cols[0]);
      inst.hypothesis = std::string(cols[1]);
      label_name = std::string(cols[2]);
    }
    try {
      inst.label = labels.index_of(label_name);
    } catch (const std::out_of_range&) {
      throw DataError(source, line_no, "unknown label '" + label_name + "'");
    }
    out.instances.push_back(std::move(inst));
    ++record;
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, Format format, const LabelSet& labels) {
  return parse_dataset(io::read_file(path), format, labels, path.string());
}

std::string serialize_dataset(const Dataset& dataset, Format format, const LabelSet& labels) {
  if (labels.size() != dataset.num_classes) {
    throw std::invalid_argument("label set size does not match dataset class count");
  }
  std::string out;
  for (const auto& inst : dataset.instances) {
    const auto& label = labels.name_of(inst.label);
    if (format == Format::jsonl) {
      nlohmann::ordered_json obj;
      obj["premise"] = inst.premise;
      obj["hypothesis"] = inst.hypothesis;
      obj["label"] = label;
      out += obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    } else {
      for (const auto* field : {&inst.premise, &inst.hypothesis}) {
        if (field->find_first_of("\t\n\r") != std::string::npos) {
          throw std::invalid_argument("text at index " + std::to_string(inst.original_index) +
                                      " contains a tab or newline; use jsonl");
        }
      }
      out += inst.premise;
      out += '\t';
      out += inst.hypothesis;
      out += '\t';
      out += label;
    }
    out += '\n';
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset, Format format,
                   const LabelSet& labels) {
  io::write_file_atomic(path, serialize_dataset(dataset, format, labels));
}

FilterResult filter_invalid(const Dataset& dataset) {
  FilterResult result;
  result.dataset.num_classes = dataset.num_classes;
  result.dataset.provenance = dataset.provenance;
  for (const auto& inst : dataset.instances) {
    if (inst.premise.empty() || inst.hypothesis.empty()) {
      ++result.removed["empty_field"];
    } else if (text::has_control_char(inst.premise) || text::has_control_char(inst.hypothesis)) {
      ++result.removed["control_char"];
    } else {
      result.dataset.instances.push_back(inst);
    }
  }
  return result;
}

Dataset to_null_view(const Dataset& dataset) {
  Dataset out = dataset;
  for (auto& inst : out.instances) {
    inst.premise.clear();
    inst.hypothesis.clear();
  }
  out.provenance = Provenance::null_view;
  return out;
}

std::string_view to_string(Corruption c) {
  switch (c) {
    case Corruption::char_swap: return "char-swap";
    case Corruption::char_delete: return "char-delete";
    case Corruption::punctuation_insert: return "punctuation-insert";
    case Corruption::token_shuffle: return "token-shuffle";
    case Corruption::duplicate_fragment: return "duplicate-fragment";
  }
  return "char-swap";
}

Corruption corruption_from_string(std::string_view s) {
  for (auto c : {Corruption::char_swap, Corruption::char_delete, Corruption::punctuation_insert,
                 Corruption::token_shuffle, Corruption::duplicate_fragment}) {
    if (to_string(c) == s) return c;
  }
  throw std::invalid_argument("unknown corruption kind '" + std::string(s) + "'");
}

namespace {

void apply_corruption(Corruption kind, std::string& s, Rng& rng) {
  static constexpr char32_t kPunct[] = {U'!', U'?', U'.', U',', U';', U':', U'~', U'。'};
  auto scalars = text::decode_utf8(s);
  switch (kind) {
    case Corruption::char_swap: {
      if (scalars.size() < 2) return;
      const auto i = rng.below(scalars.size() - 1);
      std::swap(scalars[i], scalars[i + 1]);
      break;
    }
    case Corruption::char_delete: {
      if (scalars.empty()) return;
      scalars.erase(scalars.begin() + static_cast<std::ptrdiff_t>(rng.below(scalars.size())));
      break;
    }
    case Corruption::punctuation_insert: {
      const auto pos = rng.below(scalars.size() + 1);
      const auto p = kPunct[rng.below(std::size(kPunct))];
      scalars.insert(scalars.begin() + static_cast<std::ptrdiff_t>(pos), p);
      break;
    }
    case Corruption::token_shuffle: {
      auto tokens = text::split_whitespace(s);
      if (tokens.size() < 2) return;
      rng.shuffle(tokens);
      std::string joined;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) joined += ' ';
        joined += tokens[i];
      }
      s = std::move(joined);
      return;
    }
    case Corruption::duplicate_fragment: {
      if (scalars.empty()) return;
      const auto start = rng.below(scalars.size());
      const auto max_len = std::min<std::size_t>(5, scalars.size() - start);
      const auto len = 1 + rng.below(max_len);
      std::vector<char32_t> frag(scalars.begin() + static_cast<std::ptrdiff_t>(start),
                                 scalars.begin() + static_cast<std::ptrdiff_t>(start + len));
      scalars.insert(scalars.begin() + static_cast<std::ptrdiff_t>(start + len), frag.begin(),
                     frag.end());
      break;
    }
  }
  s = text::encode_utf8(scalars);
}

}  // namespace

Dataset inject_noise(const Dataset& dataset, const NoiseSpec& spec) {
  if (!(spec.replacement_ratio >= 0.0 && spec.replacement_ratio <= 1.0)) {
    throw std::invalid_argument("replacement_ratio must lie in [0, 1]");
  }
  const std::size_t m = dataset.size();
  const std::size_t k = std::min(m, round_half_up(spec.replacement_ratio * static_cast<double>(m)));
  if (k > 0 && spec.kinds.empty()) {
    throw std::invalid_argument("noise spec enables no corruption kinds");
  }
  Dataset out = dataset;
  if (k == 0) return out;
  out.provenance = Provenance::noisy;

  Rng rng(spec.seed);
  for (std::size_t pos : rng.sample_positions(m, k)) {
    auto& inst = out.instances[pos];
    const auto before_p = inst.premise;
    const auto before_h = inst.hypothesis;
    for (auto* field : {&inst.premise, &inst.hypothesis}) {
      const auto steps = 1 + rng.below(3);
      for (std::uint64_t s = 0; s < steps; ++s) {
        apply_corruption(spec.kinds[rng.below(spec.kinds.size())], *field, rng);
      }
    }
    // Swaps of equal neighbours or shuffles of equal tokens can be no-ops;
    // an insertion always changes the text.
    if (inst.premise == before_p && inst.hypothesis == before_h) {
      apply_corruption(Corruption::punctuation_insert, inst.hypothesis, rng);
    }
  }
  return out;
}

Dataset make_imbalanced(const Dataset& dataset, std::span<const double> class_keep_fractions,
                        std::uint64_t seed) {
  if (class_keep_fractions.size() != dataset.num_classes) {
    throw std::invalid_argument("need one keep fraction per class");
  }
  for (double f : class_keep_fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("keep fractions must lie in (0, 1]");
  }
  std::vector<std::vector<std::size_t>> by_class(dataset.num_classes);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class.at(dataset.instances[i].label).push_back(i);
  }
  std::vector<bool> keep(dataset.size(), false);
  Rng rng(seed);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto& members = by_class[c];
    const auto target = round_half_up(class_keep_fractions[c] * static_cast<double>(members.size()));
    if (!members.empty() && target == 0) {
      throw std::invalid_argument("keep fraction " + io::format_double(class_keep_fractions[c]) +
                                  " would remove every instance of class " + std::to_string(c));
    }
    for (std::size_t pos : rng.sample_positions(members.size(), target)) keep[members[pos]] = true;
  }
  Dataset out;
  out.num_classes = dataset.num_classes;
  out.provenance = Provenance::imbalanced;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (keep[i]) out.instances.push_back(dataset.instances[i]);
  }
  if (out.size() == dataset.size()) out.provenance = dataset.provenance;
  return out;
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::easy: return "easy";
    case Tier::medium: return "medium";
    case Tier::hard: return "hard";
  }
  return "easy";
}

namespace {

// Pseudo-words over disjoint letter sets so that cue n-grams above order 1
// rarely collide with filler n-grams.
std::string make_word(Rng& rng, std::string_view consonants, std::string_view vowels,
                      std::size_t syllables) {
  std::string w;
  for (std::size_t s = 0; s < syllables; ++s) {
    w += consonants[rng.below(consonants.size())];
    w += vowels[rng.below(vowels.size())];
  }
  return w;
}

std::vector<std::string> make_vocabulary(std::uint64_t seed, std::size_t count,
                                         std::string_view consonants, std::string_view vowels,
                                         std::size_t min_syl, std::size_t max_syl) {
  Rng rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> words;
  while (words.size() < count) {
    const auto syl = min_syl + rng.below(max_syl - min_syl + 1);
    auto w = make_word(rng, consonants, vowels, syl);
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

constexpr std::string_view kFillerConsonants = "bdfglmnprst";
constexpr std::string_view kFillerVowels = "aeiou";
constexpr std::string_view kCueConsonants = "jkqvwxz";
constexpr std::string_view kCueVowels = "yh";

void insert_word(std::vector<std::string>& words, std::string w, Rng& rng) {
  const auto pos = rng.below(words.size() + 1);
  words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), std::move(w));
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  const std::size_t n = spec.num_instances;
  const std::size_t c_count = spec.num_classes;
  if (c_count < 2) throw std::invalid_argument("num_classes must be at least 2");
  if (n < c_count) throw std::invalid_argument("num_instances must be at least num_classes");
  if (!(spec.hard_decoy_rate >= 0.0 && spec.hard_decoy_rate <= 1.0)) {
    throw std::invalid_argument("hard_decoy_rate must lie in [0, 1]");
  }
  for (double f : {spec.easy, spec.medium, spec.hard}) {
    if (f < 0.0) throw std::invalid_argument("difficulty fractions must be non-negative");
  }
  if (std::abs(spec.easy + spec.medium + spec.hard - 1.0) > 1e-9) {
    throw std::invalid_argument("difficulty fractions must sum to 1");
  }

  // Vocabularies depend only on the class count, so corpora generated with
  // different seeds share their cue words (train/test splits stay compatible).
  const auto filler = make_vocabulary(0x5eedf111e5ULL, 600, kFillerConsonants, kFillerVowels, 2, 3);
  const auto cues = make_vocabulary(0xc0ffee + c_count, 3 * c_count, kCueConsonants, kCueVowels, 3, 3);
  auto easy_kw = [&](std::size_t c) { return cues[c]; };
  auto prem_marker = [&](std::size_t c) { return cues[c_count + c]; };
  auto hyp_marker = [&](std::size_t c) { return cues[2 * c_count + c]; };

  Rng rng(spec.seed);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<Label>(i % c_count);
  rng.shuffle(labels);

  const auto n_easy = std::min(n, round_half_up(spec.easy * static_cast<double>(n)));
  const auto n_medium = std::min(n - n_easy, round_half_up(spec.medium * static_cast<double>(n)));
  std::vector<Tier> tiers(n, Tier::hard);
  std::fill_n(tiers.begin(), n_easy, Tier::easy);
  std::fill_n(tiers.begin() + static_cast<std::ptrdiff_t>(n_easy), n_medium, Tier::medium);
  rng.shuffle(tiers);

  auto filler_words = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::string> words;
    const auto len = lo + rng.below(hi - lo + 1);
    for (std::size_t i = 0; i < len; ++i) words.push_back(filler[rng.below(filler.size())]);
    return words;
  };

  SyntheticCorpus corpus;
  corpus.dataset.num_classes = c_count;
  corpus.dataset.provenance = Provenance::synthetic;
  corpus.tiers = tiers;
  corpus.dataset.instances.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = labels[i];
    auto premise = filler_words(6, 10);
    auto hypothesis = filler_words(3, 6);
    switch (tiers[i]) {
      case Tier::easy:
        insert_word(hypothesis, easy_kw(y), rng);
        break;
      case Tier::medium: {
        // Premise marker a covers {a, a+1}; hypothesis marker b covers
        // {b-1, b}. Both pairings below intersect in exactly {y}.
        const bool aligned = rng.bernoulli(0.5);
        const std::size_t a = aligned ? y : (y + c_count - 1) % c_count;
        const std::size_t b = aligned ? y : (y + 1) % c_count;
        insert_word(premise, prem_marker(a), rng);
        insert_word(hypothesis, hyp_marker(b), rng);
        break;
      }
      case Tier::hard:
        if (rng.bernoulli(spec.hard_decoy_rate)) insert_word(hypothesis, easy_kw(rng.below(c_count)), rng);
        break;
    }
    corpus.dataset.instances.push_back(
        LabeledInstance{i, join(premise), join(hypothesis), static_cast<Label>(y)});
  }
  return corpus;
}

}  // namespace pvikit
