#include "trirank/scorers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>

namespace trirank {
namespace {

bool is_space_cp(std::uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0a: case 0x0b: case 0x0c: case 0x0d: case 0x20:
    case 0x85: case 0xa0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202f: case 0x205f: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200a;
  }
}

// Minimal UTF-8 decode; invalid bytes come back as their own code points so
// arbitrary binary input still tokenizes deterministically.
std::uint32_t next_cp(std::string_view s, std::size_t& pos, std::size_t& len) {
  unsigned char c = s[pos];
  std::size_t need = 0;
  if (c >= 0xf0)
    need = 3;
  else if (c >= 0xe0)
    need = 2;
  else if (c >= 0xc0)
    need = 1;
  if (need > 0 && pos + need < s.size()) {
    std::uint32_t cp = c & (0x3f >> need);
    std::size_t i = 1;
    for (; i <= need; ++i) {
      unsigned char cc = s[pos + i];
      if ((cc & 0xc0) != 0x80) break;
      cp = (cp << 6) | (cc & 0x3f);
    }
    if (i == need + 1) {
      len = need + 1;
      pos += len;
      return cp;
    }
  }
  len = 1;
  ++pos;
  return c;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t start = pos, len = 0;
    std::uint32_t cp = next_cp(text, pos, len);
    if (is_space_cp(cp)) {
      if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
    } else if (cp < 0x80 && std::ispunct(static_cast<int>(cp))) {
      // dropped
    } else if (cp < 0x80) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
    } else {
      cur.append(text.substr(start, len));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<std::pair<std::string, int>> sorted_bigrams(std::string_view text,
                                                        BigramMode mode) {
  std::map<std::string, int> counts;
  if (mode == BigramMode::kWord) {
    std::vector<std::string> toks = word_tokens(text);
    for (std::size_t i = 0; i + 1 < toks.size(); ++i)
      ++counts[toks[i] + " " + toks[i + 1]];
  } else {
    for (std::size_t i = 0; i + 1 < text.size(); ++i)
      ++counts[std::string(text.substr(i, 2))];
  }
  return {counts.begin(), counts.end()};
}

long long overlap_count(const std::vector<std::pair<std::string, int>>& a,
                        const std::vector<std::pair<std::string, int>>& b) {
  long long overlap = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    int cmp = ia->first.compare(ib->first);
    if (cmp < 0)
      ++ia;
    else if (cmp > 0)
      ++ib;
    else {
      overlap += std::min(ia->second, ib->second);
      ++ia, ++ib;
    }
  }
  return overlap;
}

double fmeasure(long long overlap, long long cand_total, long long ref_total) {
  if (cand_total == 0 || ref_total == 0 || overlap == 0) return 0.0;
  double p = static_cast<double>(overlap) / static_cast<double>(cand_total);
  double r = static_cast<double>(overlap) / static_cast<double>(ref_total);
  return 2.0 * p * r / (p + r);
}

class Rouge2Scorer final : public Scorer {
 public:
  explicit Rouge2Scorer(BigramMode mode) : mode_(mode) {}
  PreparedText prepare(std::string_view text) const override {
    PreparedText t;
    t.bigram_seq = sorted_bigrams(text, mode_);
    for (const auto& [k, c] : t.bigram_seq) t.bigram_total += c;
    return t;
  }
  double score(const PreparedText& a, const PreparedText& b) override {
    return fmeasure(overlap_count(a.bigram_seq, b.bigram_seq), a.bigram_total,
                    b.bigram_total);
  }

 private:
  BigramMode mode_;
};

class ExactScorer final : public Scorer {
 public:
  PreparedText prepare(std::string_view text) const override {
    return {.trimmed = std::string(trim_ws(text))};
  }
  double score(const PreparedText& a, const PreparedText& b) override {
    return a.trimmed == b.trimmed ? 1.0 : 0.0;
  }
};

class NoisyExactScorer final : public Scorer {
 public:
  NoisyExactScorer(double p, Seed seed) : p_(p), rng_(seed) {}
  PreparedText prepare(std::string_view text) const override {
    return {.trimmed = std::string(trim_ws(text))};
  }
  double score(const PreparedText& a, const PreparedText& b) override {
    bool flip = rng_.next_double() < p_;
    bool eq = a.trimmed == b.trimmed;
    return (eq != flip) ? 1.0 : 0.0;
  }

 private:
  double p_;
  Rng rng_;
};

}  // namespace

std::map<std::string, int> bigrams(std::string_view text, BigramMode mode) {
  auto seq = sorted_bigrams(text, mode);
  return {seq.begin(), seq.end()};
}

double rouge2_f(std::string_view candidate, std::string_view reference,
                BigramMode mode) {
  Rouge2Scorer scorer(mode);
  return scorer.score_text(candidate, reference);
}

std::string_view trim_ws(std::string_view s) {
  std::size_t b = 0, e = s.size();
  auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (b < e && ws(s[b])) ++b;
  while (e > b && ws(s[e - 1])) --e;
  return s.substr(b, e - b);
}

int exact_match(std::string_view a, std::string_view b) {
  return trim_ws(a) == trim_ws(b) ? 1 : 0;
}

int noisy_match(std::string_view a, std::string_view b, double flip_p,
                Rng& rng) {
  if (!(flip_p >= 0.0 && flip_p <= 1.0))
    throw Error(ErrorKind::kInvalidProbability,
                "flip probability outside [0,1]");
  bool flip = rng.next_double() < flip_p;
  int eq = exact_match(a, b);
  return flip ? 1 - eq : eq;
}

ScorerSpec ScorerSpec::parse(std::string_view name, Seed seed) {
  ScorerSpec spec;
  spec.seed = seed;
  if (name == "rouge2-word") {
    spec.kind = Kind::kRouge2Word;
  } else if (name == "rouge2-char") {
    spec.kind = Kind::kRouge2Char;
  } else if (name == "exact") {
    spec.kind = Kind::kExact;
  } else if (name.rfind("noisy-exact:p=", 0) == 0) {
    spec.kind = Kind::kNoisyExact;
    std::string_view num = name.substr(14);
    auto [end, ec] =
        std::from_chars(num.data(), num.data() + num.size(), spec.p);
    if (ec != std::errc{} || end != num.data() + num.size())
      throw Error(ErrorKind::kInvalidParams,
                  "bad scorer spec: " + std::string(name));
    if (!(spec.p >= 0.0 && spec.p <= 1.0))
      throw Error(ErrorKind::kInvalidProbability,
                  "flip probability outside [0,1]: " + std::string(name));
  } else {
    throw Error(ErrorKind::kInvalidParams,
                "unknown scorer: " + std::string(name));
  }
  return spec;
}

std::string ScorerSpec::name() const {
  switch (kind) {
    case Kind::kRouge2Word:
      return "rouge2-word";
    case Kind::kRouge2Char:
      return "rouge2-char";
    case Kind::kExact:
      return "exact";
    case Kind::kNoisyExact: {
      char buf[48];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p);
      (void)ec;
      return "noisy-exact:p=" + std::string(buf, end);
    }
  }
  return "";
}

std::unique_ptr<Scorer> ScorerSpec::instance(std::uint64_t stream) const {
  switch (kind) {
    case Kind::kRouge2Word:
      return std::make_unique<Rouge2Scorer>(BigramMode::kWord);
    case Kind::kRouge2Char:
      return std::make_unique<Rouge2Scorer>(BigramMode::kCharacter);
    case Kind::kExact:
      return std::make_unique<ExactScorer>();
    case Kind::kNoisyExact:
      return std::make_unique<NoisyExactScorer>(p, Rng::derive(seed, stream));
  }
  throw Error(ErrorKind::kInvalidParams, "unset scorer kind");
}

}  // namespace trirank
