#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tspra {

using WordId = std::uint32_t;

struct RawReview {
  std::string review_id;
  std::string author_id;
  std::string product_id;
  double rating = 0.0;
  std::string text;
  // Optional ordering key (e.g. a unix timestamp). When every review of an
  // author carries one, the earliest reviews go to the training split.
  std::optional<double> time;
};

struct LoadResult {
  std::vector<RawReview> reviews;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;  // one entry per skipped line
};

enum class InputFormat { kJsonLines };

/// Reads one review per line. Malformed or invalid records are skipped and
/// tallied; an unreadable file throws.
LoadResult load_reviews(const std::filesystem::path& path, InputFormat format = InputFormat::kJsonLines);

/// Parses already-loaded JSON Lines text; same semantics as load_reviews.
LoadResult parse_reviews(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t size() const { return words_.size(); }
  const std::string& word(WordId id) const { return words_.at(id); }
  const std::vector<std::string>& words() const { return words_; }
  std::optional<WordId> find(std::string_view word) const;

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

struct Review {
  std::string review_id;
  std::string product_id;
  std::size_t author = 0;  // dense index into Corpus::author_ids
  double rating = 0.0;
  std::vector<WordId> tokens;
  std::optional<double> time;
};

struct Corpus {
  Vocabulary vocabulary;
  std::vector<Review> reviews;
  std::vector<std::string> author_ids;  // index -> external author id
  std::size_t num_products = 0;

  std::size_t num_authors() const { return author_ids.size(); }
  std::size_t num_tokens() const;
};

// --- text normalization -----------------------------------------------------

/// Bundled English stopword list.
const std::unordered_set<std::string>& default_stopwords();

/// Suffix normalization of one lowercase alphabetic word, iterated to a fixed
/// point: -ies -> -y, -sses -> -ss, -ches/-shes/-xes -> drop "es", plural -s,
/// -ied -> -y, -ing and -ed with a minimum stem length, then undoubling of a
/// trailing double consonant left behind by -ing/-ed.
std::string normalize_word(std::string_view word);

/// Lowercases, splits on non-letters, normalizes suffixes and drops stopwords
/// (checked both before and after suffix normalization).
std::vector<std::string> normalize_text(std::string_view text,
                                        const std::unordered_set<std::string>& stopwords);

// --- corpus construction ----------------------------------------------------

/// Normalizes every review with the bundled stopwords, keeps words whose
/// corpus frequency is >= min_word_count, drops reviews left empty and
/// re-indexes authors densely in order of first appearance. The vocabulary is
/// sorted lexicographically.
Corpus build_corpus(const std::vector<RawReview>& reviews, std::size_t min_word_count = 2);

/// Same, with an explicit stopword set.
Corpus build_corpus(const std::vector<RawReview>& reviews, std::size_t min_word_count,
                    const std::unordered_set<std::string>& stopwords);

struct SplitOptions {
  double train_fraction = 0.8;
  std::size_t min_train = 3;
  std::size_t min_test = 1;
  std::size_t max_train_total = 8000;
  std::uint64_t seed = 1;
};

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

/// Per-author split: ceil(train_fraction * n) of each author's reviews go to
/// train, the rest to test. Authors that cannot satisfy min_train/min_test are
/// dropped; if the training side exceeds max_train_total, whole authors are
/// removed in seeded-shuffle order until it fits. Both halves share the input
/// vocabulary and a re-indexed author table.
CorpusSplit split_by_author(const Corpus& corpus, const SplitOptions& options = {});

// --- encoded corpus file ----------------------------------------------------

enum class SplitSelector { kAll, kTrain, kTest };

/// Writes vocabulary, author table and reviews tagged with their split.
void save_encoded_corpus(const std::filesystem::path& path, const CorpusSplit& split);
void save_encoded_corpus(const std::filesystem::path& path, const Corpus& corpus);

Corpus load_encoded_corpus(const std::filesystem::path& path, SplitSelector which = SplitSelector::kAll);

}  // namespace tspra
