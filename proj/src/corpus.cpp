#include "tspra/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tspra/common.hpp"
#include "tspra/random.hpp"

namespace tspra {

using nlohmann::json;

namespace {

constexpr int kCorpusFormatVersion = 1;
constexpr const char* kCorpusFormatTag = "tspra-corpus";

std::optional<std::string> id_field(const json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  return std::nullopt;
}

std::optional<RawReview> parse_record(std::string_view line, std::string& why) {
  json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded() || !record.is_object()) {
    why = "not a JSON object";
    return std::nullopt;
  }
  RawReview review;
  auto review_id = id_field(record, "review_id");
  auto author_id = id_field(record, "author_id");
  auto product_id = id_field(record, "product_id");
  if (!review_id || !author_id || !product_id) {
    why = "missing review_id/author_id/product_id";
    return std::nullopt;
  }
  if (author_id->empty()) {
    why = "empty author_id";
    return std::nullopt;
  }
  auto rating = record.find("rating");
  if (rating == record.end() || !rating->is_number()) {
    why = "rating missing or not a number";
    return std::nullopt;
  }
  review.rating = rating->get<double>();
  if (!(review.rating >= 1.0 && review.rating <= 5.0)) {
    why = "rating outside [1,5]";
    return std::nullopt;
  }
  auto text = record.find("text");
  if (text == record.end() || !text->is_string()) {
    why = "text missing or not a string";
    return std::nullopt;
  }
  review.review_id = std::move(*review_id);
  review.author_id = std::move(*author_id);
  review.product_id = std::move(*product_id);
  review.text = text->get<std::string>();
  auto time = record.find("time");
  if (time != record.end() && time->is_number()) review.time = time->get<double>();
  return review;
}

bool ends_with(std::string_view word, std::string_view suffix) {
  return word.size() >= suffix.size() && word.substr(word.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string undouble(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
    stem.pop_back();
  }
  return stem;
}

// One application of the first matching rule; returns the input unchanged if
// no rule fires. Every rule shortens the word, so iteration terminates.
std::string apply_suffix_rule(const std::string& w) {
  const std::size_t n = w.size();
  if (ends_with(w, "sses")) return w.substr(0, n - 2);
  if (ends_with(w, "ies") && n > 4) return w.substr(0, n - 3) + "y";
  if ((ends_with(w, "ches") || ends_with(w, "shes")) && n > 5) return w.substr(0, n - 2);
  if (ends_with(w, "xes") && n > 4) return w.substr(0, n - 2);
  if (ends_with(w, "s") && n > 3 && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
    return w.substr(0, n - 1);
  }
  if (ends_with(w, "ied") && n > 4) return w.substr(0, n - 3) + "y";
  if (ends_with(w, "ing") && n >= 7) return undouble(w.substr(0, n - 3));
  if (ends_with(w, "ed") && n >= 6) return undouble(w.substr(0, n - 2));
  return w;
}

struct RawEntry {
  const Review* review;
  bool train;
};

json corpus_to_json(const Vocabulary& vocabulary, const std::vector<std::string>& author_ids,
                    const std::vector<RawEntry>& entries) {
  json out;
  out["format"] = kCorpusFormatTag;
  out["version"] = kCorpusFormatVersion;
  out["vocabulary"] = vocabulary.words();
  out["authors"] = author_ids;
  std::set<std::string> products;
  json reviews = json::array();
  for (const auto& entry : entries) {
    const Review& r = *entry.review;
    products.insert(r.product_id);
    json record;
    record["review_id"] = r.review_id;
    record["product_id"] = r.product_id;
    record["author"] = r.author;
    record["rating"] = r.rating;
    record["tokens"] = r.tokens;
    if (r.time) record["time"] = *r.time;
    record["split"] = entry.train ? "train" : "test";
    reviews.push_back(std::move(record));
  }
  out["num_products"] = products.size();
  out["reviews"] = std::move(reviews);
  return out;
}

void write_json(const std::filesystem::path& path, const json& document) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path.string());
  out << document.dump() << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace

// --- loading ----------------------------------------------------------------

LoadResult parse_reviews(std::string_view text) {
  LoadResult result;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    std::string why;
    if (auto review = parse_record(line, why)) {
      result.reviews.push_back(std::move(*review));
    } else {
      ++result.skipped;
      result.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
    }
  }
  return result;
}

LoadResult load_reviews(const std::filesystem::path& path, InputFormat format) {
  if (format != InputFormat::kJsonLines) {
    throw Error(ErrorKind::kInvalidArgument, "unsupported input format");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read reviews file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_reviews(buffer.str());
}

// --- vocabulary -------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto [it, inserted] = index_.emplace(words_[i], static_cast<WordId>(i));
    if (!inserted) throw Error(ErrorKind::kSchema, "duplicate vocabulary word: " + words_[i]);
  }
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::num_tokens() const {
  std::size_t n = 0;
  for (const auto& r : reviews) n += r.tokens.size();
  return n;
}

// --- normalization ----------------------------------------------------------

const std::unordered_set<std::string>& default_stopwords() {
  // Negations are deliberately absent: they carry sentiment in reviews.
  static const std::unordered_set<std::string> words = {
      "a",       "about",   "above",  "after",   "again",    "against", "all",     "am",
      "an",      "and",     "any",    "are",     "as",       "at",      "be",      "because",
      "been",    "before",  "being",  "below",   "between",  "both",    "but",     "by",
      "can",     "could",   "did",    "do",      "does",     "doing",   "down",    "during",
      "each",    "few",     "for",    "from",    "further",  "had",     "has",     "have",
      "having",  "he",      "her",    "here",    "hers",     "herself", "him",     "himself",
      "his",     "how",     "i",      "if",      "in",       "into",    "is",      "it",
      "its",     "itself",  "just",   "me",      "more",     "most",    "my",      "myself",
      "now",     "of",      "off",    "on",      "once",     "only",    "or",      "other",
      "our",     "ours",    "ourselves", "out",  "over",     "own",     "s",       "same",
      "she",     "should",  "so",     "some",    "such",     "t",       "than",    "that",
      "the",     "their",   "theirs", "them",    "themselves", "then",  "there",   "these",
      "they",    "this",    "those",  "through", "to",       "too",     "under",   "until",
      "up",      "very",    "was",    "we",      "were",     "what",    "when",    "where",
      "which",   "while",   "who",    "whom",    "why",      "will",    "with",    "would",
      "you",     "your",    "yours",  "yourself", "yourselves", "also", "get",     "got",
      "one",     "ll",      "ve",     "re",      "d",        "m",       "don",     "didn",
      "doesn",   "isn",     "wasn",   "aren",    "weren",    "won",     "wouldn",  "couldn",
      "shouldn", "hasn",    "haven",  "hadn",
  };
  return words;
}

std::string normalize_word(std::string_view word) {
  std::string current(word);
  for (;;) {
    std::string next = apply_suffix_rule(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

std::vector<std::string> normalize_text(std::string_view text,
                                        const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (!stopwords.contains(token)) {
      std::string normalized = normalize_word(token);
      if (!normalized.empty() && !stopwords.contains(normalized)) out.push_back(std::move(normalized));
    }
    token.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalpha(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

// --- corpus construction ----------------------------------------------------

Corpus build_corpus(const std::vector<RawReview>& reviews, std::size_t min_word_count) {
  return build_corpus(reviews, min_word_count, default_stopwords());
}

Corpus build_corpus(const std::vector<RawReview>& reviews, std::size_t min_word_count,
                    const std::unordered_set<std::string>& stopwords) {
  if (reviews.empty()) throw Error(ErrorKind::kInvalidArgument, "build_corpus: no reviews");

  std::vector<std::vector<std::string>> normalized;
  normalized.reserve(reviews.size());
  std::map<std::string, std::size_t> frequency;
  for (const auto& review : reviews) {
    normalized.push_back(normalize_text(review.text, stopwords));
    for (const auto& w : normalized.back()) ++frequency[w];
  }

  std::vector<std::string> words;
  for (const auto& [word, count] : frequency) {
    if (count >= min_word_count) words.push_back(word);
  }
  Corpus corpus;
  corpus.vocabulary = Vocabulary(std::move(words));

  std::unordered_map<std::string, std::size_t> author_index;
  std::set<std::string> products;
  for (std::size_t r = 0; r < reviews.size(); ++r) {
    Review encoded;
    for (const auto& w : normalized[r]) {
      if (auto id = corpus.vocabulary.find(w)) encoded.tokens.push_back(*id);
    }
    if (encoded.tokens.empty()) continue;
    const RawReview& raw = reviews[r];
    auto [it, inserted] = author_index.emplace(raw.author_id, corpus.author_ids.size());
    if (inserted) corpus.author_ids.push_back(raw.author_id);
    encoded.author = it->second;
    encoded.review_id = raw.review_id;
    encoded.product_id = raw.product_id;
    encoded.rating = raw.rating;
    encoded.time = raw.time;
    products.insert(raw.product_id);
    corpus.reviews.push_back(std::move(encoded));
  }
  if (corpus.reviews.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "build_corpus: every review is empty after preprocessing");
  }
  corpus.num_products = products.size();
  return corpus;
}

CorpusSplit split_by_author(const Corpus& corpus, const SplitOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "train_fraction must lie in (0, 1)");
  }

  std::vector<std::vector<std::size_t>> by_author(corpus.num_authors());
  for (std::size_t r = 0; r < corpus.reviews.size(); ++r) {
    by_author.at(corpus.reviews[r].author).push_back(r);
  }

  std::vector<bool> in_train(corpus.reviews.size(), false);
  std::vector<std::size_t> kept_authors;
  std::vector<std::size_t> train_size(corpus.num_authors(), 0);
  for (std::size_t a = 0; a < by_author.size(); ++a) {
    auto& ids = by_author[a];
    const std::size_t n = ids.size();
    if (n == 0) continue;
    const bool timed = std::all_of(ids.begin(), ids.end(),
                                   [&](std::size_t r) { return corpus.reviews[r].time.has_value(); });
    if (timed) {
      std::stable_sort(ids.begin(), ids.end(), [&](std::size_t x, std::size_t y) {
        return *corpus.reviews[x].time < *corpus.reviews[y].time;
      });
    } else {
      Rng rng(mix_seed(options.seed ^ stable_hash(corpus.author_ids[a])));
      for (std::size_t i = n; i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
    }
    const auto n_train = static_cast<std::size_t>(
        std::ceil(options.train_fraction * static_cast<double>(n) - 1e-9));
    const std::size_t n_test = n - n_train;
    if (n_train < options.min_train || n_test < options.min_test) continue;
    for (std::size_t i = 0; i < n_train; ++i) in_train[ids[i]] = true;
    train_size[a] = n_train;
    kept_authors.push_back(a);
  }

  std::size_t total_train = 0;
  for (std::size_t a : kept_authors) total_train += train_size[a];
  std::vector<bool> keep(corpus.num_authors(), false);
  for (std::size_t a : kept_authors) keep[a] = true;
  if (total_train > options.max_train_total) {
    std::vector<std::size_t> order = kept_authors;
    Rng rng(mix_seed(options.seed));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t a : order) {
      if (total_train <= options.max_train_total) break;
      keep[a] = false;
      total_train -= train_size[a];
    }
  }

  std::vector<std::size_t> remap(corpus.num_authors(), SIZE_MAX);
  std::vector<std::string> author_ids;
  for (std::size_t a = 0; a < corpus.num_authors(); ++a) {
    if (!keep[a]) continue;
    remap[a] = author_ids.size();
    author_ids.push_back(corpus.author_ids[a]);
  }
  if (author_ids.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "split_by_author: no author satisfies the split constraints");
  }

  CorpusSplit split;
  split.train.vocabulary = corpus.vocabulary;
  split.test.vocabulary = corpus.vocabulary;
  split.train.author_ids = author_ids;
  split.test.author_ids = author_ids;
  std::set<std::string> train_products;
  std::set<std::string> test_products;
  for (std::size_t r = 0; r < corpus.reviews.size(); ++r) {
    const Review& review = corpus.reviews[r];
    if (!keep[review.author]) continue;
    Review copy = review;
    copy.author = remap[review.author];
    if (in_train[r]) {
      train_products.insert(copy.product_id);
      split.train.reviews.push_back(std::move(copy));
    } else {
      test_products.insert(copy.product_id);
      split.test.reviews.push_back(std::move(copy));
    }
  }
  split.train.num_products = train_products.size();
  split.test.num_products = test_products.size();
  return split;
}

// --- encoded corpus file ----------------------------------------------------

void save_encoded_corpus(const std::filesystem::path& path, const CorpusSplit& split) {
  if (!(split.train.vocabulary == split.test.vocabulary) || split.train.author_ids != split.test.author_ids) {
    throw Error(ErrorKind::kInvalidArgument, "train/test halves must share vocabulary and authors");
  }
  std::vector<RawEntry> entries;
  for (const auto& r : split.train.reviews) entries.push_back({&r, true});
  for (const auto& r : split.test.reviews) entries.push_back({&r, false});
  write_json(path, corpus_to_json(split.train.vocabulary, split.train.author_ids, entries));
}

void save_encoded_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::vector<RawEntry> entries;
  for (const auto& r : corpus.reviews) entries.push_back({&r, true});
  write_json(path, corpus_to_json(corpus.vocabulary, corpus.author_ids, entries));
}

Corpus load_encoded_corpus(const std::filesystem::path& path, SplitSelector which) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read corpus file: " + path.string());
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorKind::kSchema, "corpus file is not valid JSON: " + path.string());
  }
  if (doc.value("format", "") != kCorpusFormatTag) {
    throw Error(ErrorKind::kSchema, "not an encoded corpus file: " + path.string());
  }
  if (doc.value("version", 0) != kCorpusFormatVersion) {
    throw Error(ErrorKind::kSchema, "unsupported corpus file version in " + path.string());
  }
  try {
    Corpus corpus;
    corpus.vocabulary = Vocabulary(doc.at("vocabulary").get<std::vector<std::string>>());
    corpus.author_ids = doc.at("authors").get<std::vector<std::string>>();
    corpus.num_products = doc.value("num_products", std::size_t{0});
    for (const auto& record : doc.at("reviews")) {
      const std::string split = record.value("split", "train");
      if (which == SplitSelector::kTrain && split != "train") continue;
      if (which == SplitSelector::kTest && split != "test") continue;
      Review review;
      review.review_id = record.at("review_id").get<std::string>();
      review.product_id = record.value("product_id", "");
      review.author = record.at("author").get<std::size_t>();
      review.rating = record.at("rating").get<double>();
      review.tokens = record.at("tokens").get<std::vector<WordId>>();
      if (record.contains("time")) review.time = record.at("time").get<double>();
      if (review.author >= corpus.author_ids.size()) {
        throw Error(ErrorKind::kSchema, "review " + review.review_id + " has an out-of-range author index");
      }
      for (WordId w : review.tokens) {
        if (w >= corpus.vocabulary.size()) {
          throw Error(ErrorKind::kSchema, "review " + review.review_id + " has an out-of-range token id");
        }
      }
      corpus.reviews.push_back(std::move(review));
    }
    return corpus;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("malformed corpus file: ") + e.what());
  }
}

}  // namespace tspra
