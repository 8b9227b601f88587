#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ragat/errors.hpp"

namespace ragat {

enum class TokenizerMode { Whitespace, Char };

TokenizerMode tokenizer_mode_from_string(const std::string& s);
std::string to_string(TokenizerMode mode);

struct RawExample {
    int label = 0;  // 0 = non-rumor, 1 = rumor
    std::string text;
};

// Fixed-length encoded example. mask[i] == 1 exactly for i < true_len;
// ids[i] == PAD wherever mask[i] == 0.
struct EncodedExample {
    std::vector<int> ids;
    std::vector<std::uint8_t> mask;
    int label = 0;
    int true_len = 0;
};

// Token-to-id map with reserved PAD=0 and UNK=1 ids.
class Vocabulary {
public:
    static constexpr int kPadId = 0;
    static constexpr int kUnkId = 1;

    Vocabulary();

    // Appends a token with the next dense id. Reserved tokens rejected.
    int add_token(const std::string& token, std::int64_t freq = 0);

    int lookup(const std::string& token) const;  // UNK for unseen tokens
    bool contains(const std::string& token) const;
    const std::string& token_of(int id) const;
    std::int64_t freq_of(const std::string& token) const;
    int size() const { return static_cast<int>(id_to_token_.size()); }

    const std::vector<std::string>& tokens() const { return id_to_token_; }

    void save(const std::string& path) const;  // one "<token>\t<id>" per line
    static Vocabulary load(const std::string& path);

private:
    std::unordered_map<std::string, int> token_to_id_;
    std::vector<std::string> id_to_token_;
    std::unordered_map<std::string, std::int64_t> freq_;
};

// Whitespace mode splits on Unicode whitespace (ASCII plus U+00A0/U+3000);
// char mode emits one token per non-whitespace code point.
std::vector<std::string> tokenize(const std::string& text, TokenizerMode mode);

// Frequency-sorted vocabulary over the corpus: tokens with freq >= min_freq,
// most frequent first, ties lexicographic, truncated to max_size - 2
// (reserving PAD and UNK), ids assigned from 2 upward.
Vocabulary build_vocab(const std::vector<RawExample>& corpus, TokenizerMode mode, int min_freq,
                       int max_size);

// Fixed-length encoding: unknown tokens map to UNK, over-length sequences
// keep the first max_len tokens, short sequences are right-padded.
EncodedExample encode(const std::vector<std::string>& tokens, const Vocabulary& vocab, int max_len);

// One example per non-blank line: "<label>\t<text>" with label 0 or 1.
std::vector<RawExample> load_dataset(const std::string& path);

// Deterministic Fisher-Yates shuffle by seed, then a floor(N * train_ratio)
// prefix/suffix partition.
std::pair<std::vector<RawExample>, std::vector<RawExample>> split(const std::vector<RawExample>& examples,
                                                                  double train_ratio,
                                                                  std::uint64_t seed);

// Consecutive index chunks after an optional seeded shuffle; the final
// partial batch is kept.
std::vector<std::vector<std::size_t>> batches(std::size_t n_examples, int batch_size, bool shuffle,
                                              std::uint64_t seed);

}  // namespace ragat
