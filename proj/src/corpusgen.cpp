#include "ragat/corpusgen.hpp"

#include <fstream>

#include "ragat/errors.hpp"
#include "ragat/rng.hpp"

namespace ragat {

const std::vector<std::string>& rumor_keywords() {
    static const std::vector<std::string> pool = {
        "hoax",   "fabricated", "panic",    "exposed",  "shocking", "secret",
        "banned", "coverup",    "miracle",  "leaked",   "warning",  "urgent",
        "deadly", "conspiracy", "forwarded", "unverified",
    };
    return pool;
}

const std::vector<std::string>& nonrumor_keywords() {
    static const std::vector<std::string> pool = {
        "official", "confirmed", "announcement", "statement", "report",   "verified",
        "bulletin", "briefing",  "spokesperson", "ministry",  "schedule", "update",
        "weather",  "traffic",   "opening",      "ceremony",
    };
    return pool;
}

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> pool = {
        "the", "a", "in", "on", "today", "city", "people", "news", "online", "local",
    };
    return pool;
}

namespace {

std::string make_sentence(Rng& rng, const std::vector<std::string>& keywords) {
    // 4-7 class keywords plus 2-4 shared filler words, order shuffled.
    const int n_key = 4 + static_cast<int>(rng.next_below(4));
    const int n_fill = 2 + static_cast<int>(rng.next_below(3));
    std::vector<std::string> words;
    words.reserve(static_cast<std::size_t>(n_key + n_fill));
    for (int i = 0; i < n_key; ++i) words.push_back(keywords[rng.next_below(keywords.size())]);
    for (int i = 0; i < n_fill; ++i) words.push_back(filler_words()[rng.next_below(filler_words().size())]);
    rng.shuffle(words);

    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

}  // namespace

void generate_corpus(const std::string& out_path, int n_per_class, std::uint64_t seed) {
    if (n_per_class < 1) throw ValueError("generate_corpus: n_per_class must be >= 1");
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus file: " + out_path);

    Rng rng(seed);
    for (int i = 0; i < n_per_class; ++i) {
        out << "1\t" << make_sentence(rng, rumor_keywords()) << '\n';
        out << "0\t" << make_sentence(rng, nonrumor_keywords()) << '\n';
    }
    if (!out) throw DataError("write failed for corpus file: " + out_path);
}

}  // namespace ragat
