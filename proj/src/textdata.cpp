#include "ragat/textdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ragat/rng.hpp"

namespace ragat {

namespace {

// Decodes the UTF-8 code point starting at `i`; advances `i` past it.
// Malformed bytes are consumed one at a time and returned as-is.
std::uint32_t next_code_point(const std::string& s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    std::size_t len = 1;
    std::uint32_t cp = b0;
    if ((b0 & 0x80u) == 0) {
        len = 1;
    } else if ((b0 & 0xE0u) == 0xC0u) {
        len = 2;
        cp = b0 & 0x1Fu;
    } else if ((b0 & 0xF0u) == 0xE0u) {
        len = 3;
        cp = b0 & 0x0Fu;
    } else if ((b0 & 0xF8u) == 0xF0u) {
        len = 4;
        cp = b0 & 0x07u;
    }
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
        const unsigned char bk = byte(i + k);
        if ((bk & 0xC0u) != 0x80u) {
            len = 1;
            cp = b0;
            break;
        }
        cp = (cp << 6) | (bk & 0x3Fu);
    }
    i += len;
    return cp;
}

bool is_space_cp(std::uint32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
           cp == 0x00A0 || cp == 0x3000;
}

std::string encode_utf8(std::uint32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

}  // namespace

TokenizerMode tokenizer_mode_from_string(const std::string& s) {
    if (s == "whitespace") return TokenizerMode::Whitespace;
    if (s == "char") return TokenizerMode::Char;
    throw ConfigError("unknown tokenizer mode: " + s);
}

std::string to_string(TokenizerMode mode) {
    return mode == TokenizerMode::Whitespace ? "whitespace" : "char";
}

Vocabulary::Vocabulary() {
    id_to_token_ = {"<pad>", "<unk>"};
    token_to_id_ = {{"<pad>", kPadId}, {"<unk>", kUnkId}};
}

int Vocabulary::add_token(const std::string& token, std::int64_t freq) {
    if (token_to_id_.count(token)) throw ContractError("vocabulary already contains token: " + token);
    const int id = static_cast<int>(id_to_token_.size());
    id_to_token_.push_back(token);
    token_to_id_[token] = id;
    freq_[token] = freq;
    return id;
}

int Vocabulary::lookup(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(const std::string& token) const { return token_to_id_.count(token) > 0; }

const std::string& Vocabulary::token_of(int id) const {
    if (id < 0 || id >= size()) throw ContractError("vocabulary id out of range: " + std::to_string(id));
    return id_to_token_[static_cast<std::size_t>(id)];
}

std::int64_t Vocabulary::freq_of(const std::string& token) const {
    auto it = freq_.find(token);
    return it == freq_.end() ? 0 : it->second;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write vocabulary file: " + path);
    for (int id = 0; id < size(); ++id) out << id_to_token_[static_cast<std::size_t>(id)] << '\t' << id << '\n';
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read vocabulary file: " + path);
    Vocabulary vocab;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("vocabulary parse error at line " + std::to_string(line_no));
        const std::string token = line.substr(0, tab);
        const int id = std::stoi(line.substr(tab + 1));
        if (id <= kUnkId) {
            if (token != vocab.token_of(id)) throw ParseError("reserved id mismatch at line " + std::to_string(line_no));
            continue;
        }
        if (vocab.add_token(token) != id) throw ParseError("non-dense vocabulary id at line " + std::to_string(line_no));
    }
    return vocab;
}

std::vector<std::string> tokenize(const std::string& text, TokenizerMode mode) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::uint32_t cp = next_code_point(text, i);
        if (is_space_cp(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        if (mode == TokenizerMode::Char) {
            tokens.push_back(encode_utf8(cp));
        } else {
            current += encode_utf8(cp);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    if (tokens.empty()) throw EmptyInputError("tokenize: no tokens in input text");
    return tokens;
}

Vocabulary build_vocab(const std::vector<RawExample>& corpus, TokenizerMode mode, int min_freq,
                       int max_size) {
    if (corpus.empty()) throw EmptyInputError("build_vocab: empty corpus");
    if (min_freq < 1) throw ValueError("build_vocab: min_freq must be >= 1");
    if (max_size < 2) throw ValueError("build_vocab: max_size must be >= 2");

    std::unordered_map<std::string, std::int64_t> counts;
    for (const RawExample& ex : corpus) {
        for (const std::string& tok : tokenize(ex.text, mode)) ++counts[tok];
    }
    std::vector<std::pair<std::string, std::int64_t>> items(counts.begin(), counts.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    const std::size_t cap = static_cast<std::size_t>(max_size - 2);
    for (const auto& [token, freq] : items) {
        if (freq < min_freq) break;
        if (static_cast<std::size_t>(vocab.size() - 2) >= cap) break;
        vocab.add_token(token, freq);
    }
    return vocab;
}

EncodedExample encode(const std::vector<std::string>& tokens, const Vocabulary& vocab, int max_len) {
    if (max_len < 1) throw ValueError("encode: max_len must be >= 1");
    if (tokens.empty()) throw EmptyInputError("encode: empty token list");

    EncodedExample ex;
    ex.ids.assign(static_cast<std::size_t>(max_len), Vocabulary::kPadId);
    ex.mask.assign(static_cast<std::size_t>(max_len), 0);
    ex.true_len = std::min<int>(max_len, static_cast<int>(tokens.size()));
    for (int i = 0; i < ex.true_len; ++i) {
        ex.ids[static_cast<std::size_t>(i)] = vocab.lookup(tokens[static_cast<std::size_t>(i)]);
        ex.mask[static_cast<std::size_t>(i)] = 1;
    }
    return ex;
}

std::vector<RawExample> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::vector<RawExample> examples;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError("dataset parse error at line " + std::to_string(line_no) + ": missing tab");
        }
        const std::string label_str = line.substr(0, tab);
        std::string text = line.substr(tab + 1);
        if (label_str != "0" && label_str != "1") {
            throw ValueError("dataset label out of {0,1} at line " + std::to_string(line_no) + ": " + label_str);
        }
        // trim surrounding ASCII whitespace
        const auto first = text.find_first_not_of(" \t");
        const auto last = text.find_last_not_of(" \t");
        text = (first == std::string::npos) ? "" : text.substr(first, last - first + 1);
        if (text.empty()) throw ParseError("dataset empty text at line " + std::to_string(line_no));
        examples.push_back({label_str == "1" ? 1 : 0, std::move(text)});
    }
    return examples;
}

std::pair<std::vector<RawExample>, std::vector<RawExample>> split(const std::vector<RawExample>& examples,
                                                                  double train_ratio,
                                                                  std::uint64_t seed) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
        throw ValueError("split: train_ratio must be in (0,1), got " + std::to_string(train_ratio));
    }
    if (examples.size() < 2) throw ContractError("split: need at least 2 examples");

    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(examples.size()) * train_ratio));
    std::vector<RawExample> train, test;
    train.reserve(n_train);
    test.reserve(examples.size() - n_train);
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? train : test).push_back(examples[order[i]]);
    }
    return {std::move(train), std::move(test)};
}

std::vector<std::vector<std::size_t>> batches(std::size_t n_examples, int batch_size, bool shuffle,
                                              std::uint64_t seed) {
    if (batch_size < 1) throw ValueError("batches: batch_size must be >= 1");
    std::vector<std::size_t> order(n_examples);
    for (std::size_t i = 0; i < n_examples; ++i) order[i] = i;
    if (shuffle) {
        Rng rng(seed);
        rng.shuffle(order);
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t start = 0; start < n_examples; start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(n_examples, start + static_cast<std::size_t>(batch_size));
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

}  // namespace ragat
