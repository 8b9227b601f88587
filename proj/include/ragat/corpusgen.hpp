#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ragat {

// Keyword pools for the synthetic rumor corpus. The two class pools are
// disjoint; filler words are shared between classes.
const std::vector<std::string>& rumor_keywords();
const std::vector<std::string>& nonrumor_keywords();
const std::vector<std::string>& filler_words();

// Writes a separable synthetic dataset in the dataset file format:
// 2 * n_per_class lines, alternating labels, fully determined by the seed.
void generate_corpus(const std::string& out_path, int n_per_class, std::uint64_t seed);

}  // namespace ragat
