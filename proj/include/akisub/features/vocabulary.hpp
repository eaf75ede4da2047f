#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace akisub::features {

/// Word index. Index 0 is padding and index 1 the null note used for stays
/// without notes; dictionary words follow in insertion order.
class Vocabulary {
   public:
    static constexpr int kPad = 0;
    static constexpr int kNull = 1;

    Vocabulary() : Vocabulary(std::vector<std::string>{}) {}
    explicit Vocabulary(const std::vector<std::string>& words);

    std::size_t size() const { return words_.size(); }
    std::optional<int> index(const std::string& word) const;
    const std::string& word(std::size_t i) const;
    const std::vector<std::string>& words() const { return words_; }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

   private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, int> lookup_;
};

/// Words occurring at least `min_count` times across `documents`, most
/// frequent first, ties in lexicographic order.
Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& documents, std::size_t min_count = 1);

}  // namespace akisub::features
