#include "akisub/features/vocabulary.hpp"

#include <algorithm>
#include <map>

#include "akisub/error.hpp"

namespace akisub::features {

Vocabulary::Vocabulary(const std::vector<std::string>& words) : words_{"<pad>", "<null>"} {
    for (const auto& w : words) {
        if (w.empty() || w.front() == '<') throw ArgumentError("invalid vocabulary word '" + w + "'");
        if (lookup_.count(w)) throw ArgumentError("duplicate vocabulary word '" + w + "'");
        lookup_.emplace(w, static_cast<int>(words_.size()));
        words_.push_back(w);
    }
}

std::optional<int> Vocabulary::index(const std::string& word) const {
    auto it = lookup_.find(word);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocabulary::word(std::size_t i) const {
    if (i >= words_.size()) throw ArgumentError("vocabulary index out of range");
    return words_[i];
}

Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& documents, std::size_t min_count) {
    std::map<std::string, std::size_t> counts;
    for (const auto& doc : documents)
        for (const auto& w : doc)
            if (!w.empty() && w.front() != '<') ++counts[w];
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& [w, c] : counts)
        if (c >= std::max<std::size_t>(min_count, 1)) kept.emplace_back(w, c);
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> words;
    words.reserve(kept.size());
    for (auto& [w, c] : kept) words.push_back(std::move(w));
    return Vocabulary(words);
}

}  // namespace akisub::features
