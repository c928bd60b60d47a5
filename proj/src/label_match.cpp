#include "osmeval/label_match.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "osmeval/errors.hpp"
#include "osmeval/text.hpp"

namespace osmeval {

std::string normalize_label(std::string_view raw) {
    std::string s = to_lower(raw);
    for (char& c : s) {
        if (c == '_' || c == '-') c = ' ';
    }
    return collapse_whitespace(s);
}

std::optional<int> ClassVocabulary::find_normalized(const std::string& normalized_name) const {
    auto it = index.find(normalized_name);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

ClassVocabulary make_vocabulary(std::vector<std::string> names) {
    if (names.empty()) throw SchemaError("vocabulary must contain at least one class");
    ClassVocabulary vocab;
    vocab.names = std::move(names);
    vocab.normalized.reserve(vocab.names.size());
    for (std::size_t i = 0; i < vocab.names.size(); ++i) {
        std::string norm = normalize_label(vocab.names[i]);
        if (norm.empty()) {
            throw SchemaError("vocabulary class " + std::to_string(i) +
                              " normalizes to an empty name");
        }
        auto [it, inserted] = vocab.index.emplace(norm, static_cast<int>(i));
        if (!inserted) {
            throw SchemaError("vocabulary classes " + std::to_string(it->second) + " and " +
                              std::to_string(i) + " collide after normalization ('" + norm +
                              "')");
        }
        vocab.normalized.push_back(std::move(norm));
    }
    return vocab;
}

ClassVocabulary load_vocabulary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocabulary: " + path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        names.push_back(line);
    }
    // A single trailing blank line is a newline artifact, not a class.
    while (!names.empty() && names.back().empty()) names.pop_back();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty()) {
            throw SchemaError(path.string() + ": empty class name at line " +
                              std::to_string(i + 1));
        }
    }
    if (names.empty()) throw SchemaError(path.string() + ": vocabulary is empty");
    return make_vocabulary(std::move(names));
}

namespace {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size() || a.empty()) return 0.0;
    if (a == b) return 1.0;  // keep exact 1.0 reachable despite rounding
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(sim, -1.0, 1.0);
}

}  // namespace

HashedEmbeddingProvider::HashedEmbeddingProvider(int dimensions, std::uint64_t salt)
    : dimensions_(dimensions), salt_(salt) {
    if (dimensions <= 0) throw ContractViolation("embedding dimension must be positive");
}

std::vector<float> HashedEmbeddingProvider::embed(const std::string& text) {
    std::uint64_t state = fnv1a64(text, salt_);
    std::vector<float> v(static_cast<std::size_t>(dimensions_));
    double norm_sq = 0.0;
    for (auto& x : v) {
        // Uniform in [-1, 1); platform-independent, unlike <random> dists.
        const double u =
            static_cast<double>(splitmix64(state) >> 11) / static_cast<double>(1ull << 53);
        x = static_cast<float>(2.0 * u - 1.0);
        norm_sq += static_cast<double>(x) * x;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > 0.0) {
        for (auto& x : v) x = static_cast<float>(x / norm);
    } else {
        v[0] = 1.0f;
    }
    return v;
}

LabelMatcher::LabelMatcher() = default;

LabelMatcher::LabelMatcher(std::shared_ptr<EmbeddingProvider> provider,
                           double similarity_threshold)
    : mode_(MatchMode::Embedding),
      provider_(std::move(provider)),
      similarity_threshold_(similarity_threshold) {
    if (!provider_) throw ContractViolation("embedding matcher requires a provider");
    if (similarity_threshold_ < 0.0 || similarity_threshold_ > 1.0) {
        throw ContractViolation("similarity threshold must be in [0, 1]");
    }
}

std::vector<float> LabelMatcher::embed_cached(const std::string& text) const {
    {
        std::lock_guard lock(cache_mutex_);
        auto it = embedding_cache_.find(text);
        if (it != embedding_cache_.end()) return it->second;
    }
    std::vector<float> v = provider_->embed(text);
    std::lock_guard lock(cache_mutex_);
    return embedding_cache_.emplace(text, std::move(v)).first->second;
}

std::optional<int> LabelMatcher::match(const std::string& pred,
                                       const ClassVocabulary& vocab) const {
    if (vocab.size() == 0) throw ContractViolation("vocabulary is empty");
    const std::string norm = normalize_label(pred);
    if (mode_ == MatchMode::Exact) {
        return vocab.find_normalized(norm);
    }
    const std::vector<float> query = embed_cached(norm);
    double best = -2.0;
    int best_index = -1;
    for (int c = 0; c < vocab.size(); ++c) {
        const double sim = cosine_similarity(query, embed_cached(vocab.normalized[c]));
        if (sim > best) {
            best = sim;
            best_index = c;
        }
    }
    if (best_index < 0 || best < similarity_threshold_) return std::nullopt;
    return best_index;
}

std::optional<int> match_label(const std::string& pred, const ClassVocabulary& vocab,
                               const LabelMatcher& matcher) {
    return matcher.match(pred, vocab);
}

}  // namespace osmeval
