#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace osmeval {

/// Canonical form for open-vocabulary labels: lowercase, underscores and
/// hyphens become spaces, whitespace collapsed and trimmed. Idempotent.
std::string normalize_label(std::string_view raw);

/// Ground-truth class list. Index = class id = line number in the
/// vocabulary file.
struct ClassVocabulary {
    std::vector<std::string> names;
    std::vector<std::string> normalized;
    std::unordered_map<std::string, int> index;  // normalized name -> class id

    int size() const { return static_cast<int>(names.size()); }
    std::optional<int> find_normalized(const std::string& normalized_name) const;
};

ClassVocabulary make_vocabulary(std::vector<std::string> names);

/// Plain text file, one class name per line, line number = class index.
ClassVocabulary load_vocabulary(const std::filesystem::path& path);

/// text -> vector interface; implementations must tolerate concurrent calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<float> embed(const std::string& text) = 0;
};

/// Deterministic stand-in for a real embedding model: unit vectors seeded by
/// a hash of the text. Identical texts get identical vectors across runs.
class HashedEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HashedEmbeddingProvider(int dimensions = 16, std::uint64_t salt = 0);
    std::vector<float> embed(const std::string& text) override;

private:
    int dimensions_;
    std::uint64_t salt_;
};

enum class MatchMode { Exact, Embedding };

/// Matches open-vocabulary predicted labels against the GT vocabulary.
/// Immutable after construction; safe to share across workers.
class LabelMatcher {
public:
    LabelMatcher();  // Exact mode
    LabelMatcher(std::shared_ptr<EmbeddingProvider> provider, double similarity_threshold = 0.7);

    MatchMode mode() const { return mode_; }
    double similarity_threshold() const { return similarity_threshold_; }

    /// Exact mode: index iff normalize(pred) is in the vocabulary.
    /// Embedding mode: cosine argmax over vocabulary embeddings, none when
    /// the best similarity is below the threshold; ties break to the lowest
    /// class index.
    std::optional<int> match(const std::string& pred, const ClassVocabulary& vocab) const;

private:
    std::vector<float> embed_cached(const std::string& text) const;

    MatchMode mode_ = MatchMode::Exact;
    std::shared_ptr<EmbeddingProvider> provider_;
    double similarity_threshold_ = 0.7;
    mutable std::mutex cache_mutex_;
    mutable std::unordered_map<std::string, std::vector<float>> embedding_cache_;
};

std::optional<int> match_label(const std::string& pred, const ClassVocabulary& vocab,
                               const LabelMatcher& matcher);

}  // namespace osmeval
