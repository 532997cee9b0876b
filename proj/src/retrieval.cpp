#include "graphwords/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "graphwords/random.hpp"

namespace graphwords {

namespace {

// FNV-1a; std::hash is implementation-defined and the split must be
// reproducible everywhere.
std::uint64_t label_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

RankedList rank(const SignatureEntry& query, const std::vector<SignatureEntry>& corpus,
                SignatureMetric metric) {
    if (corpus.empty()) throw std::invalid_argument("rank: empty corpus");

    RankedList out;
    out.query_id = query.image_id;
    out.entries.reserve(corpus.size());
    for (const auto& entry : corpus) {
        out.entries.emplace_back(entry.image_id, signature_distance(query.vec, entry.vec, metric));
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    return out;
}

double average_precision(const std::vector<int>& relevance_flags) {
    std::size_t total_relevant = 0;
    for (const int f : relevance_flags) {
        if (f != 0) ++total_relevant;
    }
    if (total_relevant == 0) return 0.0;

    double ap = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < relevance_flags.size(); ++r) {
        if (relevance_flags[r] != 0) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return ap / static_cast<double>(total_relevant);
}

EvalReport evaluate(const std::vector<SignatureEntry>& test,
                    const std::vector<SignatureEntry>& train, const EvalConfig& config) {
    if (train.empty()) throw std::invalid_argument("evaluate: empty training corpus");

    std::map<std::string, std::string> train_label_by_id;
    std::map<std::string, std::size_t> train_count_by_label;
    for (const auto& t : train) {
        train_label_by_id[t.image_id] = t.object_label;
        ++train_count_by_label[t.object_label];
    }

    EvalReport report;
    report.config = config;

    std::map<std::string, std::pair<double, std::size_t>> ap_accum;  // label -> (sum, count)
    for (const auto& query : test) {
        if (train_count_by_label.find(query.object_label) == train_count_by_label.end()) {
            continue;  // handled below as an undefined object
        }
        const RankedList ranked = rank(query, train, config.metric);
        std::vector<int> flags;
        flags.reserve(ranked.entries.size());
        for (const auto& [id, dist] : ranked.entries) {
            flags.push_back(train_label_by_id[id] == query.object_label ? 1 : 0);
        }
        auto& [sum, count] = ap_accum[query.object_label];
        sum += average_precision(flags);
        ++count;
    }

    // Objects present in test but absent from train stay out of the mean.
    std::map<std::string, bool> seen_test_labels;
    for (const auto& q : test) seen_test_labels[q.object_label] = true;
    for (const auto& [label, _] : seen_test_labels) {
        if (train_count_by_label.find(label) == train_count_by_label.end()) {
            report.warnings.push_back("test object '" + label +
                                      "' has no training images; excluded from the mean");
        }
    }

    double total = 0.0;
    for (const auto& [label, acc] : ap_accum) {
        const double map = acc.first / static_cast<double>(acc.second);
        report.per_object_map[label] = map;
        total += map;
    }
    report.overall_mean =
        ap_accum.empty() ? 0.0 : total / static_cast<double>(ap_accum.size());
    return report;
}

SplitResult split_dataset(const std::vector<ImageRecord>& records, double fraction,
                          std::uint64_t rng_seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("split_dataset: fraction must be in (0, 1)");
    }

    // Group record indices by object, keeping ids sorted so the shuffle sees
    // a canonical order regardless of input order.
    std::map<std::string, std::vector<std::size_t>> by_object;
    for (std::size_t i = 0; i < records.size(); ++i) {
        by_object[records[i].object_label].push_back(i);
    }

    SplitResult result;
    for (auto& [label, indices] : by_object) {
        std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
            return records[a].image_id < records[b].image_id;
        });
        std::mt19937_64 rng(derive_seed(rng_seed, label_hash(label)));
        deterministic_shuffle(indices, rng);

        const std::size_t n = indices.size();
        std::size_t n_train = static_cast<std::size_t>(
            std::ceil(fraction * static_cast<double>(n)));
        n_train = std::max<std::size_t>(1, std::min(n_train, n));
        if (n == 1) {
            result.warnings.push_back("object '" + label +
                                      "' has a single image; assigned to train");
        }
        for (std::size_t k = 0; k < n; ++k) {
            ImageRecord rec = records[indices[k]];
            rec.split = k < n_train ? Split::train : Split::test;
            (k < n_train ? result.train : result.test).push_back(std::move(rec));
        }
    }
    return result;
}

}  // namespace graphwords
