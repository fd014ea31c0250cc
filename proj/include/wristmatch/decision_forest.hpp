#ifndef WRISTMATCH_DECISION_FOREST_HPP
#define WRISTMATCH_DECISION_FOREST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "wristmatch/binio.hpp"
#include "wristmatch/errors.hpp"
#include "wristmatch/matrix.hpp"
#include "wristmatch/parallel.hpp"
#include "wristmatch/rng.hpp"

namespace wristmatch {

/// Binary decision tree node. feature < 0 marks a leaf carrying `label`.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t label = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    std::uint8_t predict(const double* x) const {
        int i = 0;
        while (nodes[i].feature >= 0)
            i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left
                                                         : nodes[i].right;
        return nodes[i].label;
    }
};

struct ForestParams {
    int tree_count = 300;
    int min_leaf = 5;
    std::uint64_t seed = 1;
    int jobs = 1;
};

/// Bagged ensemble of Gini-split decision trees for binary superpixel labels.
/// Grown to purity subject to a minimum leaf size of 5, with round(sqrt(d))
/// candidate features per split and bootstrap samples the size of the
/// training set (drawn with replacement). Per-tree RNG streams are keyed by
/// (seed, tree index), so the ensemble is bit-reproducible for a fixed seed
/// regardless of training thread count.
struct SkinClassifier {
    std::vector<DecisionTree> trees;
    std::uint32_t feature_dim = 0;
    double oob_accuracy = 0.0;

    /// Majority vote; exact ties resolve to non-skin.
    std::uint8_t predict(const double* x) const {
        int skin = 0;
        for (const auto& t : trees) skin += t.predict(x);
        return skin * 2 > static_cast<int>(trees.size()) ? 1 : 0;
    }
};

namespace detail {

struct TreeBuilder {
    const Matrix& x;
    const std::vector<std::uint8_t>& y;
    int min_leaf;
    int features_per_split;
    Rng& rng;
    std::vector<TreeNode> nodes;
    // Workspace reused across nodes.
    std::vector<std::pair<double, std::uint8_t>> sorted;
    std::vector<int> feature_pool;

    int build(std::vector<std::uint32_t>& idx, int begin, int end) {
        const int size = end - begin;
        int positives = 0;
        for (int i = begin; i < end; ++i) positives += y[idx[i]];

        const int me = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (positives == 0 || positives == size || size < 2 * min_leaf) {
            nodes[me].label = positives * 2 > size ? 1 : 0;
            return me;
        }

        // Sample feature candidates without replacement (partial shuffle).
        const int d = static_cast<int>(x.cols);
        feature_pool.resize(d);
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
        for (int s = 0; s < features_per_split; ++s) {
            const int j =
                s + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - s)));
            std::swap(feature_pool[s], feature_pool[j]);
        }

        double best_score = -1.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        for (int s = 0; s < features_per_split; ++s) {
            const int f = feature_pool[s];
            sorted.resize(size);
            for (int i = 0; i < size; ++i)
                sorted[i] = {x.at(idx[begin + i], f), y[idx[begin + i]]};
            std::sort(sorted.begin(), sorted.end());
            int left_pos = 0;
            for (int i = 0; i < size - 1; ++i) {
                left_pos += sorted[i].second;
                const int nl = i + 1;
                const int nr = size - nl;
                if (nl < min_leaf || nr < min_leaf) continue;
                if (sorted[i].first == sorted[i + 1].first) continue;
                const double pl = static_cast<double>(left_pos);
                const double pr = static_cast<double>(positives - left_pos);
                // Weighted Gini decrease, up to constants: maximize
                // sum over children of (pos^2 + neg^2) / child_size.
                const double score = (pl * pl + (nl - pl) * (nl - pl)) / nl +
                                     (pr * pr + (nr - pr) * (nr - pr)) / nr;
                if (score > best_score) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
                }
            }
        }
        if (best_feature < 0) {
            nodes[me].label = positives * 2 > size ? 1 : 0;
            return me;
        }

        // Stable partition keeps index order deterministic inside children.
        std::stable_partition(idx.begin() + begin, idx.begin() + end,
                              [&](std::uint32_t i) {
                                  return x.at(i, best_feature) < best_threshold;
                              });
        int mid = begin;
        while (mid < end && x.at(idx[mid], best_feature) < best_threshold) ++mid;

        nodes[me].feature = best_feature;
        nodes[me].threshold = best_threshold;
        const int l = build(idx, begin, mid);
        const int r = build(idx, mid, end);
        nodes[me].left = l;
        nodes[me].right = r;
        return me;
    }
};

} // namespace detail

/// Train the bagged skin/non-skin ensemble. Requires both classes present.
/// OOB accuracy is the majority-vote accuracy over samples left out of each
/// bootstrap (samples that were in-bag for every tree are skipped).
inline SkinClassifier train_skin_classifier(const Matrix& x,
                                            const std::vector<std::uint8_t>& y,
                                            const ForestParams& params = {}) {
    const std::size_t n = x.rows;
    if (n == 0 || x.cols == 0) throw UsageError("forest: empty training set");
    if (y.size() != n) throw UsageError("forest: label count mismatch");
    if (params.tree_count < 1) throw UsageError("forest: need at least one tree");
    const int positives =
        static_cast<int>(std::count(y.begin(), y.end(), std::uint8_t{1}));
    if (positives == 0 || positives == static_cast<int>(n))
        throw UsageError(
            "forest: training labels contain a single class; need both skin "
            "and non-skin examples");

    SkinClassifier model;
    model.feature_dim = static_cast<std::uint32_t>(x.cols);
    model.trees.resize(params.tree_count);
    const int features_per_split = std::max(
        1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(x.cols)))));

    // oob_votes[t * n + i] in {0: in-bag, 1: voted 0, 2: voted 1}.
    std::vector<std::uint8_t> oob_votes(
        static_cast<std::size_t>(params.tree_count) * n, 0);

    parallel_for(params.tree_count, params.jobs, [&](std::size_t t) {
        Rng rng = Rng::keyed(params.seed, t);
        std::vector<std::uint8_t> in_bag(n, 0);
        std::vector<std::uint32_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t pick = static_cast<std::uint32_t>(rng.below(n));
            idx[i] = pick;
            in_bag[pick] = 1;
        }
        detail::TreeBuilder builder{x, y, params.min_leaf, features_per_split,
                                    rng};
        builder.build(idx, 0, static_cast<int>(n));
        model.trees[t].nodes = std::move(builder.nodes);
        for (std::size_t i = 0; i < n; ++i)
            if (!in_bag[i])
                oob_votes[t * n + i] =
                    static_cast<std::uint8_t>(1 + model.trees[t].predict(x.row(i)));
    });

    std::size_t considered = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int votes0 = 0, votes1 = 0;
        for (int t = 0; t < params.tree_count; ++t) {
            const std::uint8_t v = oob_votes[static_cast<std::size_t>(t) * n + i];
            if (v == 1) ++votes0;
            else if (v == 2) ++votes1;
        }
        if (votes0 + votes1 == 0) continue;
        ++considered;
        const std::uint8_t pred = votes1 > votes0 ? 1 : 0;
        if (pred == y[i]) ++correct;
    }
    model.oob_accuracy =
        considered ? static_cast<double>(correct) / considered : 0.0;
    return model;
}

/// Versioned forest container: magic, version, feature dim, OOB accuracy,
/// tree count, then per-tree node arrays. Doubles round-trip bit-exactly.
inline void save_skin_classifier(const SkinClassifier& model,
                                 const std::string& path) {
    auto os = binio::open_out(path);
    binio::write_magic(os, "WMSKIN\x01\x00");
    binio::write_u32(os, 1); // format version
    binio::write_u32(os, model.feature_dim);
    binio::write_f64(os, model.oob_accuracy);
    binio::write_u32(os, static_cast<std::uint32_t>(model.trees.size()));
    for (const auto& tree : model.trees) {
        binio::write_u32(os, static_cast<std::uint32_t>(tree.nodes.size()));
        for (const auto& nd : tree.nodes) {
            binio::write_pod<std::int32_t>(os, nd.feature);
            binio::write_f64(os, nd.threshold);
            binio::write_pod<std::int32_t>(os, nd.left);
            binio::write_pod<std::int32_t>(os, nd.right);
            binio::write_pod<std::uint8_t>(os, nd.label);
        }
    }
}

inline SkinClassifier load_skin_classifier(const std::string& path) {
    auto is = binio::open_in(path);
    binio::expect_magic(is, "WMSKIN\x01\x00", "skin classifier");
    const std::uint32_t version = binio::read_u32(is);
    if (version != 1)
        throw DataError("skin classifier: unsupported format version " +
                        std::to_string(version));
    SkinClassifier model;
    model.feature_dim = binio::read_u32(is);
    model.oob_accuracy = binio::read_f64(is);
    const std::uint32_t tree_count = binio::read_u32(is);
    model.trees.resize(tree_count);
    for (auto& tree : model.trees) {
        const std::uint32_t node_count = binio::read_u32(is);
        tree.nodes.resize(node_count);
        for (auto& nd : tree.nodes) {
            nd.feature = binio::read_pod<std::int32_t>(is);
            nd.threshold = binio::read_f64(is);
            nd.left = binio::read_pod<std::int32_t>(is);
            nd.right = binio::read_pod<std::int32_t>(is);
            nd.label = binio::read_pod<std::uint8_t>(is);
        }
    }
    return model;
}

} // namespace wristmatch

#endif
