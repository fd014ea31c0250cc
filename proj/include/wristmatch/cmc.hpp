#ifndef WRISTMATCH_CMC_HPP
#define WRISTMATCH_CMC_HPP

#include <string>
#include <vector>

#include "wristmatch/errors.hpp"
#include "wristmatch/gallery.hpp"

namespace wristmatch {

/// Cumulative match characteristic: values[r - 1] is the fraction of probes
/// whose true wrist id appears within the top r ranks. Nondecreasing by
/// construction and 1 at the last rank whenever every truth id is ranked.
struct CmcCurve {
    std::vector<double> values;

    double at(int rank) const {
        if (rank < 1 || rank > static_cast<int>(values.size()))
            throw UsageError("cmc: rank out of range: " + std::to_string(rank));
        return values[static_cast<std::size_t>(rank) - 1];
    }
    double rank1() const { return at(1); }
    int max_rank() const { return static_cast<int>(values.size()); }
};

/// Build the curve from one ranking per probe and the matching truth ids.
/// Every table must rank the same number of gallery wrists.
inline CmcCurve cmc(const std::vector<ScoreTable>& rankings,
                    const std::vector<std::string>& truths) {
    if (rankings.empty()) throw UsageError("cmc: no probes");
    if (rankings.size() != truths.size())
        throw UsageError("cmc: ranking/truth count mismatch");
    const std::size_t m = rankings.front().order.size();
    if (m == 0) throw UsageError("cmc: empty ranking");

    std::vector<std::size_t> hits(m, 0);
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        const ScoreTable& t = rankings[i];
        if (t.order.size() != m)
            throw UsageError("cmc: probe rankings cover different gallery sizes");
        int rank = -1;
        for (std::size_t r = 0; r < m; ++r)
            if (t.wrist_ids[static_cast<std::size_t>(t.order[r])] ==
                truths[i]) {
                rank = static_cast<int>(r) + 1;
                break;
            }
        if (rank < 0)
            throw DataError("cmc: truth id not ranked: " + truths[i]);
        hits[static_cast<std::size_t>(rank) - 1] += 1;
    }

    CmcCurve curve;
    curve.values.resize(m);
    std::size_t cum = 0;
    for (std::size_t r = 0; r < m; ++r) {
        cum += hits[r];
        curve.values[r] =
            static_cast<double>(cum) / static_cast<double>(rankings.size());
    }
    return curve;
}

} // namespace wristmatch

#endif
