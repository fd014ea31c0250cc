#ifndef WRISTMATCH_METAREC_HPP
#define WRISTMATCH_METAREC_HPP

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wristmatch/errors.hpp"
#include "wristmatch/gallery.hpp"
#include "wristmatch/weibull.hpp"

namespace wristmatch {

inline constexpr double kMetaTailFraction = 0.5;

/// Outcome of one meta-recognition pass. cdf_values holds one entry per
/// input table; systems whose tail fit degenerated carry -1 and never win
/// the argmax. The returned table is a verbatim copy of the winner.
struct MetaDecision {
    int chosen = 0;
    std::vector<double> cdf_values;
    ScoreTable table;
};

/// Rank-1 statistical meta-recognition: per system, fit a Weibull to the
/// l_t - 1 largest scores below the top one (l_t = floor(tail * m)), then
/// pick the system whose top score is most extreme under its own tail
/// model. Ties and the all-degenerate fallback resolve to the earliest
/// system in the input order.
inline MetaDecision meta_select(const std::vector<ScoreTable>& tables,
                                double tail_fraction = kMetaTailFraction) {
    if (tables.empty()) throw UsageError("meta_select: no score tables");
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw UsageError("meta_select: tail fraction must be in (0, 1]");
    const std::size_t m = tables.front().scores.size();
    if (m < 6)
        throw UsageError("meta_select: need at least 6 gallery wrists");
    for (const auto& t : tables)
        if (t.scores.size() != m || t.order.size() != m ||
            t.wrist_ids.size() != m)
            throw UsageError("meta_select: tables disagree on gallery size");

    const auto lt = static_cast<std::size_t>(
        std::floor(tail_fraction * static_cast<double>(m)));

    MetaDecision decision;
    decision.cdf_values.assign(tables.size(), -1.0);
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (lt < 3) continue; // not enough tail below the top score
        const auto& t = tables[i];
        std::vector<double> tail;
        tail.reserve(lt - 1);
        for (std::size_t j = 1; j < lt; ++j)
            tail.push_back(
                t.scores[static_cast<std::size_t>(t.order[j])]);
        if (tail.front() == tail.back()) continue; // flat tail, no fit
        try {
            const auto fit = weibull_fit_shifted(tail);
            const double top = t.scores[static_cast<std::size_t>(t.order[0])];
            decision.cdf_values[i] = weibull_cdf(top, fit);
        } catch (const NumericError&) {
            // degenerate fit: leave the system out of the argmax
        }
    }

    int best = 0;
    for (std::size_t i = 1; i < tables.size(); ++i)
        if (decision.cdf_values[i] >
            decision.cdf_values[static_cast<std::size_t>(best)])
            best = static_cast<int>(i);
    decision.chosen = best;
    decision.table = tables[static_cast<std::size_t>(best)];
    return decision;
}

/// One JSON line per probe: id, chosen system name, per-system CDF values
/// (-1 where the fit degenerated), and the top ten wrists with scores.
inline void write_meta_decision(std::ostream& os, const std::string& probe_id,
                                const std::vector<std::string>& system_names,
                                const MetaDecision& d) {
    if (system_names.size() != d.cdf_values.size())
        throw UsageError("write_meta_decision: system name count mismatch");
    nlohmann::json rec;
    rec["probe"] = probe_id;
    rec["chosen"] = system_names[static_cast<std::size_t>(d.chosen)];
    rec["cdf"] = d.cdf_values;
    auto& top = rec["top"];
    top = nlohmann::json::array();
    const std::size_t m = d.table.order.size();
    for (std::size_t j = 0; j < m && j < 10; ++j) {
        const auto at = static_cast<std::size_t>(d.table.order[j]);
        top.push_back({{"rank", j + 1},
                       {"score", d.table.scores[at]},
                       {"wrist", d.table.wrist_ids[at]}});
    }
    os << rec.dump() << '\n';
}

} // namespace wristmatch

#endif
