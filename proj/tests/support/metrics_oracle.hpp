#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rnntc::testing {

// Recounts everything straight from the (truth, pred) pairs, no confusion
// matrix involved.
struct OracleClass {
    std::uint64_t tp = 0, fp = 0, fn = 0, support = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct OracleReport {
    std::vector<OracleClass> per_class;
    double accuracy = 0.0;
    double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
    double weighted_p = 0.0, weighted_r = 0.0, weighted_f1 = 0.0;
};

inline OracleReport brute_force_metrics(const std::vector<std::size_t>& truths, const std::vector<std::size_t>& preds,
                                        std::size_t k) {
    OracleReport r;
    r.per_class.resize(k);
    std::uint64_t correct = 0;
    for (std::size_t c = 0; c < k; ++c) {
        auto& m = r.per_class[c];
        for (std::size_t n = 0; n < truths.size(); ++n) {
            const bool t = truths[n] == c, p = preds[n] == c;
            m.tp += t && p;
            m.fp += !t && p;
            m.fn += t && !p;
            m.support += t;
        }
        m.precision = m.tp + m.fp == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
        m.recall = m.tp + m.fn == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
        m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    for (std::size_t n = 0; n < truths.size(); ++n) {
        correct += truths[n] == preds[n];
    }
    r.accuracy = truths.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truths.size());
    double total = 0.0;
    for (const auto& m : r.per_class) {
        r.macro_p += m.precision / static_cast<double>(k);
        r.macro_r += m.recall / static_cast<double>(k);
        r.macro_f1 += m.f1 / static_cast<double>(k);
        const auto w = static_cast<double>(m.support);
        r.weighted_p += w * m.precision;
        r.weighted_r += w * m.recall;
        r.weighted_f1 += w * m.f1;
        total += w;
    }
    if (total > 0.0) {
        r.weighted_p /= total;
        r.weighted_r /= total;
        r.weighted_f1 /= total;
    }
    return r;
}

}  // namespace rnntc::testing
