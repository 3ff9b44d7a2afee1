#include "rnntc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "rnntc/csv.hpp"
#include "rnntc/errors.hpp"

namespace rnntc {

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < k_; ++j) {
        s += at(truth, j);
    }
    return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t pred) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) {
        s += at(i, pred);
    }
    return s;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < k_; ++i) {
        s += at(i, i);
    }
    return s;
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t s = 0;
    for (const auto c : counts_) {
        s += c;
    }
    return s;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> truths, std::span<const std::size_t> preds,
                                 std::size_t n_classes) {
    if (truths.size() != preds.size()) {
        throw std::invalid_argument("confusion_matrix: truth and prediction counts differ");
    }
    ConfusionMatrix cm(n_classes);
    for (std::size_t n = 0; n < truths.size(); ++n) {
        if (truths[n] >= n_classes || preds[n] >= n_classes) {
            throw std::out_of_range("confusion_matrix: class index out of range at position " + std::to_string(n));
        }
        ++cm.at(truths[n], preds[n]);
    }
    return cm;
}

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& cm) {
    std::vector<ClassMetrics> out(cm.n_classes());
    for (std::size_t k = 0; k < cm.n_classes(); ++k) {
        auto& m = out[k];
        const auto tp = static_cast<double>(cm.at(k, k));
        const std::uint64_t predicted = cm.col_sum(k);
        const std::uint64_t actual = cm.row_sum(k);
        m.precision_undefined = predicted == 0;
        m.recall_undefined = actual == 0;
        m.precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
        m.recall = actual == 0 ? 0.0 : tp / static_cast<double>(actual);
        m.f1 = f1_score(m.precision, m.recall);
        m.support = actual;
    }
    return out;
}

Aggregate aggregate(std::span<const ClassMetrics> per_class) {
    if (per_class.empty()) {
        throw std::invalid_argument("aggregate: empty report");
    }
    Aggregate a;
    for (const auto& m : per_class) {
        a.macro.precision += m.precision;
        a.macro.recall += m.recall;
        a.macro.f1 += m.f1;
        a.macro.support += m.support;
        const auto w = static_cast<double>(m.support);
        a.weighted.precision += w * m.precision;
        a.weighted.recall += w * m.recall;
        a.weighted.f1 += w * m.f1;
    }
    if (a.macro.support == 0) {
        throw std::invalid_argument("aggregate: total support is zero");
    }
    const auto k = static_cast<double>(per_class.size());
    a.macro.precision /= k;
    a.macro.recall /= k;
    a.macro.f1 /= k;
    const auto total = static_cast<double>(a.macro.support);
    a.weighted.precision /= total;
    a.weighted.recall /= total;
    a.weighted.f1 /= total;
    a.weighted.support = a.macro.support;
    return a;
}

EvalReport make_report(std::vector<std::string> class_names, std::vector<ClassMetrics> per_class, double accuracy) {
    if (class_names.size() != per_class.size()) {
        throw std::invalid_argument("make_report: class name and metric counts differ");
    }
    const Aggregate a = aggregate(per_class);
    EvalReport r;
    r.class_names = std::move(class_names);
    r.per_class = std::move(per_class);
    r.accuracy = accuracy;
    r.macro_avg = a.macro;
    r.weighted_avg = a.weighted;
    r.total_support = a.macro.support;
    return r;
}

EvalReport make_report(const ConfusionMatrix& cm, std::vector<std::string> class_names) {
    if (class_names.size() != cm.n_classes()) {
        throw std::invalid_argument("make_report: class name count differs from confusion matrix size");
    }
    if (cm.total() == 0) {
        throw InputError("make_report: nothing was evaluated");
    }
    const double accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
    EvalReport r = make_report(std::move(class_names), class_metrics(cm), accuracy);
    r.confusion = cm;
    return r;
}

std::string format_2dp(double value) {
    // The 1e-9 nudge makes decimal ties such as 0.695 (stored as
    // 0.69499999...) round up as they read.
    const double scaled = std::abs(value) * 100.0;
    const double rounded = std::floor(scaled + 0.5 + 1e-9);
    const auto cents = static_cast<long long>(rounded);
    return fmt::format("{}{}.{:02d}", value < 0 && cents != 0 ? "-" : "", cents / 100, cents % 100);
}

std::string render_report(const EvalReport& report) {
    std::size_t width = std::string_view("weighted avg").size();
    for (const auto& n : report.class_names) {
        width = std::max(width, n.size());
    }
    std::string out = fmt::format("{:>{}} {:>9} {:>9} {:>9} {:>9}\n\n", "", width, "precision", "recall",
                                  "f1-score", "support");
    for (std::size_t k = 0; k < report.per_class.size(); ++k) {
        const auto& m = report.per_class[k];
        out += fmt::format("{:>{}} {:>9} {:>9} {:>9} {:>9}\n", report.class_names[k], width, format_2dp(m.precision),
                           format_2dp(m.recall), format_2dp(m.f1), m.support);
    }
    out += '\n';
    out += fmt::format("{:>{}} {:>9} {:>9} {:>9} {:>9}\n", "accuracy", width, "", "", format_2dp(report.accuracy),
                       report.total_support);
    auto avg_row = [&](std::string_view label, const AverageMetrics& a) {
        out += fmt::format("{:>{}} {:>9} {:>9} {:>9} {:>9}\n", label, width, format_2dp(a.precision),
                           format_2dp(a.recall), format_2dp(a.f1), a.support);
    };
    avg_row("macro avg", report.macro_avg);
    avg_row("weighted avg", report.weighted_avg);
    return out;
}

namespace {

nlohmann::json averages_json(const AverageMetrics& a) {
    return {{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}, {"support", a.support}};
}

AverageMetrics averages_from(const nlohmann::json& j) {
    return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>(),
            j.at("support").get<std::uint64_t>()};
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t k = 0; k < report.per_class.size(); ++k) {
        const auto& m = report.per_class[k];
        classes.push_back({{"name", report.class_names[k]},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1},
                           {"support", m.support},
                           {"precision_undefined", m.precision_undefined},
                           {"recall_undefined", m.recall_undefined}});
    }
    nlohmann::json j = {{"classes", classes},
                        {"accuracy", report.accuracy},
                        {"macro_avg", averages_json(report.macro_avg)},
                        {"weighted_avg", averages_json(report.weighted_avg)},
                        {"total_support", report.total_support}};
    if (report.confusion) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < report.confusion->n_classes(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < report.confusion->n_classes(); ++c) {
                row.push_back(report.confusion->at(i, c));
            }
            rows.push_back(std::move(row));
        }
        j["confusion_matrix"] = std::move(rows);
    }
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    for (const auto& c : j.at("classes")) {
        r.class_names.push_back(c.at("name").get<std::string>());
        ClassMetrics m;
        m.precision = c.at("precision").get<double>();
        m.recall = c.at("recall").get<double>();
        m.f1 = c.at("f1").get<double>();
        m.support = c.at("support").get<std::uint64_t>();
        m.precision_undefined = c.value("precision_undefined", false);
        m.recall_undefined = c.value("recall_undefined", false);
        r.per_class.push_back(m);
    }
    r.accuracy = j.at("accuracy").get<double>();
    r.macro_avg = averages_from(j.at("macro_avg"));
    r.weighted_avg = averages_from(j.at("weighted_avg"));
    r.total_support = j.at("total_support").get<std::uint64_t>();
    if (j.contains("confusion_matrix")) {
        const auto& rows = j.at("confusion_matrix");
        ConfusionMatrix cm(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) {
                throw InputError("report JSON: confusion matrix is not square");
            }
            for (std::size_t c = 0; c < rows.size(); ++c) {
                cm.at(i, c) = rows[i][c].get<std::uint64_t>();
            }
        }
        r.confusion = std::move(cm);
    }
    return r;
}

std::string confusion_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names) {
    if (class_names.size() != cm.n_classes()) {
        throw std::invalid_argument("confusion_csv: class name count differs from matrix size");
    }
    std::string out = "true\\predicted";
    for (const auto& n : class_names) {
        out += ',' + csv_escape(n);
    }
    out += '\n';
    for (std::size_t i = 0; i < cm.n_classes(); ++i) {
        out += csv_escape(class_names[i]);
        for (std::size_t c = 0; c < cm.n_classes(); ++c) {
            out += fmt::format(",{}", cm.at(i, c));
        }
        out += '\n';
    }
    return out;
}

std::vector<ComparisonRow> compare_models(const std::vector<std::pair<std::string, EvalReport>>& reports) {
    std::vector<ComparisonRow> rows;
    rows.reserve(reports.size());
    for (const auto& [name, r] : reports) {
        rows.push_back({name, r.weighted_avg.precision, r.weighted_avg.recall, r.weighted_avg.f1, r.accuracy});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        if (a.accuracy != b.accuracy) {
            return a.accuracy > b.accuracy;
        }
        return a.model < b.model;
    });
    return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "model,precision,recall,f1,accuracy\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{}\n", csv_escape(r.model), format_2dp(r.precision), format_2dp(r.recall),
                           format_2dp(r.f1), format_2dp(r.accuracy));
    }
    return out;
}

}  // namespace rnntc
