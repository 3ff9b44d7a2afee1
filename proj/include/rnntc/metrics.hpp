#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace rnntc {

/// K x K counts; rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t n_classes) : k_(n_classes), counts_(n_classes * n_classes, 0) {}

    std::size_t n_classes() const { return k_; }
    std::uint64_t& at(std::size_t truth, std::size_t pred) { return counts_.at(truth * k_ + pred); }
    std::uint64_t at(std::size_t truth, std::size_t pred) const { return counts_.at(truth * k_ + pred); }

    std::uint64_t row_sum(std::size_t truth) const;
    std::uint64_t col_sum(std::size_t pred) const;
    std::uint64_t trace() const;
    std::uint64_t total() const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::size_t k_ = 0;
    std::vector<std::uint64_t> counts_;
};

/// Throws std::out_of_range for a class index >= K and std::invalid_argument
/// when the two lists differ in length.
ConfusionMatrix confusion_matrix(std::span<const std::size_t> truths, std::span<const std::size_t> preds,
                                 std::size_t n_classes);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    // Set when the metric's denominator was zero and it was reported as 0.
    bool precision_undefined = false;
    bool recall_undefined = false;

    bool operator==(const ClassMetrics&) const = default;
};

/// f1 = 2pr / (p + r), or 0 when p + r == 0.
double f1_score(double precision, double recall);

std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& cm);

struct AverageMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;

    bool operator==(const AverageMetrics&) const = default;
};

struct Aggregate {
    AverageMetrics macro;
    AverageMetrics weighted;
};

/// Unweighted and support-weighted means. Throws std::invalid_argument on an
/// empty list or a zero total support.
Aggregate aggregate(std::span<const ClassMetrics> per_class);

struct EvalReport {
    std::vector<std::string> class_names;
    std::vector<ClassMetrics> per_class;
    double accuracy = 0.0;
    AverageMetrics macro_avg;
    AverageMetrics weighted_avg;
    std::uint64_t total_support = 0;
    std::optional<ConfusionMatrix> confusion;

    bool operator==(const EvalReport&) const = default;
};

EvalReport make_report(const ConfusionMatrix& cm, std::vector<std::string> class_names);

/// Report from externally supplied per-class figures and accuracy (no
/// confusion matrix).
EvalReport make_report(std::vector<std::string> class_names, std::vector<ClassMetrics> per_class, double accuracy);

/// Two decimals, ties rounded away from zero on the decimal value
/// (0.695 -> "0.70").
std::string format_2dp(double value);

/// Fixed-width classification report with per-class rows, accuracy, macro avg
/// and weighted avg.
std::string render_report(const EvalReport& report);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// Grid with a header row of predicted class names and one row per true class.
std::string confusion_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names);

struct ComparisonRow {
    std::string model;
    double precision = 0.0;  // weighted
    double recall = 0.0;     // weighted
    double f1 = 0.0;         // weighted
    double accuracy = 0.0;
};

/// One row per report, sorted by descending accuracy, then name.
std::vector<ComparisonRow> compare_models(const std::vector<std::pair<std::string, EvalReport>>& reports);

/// `model,precision,recall,f1,accuracy`, values at two decimals.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace rnntc
