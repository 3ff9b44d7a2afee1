#include <doctest.h>

#include <cmath>
#include <sstream>

#include "metrics_oracle.hpp"
#include "rnntc/metrics.hpp"
#include "rnntc/rng.hpp"

using namespace rnntc;

namespace {

std::vector<std::size_t> idx(std::initializer_list<std::size_t> v) { return v; }

ConfusionMatrix cm_from(const std::vector<std::vector<std::uint64_t>>& rows) {
    ConfusionMatrix cm(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) {
            cm.at(i, j) = rows[i][j];
        }
    }
    return cm;
}

// Per-class figures as printed in the sRNN classification report.
std::vector<ClassMetrics> fig7_classes() {
    return {{0.69, 0.56, 0.61, 675}, {0.91, 0.98, 0.94, 8737}, {0.93, 0.84, 0.88, 416}, {0.64, 0.24, 0.35, 801}};
}
const std::vector<std::string> kFig7Names = {"Minor", "None", "Substantial", "Destroyed"};

std::string squash(const std::string& s) {
    std::istringstream in(s);
    std::string out, w;
    while (in >> w) {
        out += (out.empty() ? "" : " ") + w;
    }
    return out;
}

}  // namespace

TEST_CASE("confusion_matrix examples") {
    CHECK(confusion_matrix(idx({0, 0, 1, 1, 1}), idx({0, 0, 1, 1, 1}), 2) == cm_from({{2, 0}, {0, 3}}));
    CHECK(confusion_matrix(idx({0, 1, 1, 1, 0}), idx({0, 0, 1, 1, 1}), 2) == cm_from({{1, 1}, {1, 2}}));
    const auto empty = confusion_matrix(idx({}), idx({}), 3);
    CHECK(empty == ConfusionMatrix(3));
    CHECK(empty.total() == 0);
    CHECK_THROWS_AS(confusion_matrix(idx({0, 2}), idx({0, 1}), 2), std::out_of_range);
    CHECK_THROWS_AS(confusion_matrix(idx({0}), idx({0, 1}), 2), std::invalid_argument);
}

TEST_CASE("class_metrics examples") {
    for (const auto& m : class_metrics(cm_from({{5, 0}, {0, 5}}))) {
        CHECK(m == ClassMetrics{1.0, 1.0, 1.0, 5});
    }
    const auto m = class_metrics(cm_from({{1, 1}, {1, 2}}));
    CHECK(m[0].precision == 0.5);
    CHECK(m[0].recall == 0.5);
    CHECK(m[1].precision == 2.0 / 3.0);
    CHECK(m[1].recall == 2.0 / 3.0);

    const auto z = class_metrics(cm_from({{3, 0, 1}, {0, 0, 0}, {2, 0, 4}}));
    CHECK(z[1].precision == 0.0);
    CHECK(z[1].recall == 0.0);
    CHECK(z[1].f1 == 0.0);
    CHECK(z[1].support == 0);
    CHECK(z[1].precision_undefined);
    CHECK(z[1].recall_undefined);
    CHECK_FALSE(z[0].precision_undefined);
    CHECK(f1_score(0.0, 0.0) == 0.0);
}

TEST_CASE("aggregate examples") {
    const auto fig = fig7_classes();
    const auto agg = aggregate(fig);
    CHECK(std::abs(agg.weighted.f1 - 0.8722) <= 0.0005);
    CHECK(std::abs(agg.macro.f1 - 0.695) <= 0.0005);
    CHECK(agg.weighted.support == 10629);
    CHECK(agg.macro.support == 10629);
    // Reference sums worked by hand from the four rows.
    CHECK(agg.weighted.precision == doctest::Approx(9315.94 / 10629.0).epsilon(1e-12));
    CHECK(agg.weighted.recall == doctest::Approx(9481.94 / 10629.0).epsilon(1e-12));
    CHECK(agg.weighted.f1 == doctest::Approx(9270.96 / 10629.0).epsilon(1e-12));

    const std::vector<ClassMetrics> one{{0.3, 0.6, 0.4, 12}};
    const auto single = aggregate(one);
    CHECK(single.macro.precision == 0.3);
    CHECK(single.weighted.precision == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(single.weighted.f1 == doctest::Approx(single.macro.f1).epsilon(1e-15));
    CHECK(single.weighted.recall == doctest::Approx(0.6).epsilon(1e-15));
    CHECK_THROWS_AS(aggregate(std::vector<ClassMetrics>{}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate(std::vector<ClassMetrics>{{0.1, 0.1, 0.1, 0}}), std::invalid_argument);
}

TEST_CASE("property: metrics match a brute-force recount") {
    Rng rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 2 + rng.below(5);
        const std::size_t n = 1 + rng.below(1000);
        std::vector<std::size_t> t(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = rng.below(k);
            p[i] = rng.below(2) ? t[i] : rng.below(k);
        }
        const auto cm = confusion_matrix(t, p, k);
        const auto got = class_metrics(cm);
        const auto want = rnntc::testing::brute_force_metrics(t, p, k);
        std::uint64_t support = 0;
        for (std::size_t c = 0; c < k; ++c) {
            CHECK(got[c].support == want.per_class[c].support);
            CHECK(cm.at(c, c) == want.per_class[c].tp);
            CHECK(cm.col_sum(c) - cm.at(c, c) == want.per_class[c].fp);
            CHECK(std::abs(got[c].precision - want.per_class[c].precision) <= 1e-12);
            CHECK(std::abs(got[c].recall - want.per_class[c].recall) <= 1e-12);
            CHECK(std::abs(got[c].f1 - want.per_class[c].f1) <= 1e-12);
            CHECK(got[c].f1 <= (got[c].precision + got[c].recall) / 2.0 + 1e-12);
            for (double v : {got[c].precision, got[c].recall, got[c].f1}) {
                CHECK((v >= 0.0 && v <= 1.0));
            }
            support += got[c].support;
        }
        CHECK(support == n);
        const auto report = make_report(cm, std::vector<std::string>(k, "c"));
        CHECK(report.accuracy == static_cast<double>(cm.trace()) / static_cast<double>(cm.total()));
        CHECK(std::abs(report.accuracy - want.accuracy) <= 1e-12);
        CHECK(std::abs(report.macro_avg.f1 - want.macro_f1) <= 1e-12);
        CHECK(std::abs(report.weighted_avg.precision - want.weighted_p) <= 1e-12);
        CHECK(std::abs(report.weighted_avg.recall - want.weighted_r) <= 1e-12);
        CHECK(std::abs(report.weighted_avg.f1 - want.weighted_f1) <= 1e-12);
        CHECK(report.total_support == n);
    }
}

TEST_CASE("property: equal supports make weighted equal macro") {
    Rng rng(2);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 1 + rng.below(6);
        const std::uint64_t s = 1 + rng.below(500);
        std::vector<ClassMetrics> cls(k);
        for (auto& c : cls) {
            c = {rng.uniform(), rng.uniform(), rng.uniform(), s};
        }
        const auto a = aggregate(cls);
        CHECK(std::abs(a.weighted.precision - a.macro.precision) <= 1e-12);
        CHECK(std::abs(a.weighted.recall - a.macro.recall) <= 1e-12);
        CHECK(std::abs(a.weighted.f1 - a.macro.f1) <= 1e-12);
    }
}

TEST_CASE("format_2dp rounds half up") {
    CHECK(format_2dp(0.695) == "0.70");
    CHECK(format_2dp(0.655) == "0.66");
    CHECK(format_2dp(0.125) == "0.13");
    CHECK(format_2dp(0.8722) == "0.87");
    CHECK(format_2dp(0.0) == "0.00");
    CHECK(format_2dp(1.0) == "1.00");
    CHECK(format_2dp(0.994999) == "0.99");
    CHECK(format_2dp(0.995) == "1.00");
}

TEST_CASE("render_report reproduces the classification report rows") {
    const auto report = make_report(kFig7Names, fig7_classes(), 0.89);
    const std::string text = render_report(report);
    const std::string flat = squash(text);
    CHECK(flat.find("Minor 0.69 0.56 0.61 675") != std::string::npos);
    CHECK(flat.find("None 0.91 0.98 0.94 8737") != std::string::npos);
    CHECK(flat.find("Substantial 0.93 0.84 0.88 416") != std::string::npos);
    CHECK(flat.find("Destroyed 0.64 0.24 0.35 801") != std::string::npos);
    CHECK(flat.find("accuracy 0.89 10629") != std::string::npos);
    // Half-up on the unrounded means: macro recall 0.655, macro f1 0.695.
    CHECK(flat.find("macro avg 0.79 0.66 0.70 10629") != std::string::npos);
    // Weighted precision from the printed per-class values is 0.8765.
    CHECK(flat.find("weighted avg 0.88 0.89 0.87 10629") != std::string::npos);

    std::istringstream lines(text);
    std::string line;
    std::size_t width = 0;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.find_first_not_of(' ') != std::string::npos && line.find("precision") == std::string::npos) {
            if (width == 0) {
                width = line.size();
            }
            CHECK(line.size() == width);
        }
    }
}

TEST_CASE("report JSON round-trips at full precision") {
    Rng rng(4);
    std::vector<std::size_t> t(300), p(300);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = rng.below(4);
        p[i] = rng.below(4);
    }
    const auto report = make_report(confusion_matrix(t, p, 4), {"None", "Minor", "Substantial", "Destroyed"});
    const auto j = report_to_json(report);
    CHECK(report_from_json(nlohmann::json::parse(j.dump())) == report);
    CHECK(j.at("accuracy").get<double>() == report.accuracy);
    const auto fig = make_report(kFig7Names, fig7_classes(), 0.89);
    CHECK(report_from_json(report_to_json(fig)) == fig);
    CHECK_FALSE(report_from_json(report_to_json(fig)).confusion.has_value());
}

TEST_CASE("confusion_csv") {
    const auto csv = confusion_csv(cm_from({{1, 2}, {3, 4}}), {"a", "b,c"});
    CHECK(csv == "true\\predicted,a,\"b,c\"\na,1,2\n\"b,c\",3,4\n");
}

TEST_CASE("compare_models") {
    const auto fig = make_report(kFig7Names, fig7_classes(), 0.89);
    const auto rows = compare_models({{"sRNN", fig}});
    REQUIRE(rows.size() == 1);
    CHECK(format_2dp(rows[0].recall) == "0.89");
    CHECK(format_2dp(rows[0].f1) == "0.87");
    CHECK(format_2dp(rows[0].accuracy) == "0.89");
    CHECK(rows[0].precision == fig.weighted_avg.precision);

    auto a = fig, b = fig, c = fig;
    a.accuracy = 0.5;
    b.accuracy = 0.9;
    c.accuracy = 0.9;
    const auto sorted = compare_models({{"LSTM", a}, {"GRU", b}, {"BLSTM", c}});
    CHECK(sorted[0].model == "BLSTM");
    CHECK(sorted[1].model == "GRU");
    CHECK(sorted[2].model == "LSTM");
    const auto csv = comparison_csv(sorted);
    CHECK(csv.substr(0, csv.find('\n')) == "model,precision,recall,f1,accuracy");
    CHECK(csv.find("\nLSTM,0.88,0.89,0.87,0.50\n") != std::string::npos);
}
