#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ragat/errors.hpp"
#include "ragat/evaluation.hpp"
#include "ragat/rng.hpp"

using namespace ragat;

namespace {

struct RefMetrics {
    double acc, p0, r0, f0, p1, r1, f1m, macro_p, macro_r, macro_f1;
};

// Independent formula evaluator working straight off the four cell counts.
RefMetrics reference_metrics(long long n00, long long n01, long long n10, long long n11) {
    auto safe = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
    const double total = static_cast<double>(n00 + n01 + n10 + n11);
    RefMetrics r{};
    r.acc = safe(static_cast<double>(n00 + n11), total);
    // class 0 positive: tp=n00, fp=n10, fn=n01
    r.p0 = safe(static_cast<double>(n00), static_cast<double>(n00 + n10));
    r.r0 = safe(static_cast<double>(n00), static_cast<double>(n00 + n01));
    r.f0 = safe(2.0 * r.p0 * r.r0, r.p0 + r.r0);
    // class 1 positive: tp=n11, fp=n01, fn=n10
    r.p1 = safe(static_cast<double>(n11), static_cast<double>(n11 + n01));
    r.r1 = safe(static_cast<double>(n11), static_cast<double>(n11 + n10));
    r.f1m = safe(2.0 * r.p1 * r.r1, r.p1 + r.r1);
    r.macro_p = 0.5 * (r.p0 + r.p1);
    r.macro_r = 0.5 * (r.r0 + r.r1);
    r.macro_f1 = 0.5 * (r.f0 + r.f1m);
    return r;
}

ConfusionCounts make_counts(long long n00, long long n01, long long n10, long long n11) {
    ConfusionCounts c;
    c.counts[0][0] = n00;
    c.counts[0][1] = n01;
    c.counts[1][0] = n10;
    c.counts[1][1] = n11;
    c.total = n00 + n01 + n10 + n11;
    return c;
}

}  // namespace

TEST_CASE("confusion tally on perfect and single-error predictions") {
    {
        ConfusionCounts c = confusion({0, 1, 0, 1}, {0, 1, 0, 1});
        CHECK(c.counts[0][0] == 2);
        CHECK(c.counts[1][1] == 2);
        CHECK(c.counts[0][1] == 0);
        CHECK(c.counts[1][0] == 0);
        CHECK(compute_metrics(c).accuracy == doctest::Approx(1.0));
        CHECK(compute_metrics(c).macro_f1 == doctest::Approx(1.0));
    }
    {
        ConfusionCounts c = confusion({1, 1, 0, 1}, {0, 1, 0, 1});
        CHECK(c.counts[0][1] == 1);
        CHECK(compute_metrics(c).accuracy == doctest::Approx(0.75));
    }
    CHECK_THROWS_AS(confusion({0, 1}, {0}), ContractError);
    CHECK_THROWS_AS(confusion({2}, {0}), ContractError);
    CHECK_THROWS_AS(confusion({}, {}), ContractError);
}

TEST_CASE("confusion matches a manual tally of 200 random pairs") {
    Rng rng(97);
    std::vector<int> preds, labels;
    long long manual[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < 200; ++i) {
        int p = static_cast<int>(rng.next_below(2));
        int l = static_cast<int>(rng.next_below(2));
        preds.push_back(p);
        labels.push_back(l);
        ++manual[l][p];
    }
    ConfusionCounts c = confusion(preds, labels);
    for (int l = 0; l < 2; ++l)
        for (int p = 0; p < 2; ++p)
            CHECK(c.counts[static_cast<std::size_t>(l)][static_cast<std::size_t>(p)] == manual[l][p]);
    CHECK(c.total == 200);
}

TEST_CASE("view extracts per-class tp/fp/fn/tn") {
    ConfusionCounts c = make_counts(40, 5, 5, 50);
    auto v1 = c.view(1);
    CHECK(v1.tp == 50);
    CHECK(v1.fp == 5);
    CHECK(v1.fn == 5);
    CHECK(v1.tn == 40);
    auto v0 = c.view(0);
    CHECK(v0.tp == 40);
    CHECK(v0.fp == 5);
    CHECK(v0.fn == 5);
    CHECK(v0.tn == 50);
}

TEST_CASE("hand-worked case: TP=50 TN=40 FP=5 FN=5 for the positive class") {
    MetricsReport r = compute_metrics(make_counts(40, 5, 5, 50));
    CHECK(r.accuracy == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r.precision[1] == doctest::Approx(50.0 / 55.0).epsilon(1e-12));
    CHECK(r.recall[1] == doctest::Approx(50.0 / 55.0).epsilon(1e-12));
    CHECK(r.f1[1] == doctest::Approx(50.0 / 55.0).epsilon(1e-12));
    CHECK(r.support[0] == 45);
    CHECK(r.support[1] == 55);
}

TEST_CASE("1000 random tables agree with the independent formula evaluator") {
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        // frequent zero cells to exercise the zero-denominator rule
        long long n00 = static_cast<long long>(rng.next_below(5));
        long long n01 = static_cast<long long>(rng.next_below(5));
        long long n10 = static_cast<long long>(rng.next_below(5));
        long long n11 = static_cast<long long>(rng.next_below(5));
        if (n00 + n01 + n10 + n11 == 0) n00 = 1;
        MetricsReport got = compute_metrics(make_counts(n00, n01, n10, n11));
        RefMetrics want = reference_metrics(n00, n01, n10, n11);
        CHECK(std::fabs(got.accuracy - want.acc) < 1e-12);
        CHECK(std::fabs(got.precision[0] - want.p0) < 1e-12);
        CHECK(std::fabs(got.recall[0] - want.r0) < 1e-12);
        CHECK(std::fabs(got.f1[0] - want.f0) < 1e-12);
        CHECK(std::fabs(got.precision[1] - want.p1) < 1e-12);
        CHECK(std::fabs(got.recall[1] - want.r1) < 1e-12);
        CHECK(std::fabs(got.f1[1] - want.f1m) < 1e-12);
        CHECK(std::fabs(got.macro_precision - want.macro_p) < 1e-12);
        CHECK(std::fabs(got.macro_recall - want.macro_r) < 1e-12);
        CHECK(std::fabs(got.macro_f1 - want.macro_f1) < 1e-12);

        // structural properties
        for (int cls = 0; cls < 2; ++cls) {
            const double lo = std::min(got.precision[static_cast<std::size_t>(cls)],
                                       got.recall[static_cast<std::size_t>(cls)]);
            const double hi = std::max(got.precision[static_cast<std::size_t>(cls)],
                                       got.recall[static_cast<std::size_t>(cls)]);
            CHECK(got.f1[static_cast<std::size_t>(cls)] >= lo - 1e-12);
            CHECK(got.f1[static_cast<std::size_t>(cls)] <= hi + 1e-12);
        }

        // swapping both labels and predictions leaves macro values unchanged
        MetricsReport swapped = compute_metrics(make_counts(n11, n10, n01, n00));
        CHECK(std::fabs(swapped.macro_f1 - got.macro_f1) < 1e-12);
        CHECK(std::fabs(swapped.accuracy - got.accuracy) < 1e-12);
    }
}

TEST_CASE("format_report layout and rounding") {
    MetricsReport r = compute_metrics(make_counts(397, 3, 4, 396));
    // class 1: P = 396/399, R = 396/400, F1 in between
    std::string report = format_report(r);
    CHECK(report.find("precision") != std::string::npos);
    CHECK(report.find("non-rumor") != std::string::npos);
    CHECK(report.find("rumor") != std::string::npos);
    CHECK(report.find("accuracy") != std::string::npos);
    CHECK(report.find("macro avg") != std::string::npos);
    CHECK(report.find("0.9925") != std::string::npos);  // 396/399 precision
    CHECK(report.find("0.9900") != std::string::npos);  // 396/400 recall
    CHECK(report.find("0.9912") != std::string::npos);  // harmonic mean, rounded

    // every numeric field carries exactly 4 decimals
    std::istringstream in(report);
    std::string tok;
    while (in >> tok) {
        if (tok.find('.') == std::string::npos) continue;
        auto dot = tok.find('.');
        if (!std::isdigit(static_cast<unsigned char>(tok[0]))) continue;
        CHECK(tok.size() - dot - 1 == 4);
    }
}

TEST_CASE("format_report_tsv round-trips through parsing") {
    MetricsReport r = compute_metrics(make_counts(40, 5, 5, 50));
    std::string line = format_report_tsv(r);
    std::istringstream in(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(in, field, '\t')) fields.push_back(field);
    // accuracy, macro P/R/F1, then P/R/F1/support per class
    REQUIRE(fields.size() == 12);
    CHECK(std::stod(fields[0]) == doctest::Approx(r.accuracy).epsilon(1e-4));
    CHECK(std::stod(fields[1]) == doctest::Approx(r.macro_precision).epsilon(1e-4));
    CHECK(std::stod(fields[2]) == doctest::Approx(r.macro_recall).epsilon(1e-4));
    CHECK(std::stod(fields[3]) == doctest::Approx(r.macro_f1).epsilon(1e-4));
    CHECK(std::stoll(fields[7]) == r.support[0]);
    CHECK(std::stoll(fields[11]) == r.support[1]);
}
