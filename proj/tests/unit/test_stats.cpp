// Copyright 2026 The timbremap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "timbremap/error.hpp"
#include "timbremap/random.hpp"
#include "timbremap/stats.hpp"

using namespace timbremap;

namespace {

template <class Fn>
void expect_kind(ErrorKind kind, Fn fn) {
    try {
        fn();
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == kind);
    }
}

std::vector<double> lognormal(std::size_t n, std::uint64_t seed, double mu = 0.0, double sigma = 1.0) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = std::exp(rng.normal(mu, sigma));
    return v;
}

/// Participants x observations for one condition, lognormal around `median`.
void add_results(std::vector<TaskResult>& out, Condition c, double median, std::size_t participants,
                 std::size_t per_participant, Rng& rng, const std::string& tag = "") {
    for (std::size_t p = 0; p < participants; ++p) {
        const double participant = rng.normal(0.0, 0.05);
        for (std::size_t k = 0; k < per_participant; ++k) {
            TaskResult r;
            r.participant_id = "p" + std::to_string(p);
            r.task_id = condition_key(c) + tag + std::to_string(p) + "-" + std::to_string(k);
            r.completed = true;
            r.completion_time = median * std::exp(participant + rng.normal(0.0, 0.1));
            r.hovered_events = 5 + rng.below(10);
            r.distance = 1000.0 + rng.uniform(0.0, 500.0);
            r.condition = c;
            r.phase = Phase::evaluation;
            out.push_back(r);
        }
    }
}

}  // namespace

TEST_CASE("Box-Cox formulas") {
    CHECK(boxcox_apply({1.0, 0.0, 0.0}, 5.0) == doctest::Approx(4.0));
    CHECK(boxcox_apply({0.0, 0.0, 0.0}, std::exp(1.0)) == doctest::Approx(1.0));
    CHECK(boxcox_apply({0.5, 0.0, 0.0}, 4.0) == doctest::Approx(2.0));
    CHECK(boxcox_invert({0.5, 0.0, 0.0}, 2.0) == doctest::Approx(4.0));
    expect_kind(ErrorKind::domain, [] { boxcox_apply({0.5, 0.0, 0.0}, -1.0); });
    expect_kind(ErrorKind::domain, [] { boxcox_invert({0.5, 0.0, 0.0}, -3.0); });  // 1 + lambda y < 0
}

TEST_CASE("Box-Cox fit on lognormal data finds lambda near zero") {
    const auto x = lognormal(5000, 2);
    const BoxCoxModel m = boxcox_fit(x);
    CHECK(m.lambda >= -0.15);
    CHECK(m.lambda <= 0.15);
    CHECK(m.shift == 0.0);
    // The optimum beats its neighbors on the directly computed likelihood.
    const double at = oracle::boxcox_llf(x, m.lambda);
    CHECK(at >= oracle::boxcox_llf(x, m.lambda + 0.01));
    CHECK(at >= oracle::boxcox_llf(x, m.lambda - 0.01));
    CHECK(m.log_likelihood == doctest::Approx(at).epsilon(1e-9));
    CHECK(boxcox_log_likelihood(x, 0.3) == doctest::Approx(oracle::boxcox_llf(x, 0.3)).epsilon(1e-12));

    for (double v : std::vector<double>(x.begin(), x.begin() + 200)) {
        CHECK(boxcox_invert(m, boxcox_apply(m, v)) == doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("Box-Cox reduces skew and handles edge cases") {
    Rng rng(4);
    std::vector<double> normalish(500);
    for (double& v : normalish) v = rng.normal(100.0, 5.0);
    const BoxCoxModel m = boxcox_fit(normalish);
    std::vector<double> y;
    for (double v : normalish) y.push_back(boxcox_apply(m, v));
    CHECK(std::abs(skewness(y)) <= std::abs(skewness(normalish)) + 1e-12);
    CHECK(skewness(normalish) == doctest::Approx(oracle::skewness(normalish)).epsilon(1e-9));

    std::vector<double> with_zero = lognormal(50, 8);
    with_zero[3] = 0.0;
    const BoxCoxModel z = boxcox_fit(with_zero);
    std::vector<double> pos;
    for (double v : with_zero) {
        if (v > 0.0) pos.push_back(v);
    }
    std::nth_element(pos.begin(), pos.begin() + pos.size() / 2, pos.end());
    CHECK(z.shift > 0.0);
    CHECK(z.shift < 1e-5 * pos[pos.size() / 2] * 10);

    expect_kind(ErrorKind::insufficient_data, [] { boxcox_fit(std::vector<double>(9, 1.0)); });
    std::vector<double> negative = lognormal(20, 1);
    negative[0] = -1.0;
    expect_kind(ErrorKind::domain, [&] { boxcox_fit(negative); });
    const BoxCoxModel constant = boxcox_fit(std::vector<double>(12, 3.0));
    CHECK(constant.lambda == 1.0);
}

TEST_CASE("midranks") {
    const std::vector<double> v = {3.0, 1.0, 3.0, 2.0, 3.0};
    CHECK(midranks(v) == std::vector<double>{4.0, 1.0, 4.0, 2.0, 4.0});
}

TEST_CASE("Mann-Whitney basics") {
    const std::vector<double> a = {1, 2}, b = {3, 4};
    const auto r = mann_whitney_u(a, b);
    CHECK(r.u_a == 0.0);
    CHECK(r.u_b == 4.0);
    CHECK(r.exact);
    CHECK(r.p == doctest::Approx(oracle::mann_whitney_enumerated_p(2, 2, 0.0)));

    const std::vector<double> same = {1, 5, 2, 8, 3, 3};
    const auto s = mann_whitney_u(same, same);
    CHECK(s.u_a == 18.0);
    CHECK(s.u_b == 18.0);
    CHECK(s.p > 0.95);

    expect_kind(ErrorKind::parameter, [] { mann_whitney_u(std::vector<double>{}, std::vector<double>{1.0}); });
}

TEST_CASE("Mann-Whitney U matches pair counting; U_a + U_b = n_a n_b") {
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t na = 1 + rng.below(25), nb = 1 + rng.below(25);
        std::vector<double> a(na), b(nb);
        for (double& v : a) v = std::round(rng.normal(0.3, 1.0) * 4.0) / 4.0;  // ties on purpose
        for (double& v : b) v = std::round(rng.normal() * 4.0) / 4.0;
        const auto r = mann_whitney_u(a, b);
        CHECK(r.u_a == doctest::Approx(oracle::mann_whitney_u_pairs(a, b)));
        CHECK(r.u_a + r.u_b == doctest::Approx(static_cast<double>(na * nb)));
        CHECK(r.p >= 0.0);
        CHECK(r.p <= 1.0);
    }
}

TEST_CASE("exact Mann-Whitney p equals enumeration") {
    for (std::size_t na = 1; na <= 6; ++na) {
        for (std::size_t nb = 1; na + nb <= 12; ++nb) {
            for (double u = 0; u <= static_cast<double>(na * nb); u += 1.0) {
                CHECK(mann_whitney_exact_p(na, nb, u) == doctest::Approx(oracle::mann_whitney_enumerated_p(na, nb, u)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("chi-square tail and incomplete gamma") {
    for (double x : {0.01, 0.5, 1.0, 3.84, 10.0, 40.0}) {
        CHECK(chi_square_sf(x, 1.0) == doctest::Approx(oracle::chi2_sf_df1(x)).epsilon(1e-10));
        CHECK(chi_square_sf(x, 2.0) == doctest::Approx(oracle::chi2_sf_df2(x)).epsilon(1e-10));
    }
    CHECK(chi_square_sf(0.0, 3.0) == 1.0);
    // Q(a, x) for integer a has a finite Poisson sum.
    for (double x : {0.5, 2.0, 7.0, 20.0}) {
        const double q3 = std::exp(-x) * (1.0 + x + x * x / 2.0);
        CHECK(regularized_gamma_q(3.0, x) == doctest::Approx(q3).epsilon(1e-10));
    }
}

TEST_CASE("Kruskal-Wallis") {
    const std::vector<std::vector<double>> flat = {{2, 2, 2}, {2, 2}, {2, 2, 2}};
    const auto k0 = kruskal_wallis(flat);
    CHECK(k0.h == 0.0);
    CHECK(k0.p == 1.0);
    CHECK(k0.df == 2);

    // Two groups agree with the Mann-Whitney normal approximation.
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(20), b(25);
        for (double& v : a) v = rng.normal(0.4, 1.0);
        for (double& v : b) v = rng.normal();
        const auto kw = kruskal_wallis(std::vector<std::vector<double>>{a, b});
        const auto mw = mann_whitney_u(a, b);
        CHECK_FALSE(mw.exact);
        CHECK(std::abs(kw.p - mw.p) < 0.02);
    }

    // Shifted groups are detected.
    std::vector<std::vector<double>> shifted(3, std::vector<double>(5));
    Rng r2(7);
    for (std::size_t g = 0; g < 3; ++g) {
        for (double& v : shifted[g]) v = r2.normal(3.0 * static_cast<double>(g), 1.0);
    }
    CHECK(kruskal_wallis(shifted).p < 0.01);

    expect_kind(ErrorKind::parameter, [] { kruskal_wallis(std::vector<std::vector<double>>{{1, 2, 3}}); });
    expect_kind(ErrorKind::parameter, [] { kruskal_wallis(std::vector<std::vector<double>>{{1, 2}, {}}); });
    expect_kind(ErrorKind::parameter, [] { kruskal_wallis(std::vector<std::vector<double>>{{1, 2}, {3}}); });
}

TEST_CASE("rank statistics are invariant under the fitted transform") {
    const auto a = lognormal(30, 1, 0.2), b = lognormal(40, 2), c = lognormal(25, 3, -0.1);
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    pooled.insert(pooled.end(), c.begin(), c.end());
    const BoxCoxModel m = boxcox_fit(pooled);
    auto tr = [&](const std::vector<double>& v) {
        std::vector<double> out;
        for (double x : v) out.push_back(boxcox_apply(m, x));
        return out;
    };
    const auto u0 = mann_whitney_u(a, b), u1 = mann_whitney_u(tr(a), tr(b));
    CHECK(u0.u_a == u1.u_a);
    CHECK(u0.p == u1.p);
    const auto h0 = kruskal_wallis(std::vector<std::vector<double>>{a, b, c});
    const auto h1 = kruskal_wallis(std::vector<std::vector<double>>{tr(a), tr(b), tr(c)});
    CHECK(h0.h == h1.h);
    CHECK(h0.p == h1.p);
}

TEST_CASE("group summary of identical values") {
    std::vector<TaskResult> rs;
    for (int i = 0; i < 12; ++i) {
        TaskResult r;
        r.task_id = "t" + std::to_string(i);
        r.participant_id = "p" + std::to_string(i % 3);
        r.completed = true;
        r.completion_time = 7.5;
        r.condition = Condition{PlacementMode::dr, LabelMode::shape};
        r.phase = Phase::evaluation;
        rs.push_back(r);
    }
    const SummaryTable t = group_summary(rs, Measure::time);
    REQUIRE(t.groups.size() == 1);
    CHECK(t.groups[0].mean == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(t.groups[0].ci_low == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(t.groups[0].ci_high == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(t.groups[0].n == 12);
    CHECK(t.groups[0].participants == 3);
}

TEST_CASE("group summary: bounds, determinism, exclusions and sparse groups") {
    Rng rng(1);
    std::vector<TaskResult> rs;
    for (LabelMode l : {LabelMode::baseline, LabelMode::shape}) {
        for (PlacementMode p : {PlacementMode::dr, PlacementMode::random}) add_results(rs, {p, l}, 10.0, 5, 4, rng);
    }
    // Practice and incomplete results are ignored.
    TaskResult practice = rs[0];
    practice.task_id = "practice";
    practice.phase = Phase::practice;
    practice.completion_time = 1000.0;
    rs.push_back(practice);
    TaskResult incomplete = rs[1];
    incomplete.task_id = "incomplete";
    incomplete.completed = false;
    incomplete.completion_time = 900.0;
    rs.push_back(incomplete);

    SummaryOptions opt;
    opt.seed = 5;
    const SummaryTable t = group_summary(rs, Measure::time, opt);
    CHECK(t.groups.size() == 4);
    for (const auto& g : t.groups) {
        CHECK(g.ci_low <= g.mean);
        CHECK(g.mean <= g.ci_high);
        CHECK(g.n == 20);
        CHECK(g.mean < 20.0);
    }
    const SummaryTable again = group_summary(rs, Measure::time, opt);
    SummaryOptions serial = opt;
    serial.exec = Exec::serial;
    const SummaryTable ser = group_summary(rs, Measure::time, serial);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(again.groups[i].ci_low == t.groups[i].ci_low);
        CHECK(ser.groups[i].ci_high == t.groups[i].ci_high);
    }

    opt.grouping = Grouping::label;
    const SummaryTable by_label = group_summary(rs, Measure::hovered, opt);
    CHECK(by_label.groups.size() == 2);
    CHECK(by_label.groups[0].n == 40);
    CHECK_FALSE(by_label.groups[0].key.placement.has_value());

    opt.grouping = Grouping::condition;
    opt.min_group_size = 25;
    try {
        group_summary(rs, Measure::time, opt);
        FAIL("expected insufficient data");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_data);
        CHECK(std::string(e.what()).find("dr/shape") != std::string::npos);
    }
}

TEST_CASE("a planted 20% effect separates the confidence intervals") {
    std::size_t disjoint = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        std::vector<TaskResult> rs;
        add_results(rs, {PlacementMode::dr, LabelMode::shape}, 8.0, 5, 8, rng);
        add_results(rs, {PlacementMode::random, LabelMode::shape}, 10.0, 5, 8, rng);
        SummaryOptions opt;
        opt.seed = seed;
        const SummaryTable t = group_summary(rs, Measure::time, opt);
        REQUIRE(t.groups.size() == 2);
        const auto& a = t.groups[0];
        const auto& b = t.groups[1];
        disjoint += a.ci_high < b.ci_low || b.ci_high < a.ci_low;
    }
    CHECK(disjoint >= 18);
}

TEST_CASE("significance report") {
    Rng rng(2);
    std::vector<TaskResult> rs;
    for (LabelMode l : {LabelMode::baseline, LabelMode::color}) {
        add_results(rs, {PlacementMode::dr, l}, l == LabelMode::color ? 7.0 : 10.0, 5, 8, rng);
        add_results(rs, {PlacementMode::random, l}, 10.0, 5, 8, rng);
    }
    std::vector<QuestionnaireResponse> qs;
    for (int p = 0; p < 12; ++p) {
        QuestionnaireResponse q;
        q.questionnaire = Questionnaire::Q1;
        q.participant_id = "p" + std::to_string(p);
        q.label_mode = p % 2 ? LabelMode::shape : LabelMode::texture;
        q.answers = {{"helpful", std::int64_t{p % 2 ? 5 : 1}}, {"comment", std::string("x")}};
        qs.push_back(q);
    }
    const SignificanceReport rep = significance_report(rs, qs);
    const auto* planted = rep.find("time", "mann-whitney", "label=color");
    REQUIRE(planted != nullptr);
    CHECK(planted->significant);
    CHECK(planted->groups == std::vector<std::string>{"dr", "random"});
    CHECK(planted->group_sizes == std::vector<std::size_t>{40, 40});
    // Completeness: every (measure, label) present in the input has a row.
    for (const char* m : {"time", "hovered", "distance"}) {
        for (const char* l : {"label=baseline", "label=color"}) CHECK(rep.find(m, "mann-whitney", l) != nullptr);
        CHECK(rep.find(m, "kruskal-wallis", "placement=dr") != nullptr);
    }
    const auto* likert = rep.find("Q1/helpful", "kruskal-wallis", "labels");
    REQUIRE(likert != nullptr);
    CHECK(likert->significant);
    CHECK(format_significance(rep).find("**") != std::string::npos);
    CHECK(significance_to_json(rep)["rows"].size() == rep.rows.size());

    // Two identical condition datasets: nothing flagged.
    std::vector<TaskResult> twin;
    Rng r3(9);
    add_results(twin, {PlacementMode::dr, LabelMode::shape}, 10.0, 5, 8, r3);
    for (TaskResult r : std::vector<TaskResult>(twin)) {
        r.condition = Condition{PlacementMode::random, LabelMode::shape};
        r.task_id += "-r";
        twin.push_back(r);
    }
    const SignificanceReport none = significance_report(twin);
    for (const auto& row : none.rows) CHECK_FALSE(row.significant);
    CHECK(format_significance(none).find("**") == std::string::npos);
}

TEST_CASE("summary table layout") {
    Rng rng(6);
    std::vector<TaskResult> rs;
    for (LabelMode l : {LabelMode::baseline, LabelMode::shape, LabelMode::color, LabelMode::texture}) {
        for (PlacementMode p : {PlacementMode::dr, PlacementMode::random}) add_results(rs, {p, l}, 10.0, 5, 3, rng, to_string(l).data());
    }
    std::vector<SummaryTable> tables;
    for (Measure m : {Measure::time, Measure::hovered, Measure::distance}) tables.push_back(group_summary(rs, m));
    const std::string text = format_summary(tables);
    // One block per measure, header row + one row per label in each.
    for (const char* m : {"time", "hovered", "distance"}) CHECK(text.find(m) != std::string::npos);
    CHECK(text.find("random") < text.find("dr "));
    std::size_t rows = 0;
    for (const char* l : {"\n  baseline", "\n  shape", "\n  color", "\n  texture"}) {
        for (std::size_t pos = text.find(l); pos != std::string::npos; pos = text.find(l, pos + 1)) ++rows;
    }
    CHECK(rows == 12);
    const auto j = summary_to_json(tables);
    CHECK(j.size() == 3);
    CHECK(j[0]["groups"].size() == 8);
}
