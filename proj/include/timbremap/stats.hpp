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

// Analysis of logged measures: Box-Cox normalization, participant-clustered
// bootstrap summaries, and rank tests.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "timbremap/kernels.hpp"
#include "timbremap/study.hpp"

namespace timbremap {

// --- Box-Cox ----------------------------------------------------------------

struct BoxCoxModel {
    double lambda = 1.0;
    double shift = 0.0;  // added before transforming; nonzero only when zeros were present
    double log_likelihood = 0.0;
};

/// Golden-section maximization of the profile log-likelihood over
/// lambda in [-2, 2]. Constant data has no defined optimum and gets lambda 1.
BoxCoxModel boxcox_fit(std::span<const double> values);
double boxcox_apply(const BoxCoxModel& model, double x);
double boxcox_invert(const BoxCoxModel& model, double y);
double boxcox_log_likelihood(std::span<const double> values, double lambda, double shift = 0.0);

double skewness(std::span<const double> values);

// --- rank tests -------------------------------------------------------------

/// Midranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> values);

struct MannWhitneyResult {
    double u_a = 0.0;
    double u_b = 0.0;
    double p = 1.0;  // two-sided
    bool exact = false;
};

/// Exact enumeration for |a| + |b| <= 12 without ties; otherwise the normal
/// approximation with tie-corrected variance and continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Two-sided exact p of U_a = u for samples of sizes (n_a, n_b), no ties.
double mann_whitney_exact_p(std::size_t n_a, std::size_t n_b, double u);

struct KruskalWallisResult {
    double h = 0.0;
    double p = 1.0;
    std::size_t df = 0;
};

KruskalWallisResult kruskal_wallis(std::span<const std::vector<double>> groups);

/// Regularized upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);
double chi_square_sf(double x, double df);

// --- grouped summaries ------------------------------------------------------

enum class Measure { time, hovered, distance };

std::string_view to_string(Measure m);
Measure measure_from_string(std::string_view text);
double measure_value(const TaskResult& r, Measure m);

enum class Grouping { condition, placement, label };

struct GroupKey {
    std::optional<PlacementMode> placement;
    std::optional<LabelMode> label;

    bool operator==(const GroupKey&) const = default;
    auto operator<=>(const GroupKey&) const = default;
};

std::string group_name(const GroupKey& key);

struct GroupSummary {
    GroupKey key;
    double mean = 0.0;  // back-transformed
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
    std::size_t participants = 0;
};

struct SummaryTable {
    Measure measure = Measure::time;
    BoxCoxModel model;
    std::vector<GroupSummary> groups;  // ordered by key
};

struct SummaryOptions {
    Grouping grouping = Grouping::condition;
    std::size_t resamples = 2000;
    std::uint64_t seed = 0;
    std::size_t min_group_size = 10;
    bool include_practice = false;
    Exec exec = Exec::parallel;
};

/// Completed results only. One Box-Cox model over all included
/// observations; group means and percentile bootstrap bounds (participants
/// resampled, then their observations) are computed in transformed space and
/// back-transformed.
SummaryTable group_summary(std::span<const TaskResult> results, Measure measure, const SummaryOptions& options = {});

struct SignificanceRow {
    std::string measure;  // a Measure name, or a questionnaire item id
    std::string test;     // "mann-whitney" or "kruskal-wallis"
    std::string scope;    // e.g. "label=shape"
    std::vector<std::string> groups;
    std::vector<std::size_t> group_sizes;
    double statistic = 0.0;
    double p = 1.0;
    bool significant = false;
};

struct SignificanceReport {
    double alpha = 0.05;
    std::vector<SignificanceRow> rows;

    const SignificanceRow* find(std::string_view measure, std::string_view test, std::string_view scope) const;
};

/// Mann-Whitney between placements within each label, Kruskal-Wallis across
/// labels within each placement (per measure), and Kruskal-Wallis across
/// label modes for every numeric Q1/Q2 item.
SignificanceReport significance_report(std::span<const TaskResult> results,
                                       std::span<const QuestionnaireResponse> questionnaires = {},
                                       double alpha = 0.05, bool include_practice = false);

/// Aligned text: one row per (measure, label), one column per placement.
std::string format_summary(std::span<const SummaryTable> tables);
std::string format_significance(const SignificanceReport& report);

nlohmann::json summary_to_json(std::span<const SummaryTable> tables);
nlohmann::json significance_to_json(const SignificanceReport& report);

}  // namespace timbremap
