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

#include "timbremap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "timbremap/error.hpp"
#include "timbremap/random.hpp"

namespace timbremap {

using json = nlohmann::json;

// --- Box-Cox ----------------------------------------------------------------

namespace {

constexpr double kLambdaSnap = 1e-6;

double transform(double x, double lambda) {
    return lambda == 0.0 ? std::log(x) : (std::pow(x, lambda) - 1.0) / lambda;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double boxcox_log_likelihood(std::span<const double> values, double lambda, double shift) {
    const double n = static_cast<double>(values.size());
    double sum = 0.0, sum_log = 0.0;
    std::vector<double> y(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = values[i] + shift;
        y[i] = transform(x, std::abs(lambda) < kLambdaSnap ? 0.0 : lambda);
        sum += y[i];
        sum_log += std::log(x);
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    return -0.5 * n * std::log(ss / n) + (lambda - 1.0) * sum_log;
}

BoxCoxModel boxcox_fit(std::span<const double> values) {
    require(values.size() >= 10, ErrorKind::insufficient_data,
            "Box-Cox needs at least 10 values, got " + std::to_string(values.size()));
    BoxCoxModel model;
    std::vector<double> positive;
    bool zeros = false;
    for (double v : values) {
        require(std::isfinite(v) && v >= 0.0, ErrorKind::domain, "Box-Cox values must be finite and nonnegative");
        if (v > 0.0) {
            positive.push_back(v);
        } else {
            zeros = true;
        }
    }
    if (zeros) {
        require(!positive.empty(), ErrorKind::domain, "Box-Cox values are all zero");
        model.shift = 1e-6 * median(positive);
    }

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    if (*lo_it == *hi_it) {
        model.lambda = 1.0;
        model.log_likelihood = std::numeric_limits<double>::infinity();
        return model;
    }

    auto llf = [&](double lambda) { return boxcox_log_likelihood(values, lambda, model.shift); };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = -2.0, b = 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = llf(c), fd = llf(d);
    while (b - a > 1e-4) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = llf(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = llf(d);
        }
    }
    double lambda = 0.5 * (a + b);
    if (std::abs(lambda) < kLambdaSnap) lambda = 0.0;
    model.lambda = lambda;
    model.log_likelihood = llf(lambda);
    return model;
}

double boxcox_apply(const BoxCoxModel& model, double x) {
    const double shifted = x + model.shift;
    require(std::isfinite(shifted) && shifted > 0.0, ErrorKind::domain, "Box-Cox input must exceed -shift");
    return transform(shifted, model.lambda);
}

double boxcox_invert(const BoxCoxModel& model, double y) {
    require(std::isfinite(y), ErrorKind::domain, "Box-Cox inverse of a non-finite value");
    if (model.lambda == 0.0) return std::exp(y) - model.shift;
    const double base = model.lambda * y + 1.0;
    require(base > 0.0, ErrorKind::domain, "value outside the Box-Cox transform range");
    return std::pow(base, 1.0 / model.lambda) - model.shift;
}

double skewness(std::span<const double> values) {
    require(!values.empty(), ErrorKind::empty_input, "skewness of no values");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

// --- rank tests -------------------------------------------------------------

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

// Σ (t^3 - t) over tie groups of the sorted values.
double tie_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        total += t * t * t - t;
        i = j + 1;
    }
    return total;
}

}  // namespace

double mann_whitney_exact_p(std::size_t n_a, std::size_t n_b, double u) {
    require(n_a >= 1 && n_b >= 1, ErrorKind::parameter, "both groups must be nonempty");
    const std::size_t max_u = n_a * n_b;
    // count[i][j][u]: arrangements of i a's and j b's with U_a = u, built by
    // appending the largest element: an a beats all j b's, a b adds nothing.
    std::vector<std::vector<std::vector<std::uint64_t>>> count(
        n_a + 1, std::vector<std::vector<std::uint64_t>>(n_b + 1, std::vector<std::uint64_t>(max_u + 1, 0)));
    for (std::size_t i = 0; i <= n_a; ++i) {
        for (std::size_t j = 0; j <= n_b; ++j) {
            if (i == 0 || j == 0) {
                count[i][j][0] = 1;
                continue;
            }
            for (std::size_t v = 0; v <= i * j; ++v) {
                std::uint64_t c = count[i][j - 1][v];
                if (v >= j) c += count[i - 1][j][v - j];
                count[i][j][v] = c;
            }
        }
    }
    const auto& dist = count[n_a][n_b];
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    double below = 0.0, above = 0.0;
    for (std::size_t v = 0; v <= max_u; ++v) {
        if (static_cast<double>(v) <= u) below += static_cast<double>(dist[v]);
        if (static_cast<double>(v) >= u) above += static_cast<double>(dist[v]);
    }
    return std::min(1.0, 2.0 * std::min(below, above) / total);
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    require(!a.empty() && !b.empty(), ErrorKind::parameter, "Mann-Whitney needs two nonempty groups");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    for (double v : pooled) require(std::isfinite(v), ErrorKind::parameter, "non-finite value in Mann-Whitney input");
    const auto ranks = midranks(pooled);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);

    MannWhitneyResult out;
    out.u_a = rank_sum_a - na * (na + 1.0) / 2.0;
    out.u_b = na * nb - out.u_a;
    const double ties = tie_sum(pooled);
    const std::size_t n = pooled.size();
    if (n <= 12 && ties == 0.0) {
        out.exact = true;
        out.p = mann_whitney_exact_p(a.size(), b.size(), out.u_a);
        return out;
    }
    const double N = static_cast<double>(n);
    const double variance = na * nb / 12.0 * ((N + 1.0) - ties / (N * (N - 1.0)));
    if (variance <= 0.0) {
        out.p = 1.0;
        return out;
    }
    const double z = std::max(0.0, std::abs(out.u_a - na * nb / 2.0) - 0.5) / std::sqrt(variance);
    out.p = std::min(1.0, std::erfc(z / std::numbers::sqrt2));
    return out;
}

double regularized_gamma_q(double a, double x) {
    require(a > 0.0 && x >= 0.0, ErrorKind::parameter, "incomplete gamma needs a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    constexpr double eps = 1e-15;
    if (x < a + 1.0) {
        // Series for P(a, x).
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 10000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * eps) break;
        }
        return std::clamp(1.0 - sum * std::exp(log_prefix), 0.0, 1.0);
    }
    // Modified Lentz continued fraction for Q(a, x).
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

double chi_square_sf(double x, double df) {
    require(df > 0.0, ErrorKind::parameter, "chi-square needs df > 0");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(df / 2.0, x / 2.0);
}

KruskalWallisResult kruskal_wallis(std::span<const std::vector<double>> groups) {
    require(groups.size() >= 2, ErrorKind::parameter, "Kruskal-Wallis needs at least two groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        require(!g.empty(), ErrorKind::parameter, "Kruskal-Wallis groups must be nonempty");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    require(pooled.size() >= 5, ErrorKind::parameter, "Kruskal-Wallis needs at least five observations");
    for (double v : pooled) require(std::isfinite(v), ErrorKind::parameter, "non-finite value in Kruskal-Wallis input");

    const auto ranks = midranks(pooled);
    const double N = static_cast<double>(pooled.size());
    const double grand = (N + 1.0) / 2.0;
    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) sum += ranks[offset + i];
        offset += g.size();
        const double ni = static_cast<double>(g.size());
        const double mean = sum / ni;
        h += ni * (mean - grand) * (mean - grand);
    }
    h *= 12.0 / (N * (N + 1.0));

    KruskalWallisResult out;
    out.df = groups.size() - 1;
    const double correction = 1.0 - tie_sum(pooled) / (N * N * N - N);
    if (correction <= 0.0) {
        out.h = 0.0;
        out.p = 1.0;
        return out;
    }
    out.h = h / correction;
    out.p = chi_square_sf(out.h, static_cast<double>(out.df));
    return out;
}

// --- grouped summaries ------------------------------------------------------

std::string_view to_string(Measure m) {
    switch (m) {
        case Measure::time: return "time";
        case Measure::hovered: return "hovered";
        case Measure::distance: return "distance";
    }
    return "time";
}

Measure measure_from_string(std::string_view text) {
    if (text == "time") return Measure::time;
    if (text == "hovered") return Measure::hovered;
    if (text == "distance") return Measure::distance;
    fail(ErrorKind::parameter, "unknown measure '" + std::string(text) + "'");
}

double measure_value(const TaskResult& r, Measure m) {
    switch (m) {
        case Measure::time: return r.completion_time;
        case Measure::hovered: return static_cast<double>(r.hovered_events);
        case Measure::distance: return r.distance;
    }
    return 0.0;
}

std::string group_name(const GroupKey& key) {
    std::string out;
    if (key.placement) out += to_string(*key.placement);
    if (key.placement && key.label) out += "/";
    if (key.label) out += to_string(*key.label);
    return out.empty() ? "all" : out;
}

namespace {

bool included(const TaskResult& r, bool include_practice) {
    if (!r.completed) return false;
    if (!include_practice && r.phase == Phase::practice) return false;
    return true;
}

GroupKey key_for(const TaskResult& r, Grouping grouping) {
    require(r.condition.has_value(), ErrorKind::parameter,
            "result " + r.task_id + " carries no condition; only validated results can be analyzed");
    GroupKey key;
    if (grouping != Grouping::label) key.placement = r.condition->placement;
    if (grouping != Grouping::placement) key.label = r.condition->label;
    return key;
}

double percentile(std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

SummaryTable group_summary(std::span<const TaskResult> results, Measure measure, const SummaryOptions& options) {
    require(options.resamples >= 1, ErrorKind::parameter, "bootstrap needs at least one resample");
    std::vector<const TaskResult*> kept;
    std::vector<double> values;
    for (const auto& r : results) {
        if (!included(r, options.include_practice)) continue;
        kept.push_back(&r);
        values.push_back(measure_value(r, measure));
    }
    require(!kept.empty(), ErrorKind::insufficient_data, "no completed results to summarize");

    SummaryTable table;
    table.measure = measure;
    table.model = boxcox_fit(values);

    // group -> participant -> transformed observations
    std::map<GroupKey, std::map<std::string, std::vector<double>>> grouped;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        grouped[key_for(*kept[i], options.grouping)][kept[i]->participant_id].push_back(
            boxcox_apply(table.model, values[i]));
    }

    std::string sparse;
    for (const auto& [key, by_participant] : grouped) {
        std::size_t n = 0;
        for (const auto& [_, obs] : by_participant) n += obs.size();
        if (n < options.min_group_size) sparse += (sparse.empty() ? "" : ", ") + group_name(key) + " (" + std::to_string(n) + ")";
    }
    require(sparse.empty(), ErrorKind::insufficient_data,
            "groups below " + std::to_string(options.min_group_size) + " observations: " + sparse);

    for (const auto& [key, by_participant] : grouped) {
        kernels::Clusters clusters;
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& [_, obs] : by_participant) {
            clusters.push_back(obs);
            for (double v : obs) sum += v;
            n += obs.size();
        }
        auto means = kernels::cluster_bootstrap_means(clusters, options.resamples,
                                                      derive_seed(options.seed, group_name(key)), options.exec);
        std::sort(means.begin(), means.end());
        const double mean = sum / static_cast<double>(n);
        // The percentile interval of a skewed bootstrap distribution can miss
        // the point estimate by a hair; widen so the interval always holds it.
        const double lo = std::min(percentile(means, 0.025), mean);
        const double hi = std::max(percentile(means, 0.975), mean);

        GroupSummary g;
        g.key = key;
        g.n = n;
        g.participants = by_participant.size();
        g.mean = boxcox_invert(table.model, mean);
        g.ci_low = boxcox_invert(table.model, lo);
        g.ci_high = boxcox_invert(table.model, hi);
        table.groups.push_back(g);
    }
    return table;
}

const SignificanceRow* SignificanceReport::find(std::string_view measure, std::string_view test,
                                                std::string_view scope) const {
    for (const auto& r : rows) {
        if (r.measure == measure && r.test == test && r.scope == scope) return &r;
    }
    return nullptr;
}

SignificanceReport significance_report(std::span<const TaskResult> results,
                                       std::span<const QuestionnaireResponse> questionnaires, double alpha,
                                       bool include_practice) {
    require(alpha > 0.0 && alpha < 1.0, ErrorKind::parameter, "alpha must lie in (0, 1)");
    SignificanceReport report;
    report.alpha = alpha;

    std::set<Condition> conditions;
    std::vector<const TaskResult*> kept;
    for (const auto& r : results) {
        if (!included(r, include_practice)) continue;
        key_for(r, Grouping::condition);
        conditions.insert(*r.condition);
        kept.push_back(&r);
    }
    require(conditions.size() >= 2, ErrorKind::insufficient_data, "significance tests need at least two conditions");

    auto values_for = [&](Condition c, Measure m) {
        std::vector<double> out;
        for (const auto* r : kept) {
            if (*r->condition == c) out.push_back(measure_value(*r, m));
        }
        return out;
    };
    const LabelMode labels[] = {LabelMode::baseline, LabelMode::shape, LabelMode::color, LabelMode::texture};
    const PlacementMode placements[] = {PlacementMode::dr, PlacementMode::random};

    for (Measure m : {Measure::time, Measure::hovered, Measure::distance}) {
        const std::string mname(to_string(m));
        for (LabelMode label : labels) {
            auto dr = values_for({PlacementMode::dr, label}, m);
            auto rnd = values_for({PlacementMode::random, label}, m);
            if (dr.empty() || rnd.empty()) continue;
            const auto mw = mann_whitney_u(dr, rnd);
            report.rows.push_back({mname, "mann-whitney", "label=" + std::string(to_string(label)),
                                   {"dr", "random"}, {dr.size(), rnd.size()}, mw.u_a, mw.p, mw.p < alpha});
        }
        for (PlacementMode placement : placements) {
            std::vector<std::vector<double>> groups;
            SignificanceRow row{mname, "kruskal-wallis", "placement=" + std::string(to_string(placement)), {}, {}, 0, 1, false};
            std::size_t total = 0;
            for (LabelMode label : labels) {
                auto v = values_for({placement, label}, m);
                if (v.empty()) continue;
                row.groups.emplace_back(to_string(label));
                row.group_sizes.push_back(v.size());
                total += v.size();
                groups.push_back(std::move(v));
            }
            if (groups.size() < 2 || total < 5) continue;
            const auto kw = kruskal_wallis(groups);
            row.statistic = kw.h;
            row.p = kw.p;
            row.significant = kw.p < alpha;
            report.rows.push_back(std::move(row));
        }
    }

    // Likert items: compare label modes per (questionnaire, item).
    std::map<std::string, std::map<LabelMode, std::vector<double>>> likert;
    for (const auto& q : questionnaires) {
        if (q.questionnaire == Questionnaire::Q0 || !q.label_mode) continue;
        for (const auto& [item, answer] : q.answers) {
            if (const auto* v = std::get_if<std::int64_t>(&answer)) {
                likert[std::string(to_string(q.questionnaire)) + "/" + item][*q.label_mode].push_back(
                    static_cast<double>(*v));
            }
        }
    }
    for (const auto& [item, by_label] : likert) {
        if (by_label.size() < 2) continue;
        std::vector<std::vector<double>> groups;
        SignificanceRow row{item, "kruskal-wallis", "labels", {}, {}, 0, 1, false};
        std::size_t total = 0;
        for (const auto& [label, v] : by_label) {
            row.groups.emplace_back(to_string(label));
            row.group_sizes.push_back(v.size());
            total += v.size();
            groups.push_back(v);
        }
        if (total < 5) continue;
        const auto kw = kruskal_wallis(groups);
        row.statistic = kw.h;
        row.p = kw.p;
        row.significant = kw.p < alpha;
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string fmt(const char* f, double a, double b, double c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

std::string format_summary(std::span<const SummaryTable> tables) {
    std::ostringstream out;
    const PlacementMode cols[] = {PlacementMode::random, PlacementMode::dr};
    for (const auto& t : tables) {
        out << to_string(t.measure) << "  (Box-Cox lambda = " << fmt("%.4f", t.model.lambda, 0, 0) << ")\n";
        std::set<std::optional<LabelMode>> rows;
        for (const auto& g : t.groups) rows.insert(g.key.label);
        const bool grid = std::all_of(t.groups.begin(), t.groups.end(), [](const GroupSummary& g) { return g.key.placement.has_value(); });
        if (!grid) {
            for (const auto& g : t.groups) {
                out << "  " << pad(group_name(g.key), 18) << fmt("%.3f [%.3f, %.3f]", g.mean, g.ci_low, g.ci_high)
                    << "  n=" << g.n << "\n";
            }
            out << "\n";
            continue;
        }
        out << "  " << pad("label", 12);
        for (auto c : cols) out << pad(std::string(to_string(c)), 32);
        out << "\n";
        for (const auto& label : rows) {
            out << "  " << pad(label ? std::string(to_string(*label)) : "all", 12);
            for (auto c : cols) {
                auto it = std::find_if(t.groups.begin(), t.groups.end(), [&](const GroupSummary& g) {
                    return g.key.label == label && g.key.placement == c;
                });
                out << pad(it == t.groups.end() ? "-" : fmt("%.3f [%.3f, %.3f]", it->mean, it->ci_low, it->ci_high), 32);
            }
            out << "\n";
        }
        out << "\n";
    }
    return out.str();
}

std::string format_significance(const SignificanceReport& report) {
    std::ostringstream out;
    out << pad("measure", 22) << pad("test", 16) << pad("scope", 20) << pad("groups", 30) << pad("statistic", 12)
        << "p\n";
    for (const auto& r : report.rows) {
        std::string groups;
        for (std::size_t i = 0; i < r.groups.size(); ++i) {
            groups += (i ? " vs " : "") + r.groups[i] + "(" + std::to_string(r.group_sizes[i]) + ")";
        }
        std::string p = fmt("%.4g", r.p, 0, 0);
        if (r.significant) p = "**" + p + "**";
        out << pad(r.measure, 22) << pad(r.test, 16) << pad(r.scope, 20) << pad(groups, 30)
            << pad(fmt("%.3f", r.statistic, 0, 0), 12) << p << "\n";
    }
    return out.str();
}

json summary_to_json(std::span<const SummaryTable> tables) {
    json out = json::array();
    for (const auto& t : tables) {
        json groups = json::array();
        for (const auto& g : t.groups) {
            json jg = {{"group", group_name(g.key)}, {"mean", g.mean}, {"ci_low", g.ci_low}, {"ci_high", g.ci_high},
                       {"n", g.n}, {"participants", g.participants}};
            if (g.key.placement) jg["placement_mode"] = std::string(to_string(*g.key.placement));
            if (g.key.label) jg["label_mode"] = std::string(to_string(*g.key.label));
            groups.push_back(std::move(jg));
        }
        out.push_back({{"measure", std::string(to_string(t.measure))},
                       {"boxcox", {{"lambda", t.model.lambda}, {"shift", t.model.shift}}},
                       {"groups", std::move(groups)}});
    }
    return out;
}

json significance_to_json(const SignificanceReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"measure", r.measure}, {"test", r.test}, {"scope", r.scope}, {"groups", r.groups},
                        {"group_sizes", r.group_sizes}, {"statistic", r.statistic}, {"p", r.p},
                        {"significant", r.significant}});
    }
    return {{"alpha", report.alpha}, {"rows", std::move(rows)}};
}

}  // namespace timbremap
