#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trendrank/bigram.hpp"
#include "trendrank/errors.hpp"
#include "trendrank/ranking.hpp"
#include "trendrank/yearmonth.hpp"

namespace trendrank {

/// Least-squares slope of a series against positions 1..N.
inline double interest_slope(const std::vector<double>& values) {
    const auto n = values.size();
    if (n < 2) throw InsufficientFuture("series", static_cast<int>(n));
    double x_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x_mean += static_cast<double>(i + 1);
        y_mean += values[i];
    }
    x_mean /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i + 1) - x_mean;
        num += dx * (values[i] - y_mean);
        den += dx * dx;
    }
    return num / den;
}

/// Monthly search-interest values for one keyword.
struct InterestSeries {
    Bigram keyword;
    std::map<YearMonth, double> points;
};

/// All keyword series from one interest file.
struct InterestData {
    std::map<std::string, InterestSeries> by_keyword;

    const InterestSeries& series_for(const Bigram& keyword) const {
        auto it = by_keyword.find(keyword.key());
        if (it == by_keyword.end()) throw MissingSeries(keyword.key());
        return it->second;
    }
};

/// CSV rows "month,keyword,interest" with a header line.
inline InterestData parse_interest_csv(const std::string& text) {
    InterestData data;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("month,", 0) == 0) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw MalformedRecord(line_no, "expected three fields");
        const auto month = try_parse_year_month(line.substr(0, c1));
        if (!month) throw MalformedRecord(line_no, "bad month: " + line.substr(0, c1));
        const std::string keyword = line.substr(c1 + 1, c2 - c1 - 1);
        const auto bigram = try_parse_bigram(keyword);
        if (!bigram) throw MalformedRecord(line_no, "keyword is not a bigram: " + keyword);
        double value = 0.0;
        try {
            value = std::stod(line.substr(c2 + 1));
        } catch (const std::exception&) {
            throw MalformedRecord(line_no, "bad interest value");
        }
        auto& series = data.by_keyword[keyword];
        series.keyword = *bigram;
        series.points[*month] = value;
    }
    return data;
}

inline InterestData load_interest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadablePath(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_interest_csv(buf.str());
}

/// Pointwise mean of two keyword series over the months both cover.
inline InterestSeries pair_interest(const InterestSeries& a, const InterestSeries& b) {
    InterestSeries out;
    out.keyword = a.keyword;
    for (const auto& [month, va] : a.points) {
        auto it = b.points.find(month);
        if (it != b.points.end()) out.points[month] = 0.5 * (va + it->second);
    }
    if (out.points.empty()) throw NoOverlap();
    return out;
}

/// Slope of the N interest values starting at `start` inclusive.
inline double series_slope(const InterestSeries& series, YearMonth start, int n) {
    if (n < 2) throw InsufficientFuture(start.str(), n);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto it = series.points.find(start.plus(i));
        if (it == series.points.end()) throw InsufficientFuture(start.str(), n);
        values.push_back(it->second);
    }
    return interest_slope(values);
}

struct GoldInstance {
    PairKey pair;
    YearMonth month{};
    double slope = 0.0;
    bool label = false;
};

struct GoldStandard {
    int horizon = 0;
    std::vector<GoldInstance> instances;

    const GoldInstance* find(const PairKey& pair, YearMonth month) const {
        for (const auto& g : instances)
            if (g.pair == pair && g.month == month) return &g;
        return nullptr;
    }
};

/// Gold standard over every pool pair and verdict month: the label for month
/// m is whether the pair's interest slope over months m+1..m+N is positive.
inline GoldStandard build_gold(const InterestData& data, const std::vector<PairKey>& pairs,
                               const std::vector<YearMonth>& months, int horizon) {
    if (horizon < 2) throw ConfigError("gold horizon must be at least 2 months");
    GoldStandard gold;
    gold.horizon = horizon;
    for (const auto& pair : pairs) {
        const auto series =
            pair_interest(data.series_for(pair.a), data.series_for(pair.b));
        for (const auto& month : months) {
            bool complete = true;
            for (int i = 1; i <= horizon; ++i)
                if (!series.points.count(month.plus(i))) {
                    complete = false;
                    break;
                }
            if (!complete) continue;
            GoldInstance g;
            g.pair = pair;
            g.month = month;
            g.slope = series_slope(series, month.plus(1), horizon);
            g.label = g.slope > 0.0;
            gold.instances.push_back(std::move(g));
        }
    }
    return gold;
}

struct Confusion {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Zero denominators fall back to 0 rather than NaN.
inline ClassMetrics class_metrics(long tp, long fp, long fn) {
    ClassMetrics m;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

struct EvalMetrics {
    Confusion confusion;
    ClassMetrics true_class;   // the "emerging" class
    ClassMetrics false_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
};

/// Macro scores are unweighted means over the two classes; the macro F1 is
/// the mean of the per-class F1 scores, not a harmonic of the macros.
inline EvalMetrics metrics_from_confusion(const Confusion& c) {
    if (c.total() == 0) throw EmptyEvaluation();
    EvalMetrics m;
    m.confusion = c;
    m.true_class = class_metrics(c.tp, c.fp, c.fn);
    m.false_class = class_metrics(c.tn, c.fn, c.fp);
    m.macro_precision = 0.5 * (m.true_class.precision + m.false_class.precision);
    m.macro_recall = 0.5 * (m.true_class.recall + m.false_class.recall);
    m.macro_f1 = 0.5 * (m.true_class.f1 + m.false_class.f1);
    return m;
}

/// One scored instance: a system verdict joined to its gold label.
struct EvalInstance {
    PairKey pair;
    YearMonth month{};
    bool predicted = false;
    bool label = false;
    std::optional<long> delta;
};

struct ClassifyResult {
    EvalMetrics metrics;
    std::vector<EvalInstance> instances;
    long dropped = 0;  // verdicts without a gold label
};

/// Joins verdicts to gold by (pair, month) and scores the classification.
/// Verdicts without a gold label are dropped and counted.
inline ClassifyResult classify(const std::vector<DetectionVerdict>& verdicts,
                               const GoldStandard& gold) {
    std::map<std::pair<std::string, std::string>, const GoldInstance*> by_key;
    for (const auto& g : gold.instances) by_key[{g.pair.key(), g.month.str()}] = &g;

    ClassifyResult result;
    Confusion c;
    for (const auto& v : verdicts) {
        auto it = by_key.find({v.pair.key(), v.month.str()});
        if (it == by_key.end()) {
            ++result.dropped;
            continue;
        }
        EvalInstance inst;
        inst.pair = v.pair;
        inst.month = v.month;
        inst.predicted = v.emerging;
        inst.label = it->second->label;
        inst.delta = v.delta;
        if (inst.predicted && inst.label) ++c.tp;
        else if (inst.predicted && !inst.label) ++c.fp;
        else if (!inst.predicted && inst.label) ++c.fn;
        else ++c.tn;
        result.instances.push_back(std::move(inst));
    }
    result.metrics = metrics_from_confusion(c);
    return result;
}

/// Baseline that predicts "emerging" for every instance.
inline EvalMetrics zero_rule(const GoldStandard& gold) {
    if (gold.instances.empty()) throw EmptyEvaluation();
    Confusion c;
    for (const auto& g : gold.instances) (g.label ? c.tp : c.fp)++;
    return metrics_from_confusion(c);
}

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

inline double instance_score(const EvalInstance& inst) {
    return inst.delta ? static_cast<double>(*inst.delta)
                      : -std::numeric_limits<double>::infinity();
}

/// ROC curve from sweeping the distinct delta scores in descending order;
/// instances with an undefined delta score negative infinity.
inline std::vector<RocPoint> roc_points(const std::vector<EvalInstance>& instances) {
    if (instances.empty()) throw EmptyEvaluation();
    long positives = 0, negatives = 0;
    for (const auto& inst : instances) (inst.label ? positives : negatives)++;
    if (positives == 0 || negatives == 0) throw SingleClassGold();

    std::vector<std::pair<double, bool>> scored;
    scored.reserve(instances.size());
    for (const auto& inst : instances) scored.emplace_back(instance_score(inst), inst.label);
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<RocPoint> points;
    points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < scored.size()) {
        const double score = scored[i].first;
        while (i < scored.size() && scored[i].first == score) {
            (scored[i].second ? tp : fp)++;
            ++i;
        }
        points.push_back({score, static_cast<double>(fp) / static_cast<double>(negatives),
                          static_cast<double>(tp) / static_cast<double>(positives)});
    }
    return points;
}

/// Trapezoidal area under the ROC curve.
inline double roc_auc(const std::vector<EvalInstance>& instances) {
    const auto points = roc_points(instances);
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].fpr - points[i - 1].fpr) * 0.5 *
                (points[i].tpr + points[i - 1].tpr);
    return area;
}

}  // namespace trendrank
