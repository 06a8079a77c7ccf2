#include "ovtsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace ovtsim {

namespace {

constexpr Scalar kNaN = std::numeric_limits<Scalar>::quiet_NaN();

Scalar pearson(const Column& x, const Column& y) {
    const Scalar mx = x.mean(), my = y.mean();
    const Eigen::ArrayXd dx = x.array() - mx, dy = y.array() - my;
    const Scalar num = (dx * dy).sum();
    const Scalar den = std::sqrt(dx.square().sum()) * std::sqrt(dy.square().sum());
    return std::clamp(num / den, -1.0, 1.0);
}

Scalar quantile_linear(const std::vector<Scalar>& sorted, Scalar q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const Scalar h = q * static_cast<Scalar>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const Scalar frac = h - static_cast<Scalar>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

bool is_constant(const Column& v) {
    return v.size() == 0 || v.maxCoeff() == v.minCoeff();
}

std::size_t distinct_count(const Column& v) {
    std::set<Scalar> s(v.data(), v.data() + v.size());
    return s.size();
}

}  // namespace

std::vector<ClassSummary> class_stats(const std::vector<FeatureRow>& rows) {
    if (rows.empty()) throw EmptyDatasetError("class_stats needs at least one row");
    std::vector<ClassSummary> out;
    auto summarize = [&](const std::string& name, ClassLabel cls,
                         const std::vector<Scalar>& values) {
        if (values.empty()) return;
        ClassSummary s;
        s.feature = name;
        s.cls = cls;
        s.n = values.size();
        s.min = *std::min_element(values.begin(), values.end());
        s.max = *std::max_element(values.begin(), values.end());
        s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                 static_cast<Scalar>(values.size());
        Scalar ss = 0;
        for (Scalar v : values) ss += (v - s.mean) * (v - s.mean);
        s.sigma = std::sqrt(ss / static_cast<Scalar>(values.size()));
        out.push_back(std::move(s));
    };

    auto collect = [&](const std::string& name, auto getter) {
        for (int c = 0; c < kNumClassLabels; ++c) {
            const ClassLabel cls = static_cast<ClassLabel>(c);
            std::vector<Scalar> values;
            for (const auto& row : rows) {
                if (row.cls == cls) values.push_back(getter(row));
            }
            summarize(name, cls, values);
        }
    };

    collect("WT", [](const FeatureRow& r) { return r.wt; });
    collect("OT", [](const FeatureRow& r) { return r.ot; });
    collect("NV", [](const FeatureRow& r) { return static_cast<Scalar>(r.nv); });
    collect("SE", [](const FeatureRow& r) { return r.se; });
    collect("SP", [](const FeatureRow& r) { return r.sp; });
    collect("DSEP", [](const FeatureRow& r) { return r.dsep; });
    collect("D", [](const FeatureRow& r) { return r.d; });
    collect("OLR", [](const FeatureRow& r) { return r.olr; });
    collect("PREC", [](const FeatureRow& r) { return r.prec; });
    collect("WIND", [](const FeatureRow& r) { return r.wind; });
    collect("FOG", [](const FeatureRow& r) { return r.fog; });
    return out;
}

Column minmax_scale(const Column& column) {
    if (column.size() == 0) throw EmptyDatasetError("minmax_scale needs a non-empty column");
    const Scalar lo = column.minCoeff(), hi = column.maxCoeff();
    if (hi == lo) return Column::Zero(column.size());
    return (column.array() - lo) / (hi - lo);
}

HistogramResult histogram(const Column& column, int n_bins) {
    if (n_bins < 1) throw std::invalid_argument("histogram needs n_bins >= 1");
    if (column.size() == 0) throw EmptyDatasetError("histogram needs a non-empty column");
    const Scalar lo = column.minCoeff(), hi = column.maxCoeff();
    HistogramResult res;
    res.edges = Eigen::VectorXd::LinSpaced(n_bins + 1, lo, hi);
    res.counts = Eigen::VectorXi::Zero(n_bins);
    const Scalar width = (hi - lo) / n_bins;
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        int bin = 0;
        if (width > 0) {
            bin = std::min(static_cast<int>((column[i] - lo) / width), n_bins - 1);
        }
        res.counts[bin] += 1;
    }
    return res;
}

BoxStats boxplot_stats(const Column& column) {
    if (column.size() == 0) throw EmptyDatasetError("boxplot_stats needs a non-empty column");
    std::vector<Scalar> sorted(column.data(), column.data() + column.size());
    std::sort(sorted.begin(), sorted.end());
    BoxStats box;
    box.q1 = quantile_linear(sorted, 0.25);
    box.median = quantile_linear(sorted, 0.5);
    box.q3 = quantile_linear(sorted, 0.75);
    const Scalar iqr = box.q3 - box.q1;
    const Scalar fence_lo = box.q1 - 1.5 * iqr;
    const Scalar fence_hi = box.q3 + 1.5 * iqr;
    box.whisker_lo = box.q1;
    box.whisker_hi = box.q3;
    bool any_in = false;
    for (Scalar v : sorted) {
        if (v >= fence_lo && v <= fence_hi) {
            if (!any_in) box.whisker_lo = v;
            box.whisker_hi = v;
            any_in = true;
        } else {
            box.outliers.push_back(v);
        }
    }
    return box;
}

Column mid_ranks(const Column& column) {
    const Eigen::Index n = column.size();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](Eigen::Index a, Eigen::Index b) { return column[a] < column[b]; });
    Column ranks(n);
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && column[idx[static_cast<std::size_t>(j + 1)]] ==
                                column[idx[static_cast<std::size_t>(i)]]) {
            ++j;
        }
        const Scalar rank = static_cast<Scalar>(i + j) / 2 + 1;
        for (Eigen::Index k = i; k <= j; ++k) ranks[idx[static_cast<std::size_t>(k)]] = rank;
        i = j + 1;
    }
    return ranks;
}

Scalar spearman(const Column& x, const Column& y) {
    if (x.size() != y.size() || x.size() < 3) {
        throw std::invalid_argument("spearman needs two equal-length columns of size >= 3");
    }
    if (is_constant(x) || is_constant(y)) {
        throw DegenerateColumnError("spearman undefined for a constant column");
    }
    const Column rx = mid_ranks(x), ry = mid_ranks(y);
    if ((rx.array() == ry.array()).all()) return 1.0;
    return pearson(rx, ry);
}

Scalar p_value_spearman(Scalar rho, int n) {
    if (n < 4) throw std::invalid_argument("p_value_spearman needs n >= 4");
    if (1.0 - std::abs(rho) < 1e-12) return 0.0;
    const Scalar t = rho * std::sqrt((n - 2) / (1.0 - rho * rho));
    return student_t_two_sided_p(t, n - 2);
}

namespace {

// Continued fraction for the regularized incomplete beta.
Scalar betacf(Scalar a, Scalar b, Scalar x) {
    constexpr int kMaxIter = 300;
    constexpr Scalar kEps = 3e-16, kFpMin = 1e-300;
    const Scalar qab = a + b, qap = a + 1, qam = a - 1;
    Scalar c = 1, d = 1 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1 / d;
    Scalar h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        Scalar aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1 / d;
        const Scalar del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

Scalar incomplete_beta(Scalar a, Scalar b, Scalar x) {
    if (a <= 0 || b <= 0) throw std::invalid_argument("incomplete_beta needs a, b > 0");
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    const Scalar ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const Scalar bt = std::exp(ln_bt);
    if (x < (a + 1) / (a + b + 2)) return bt * betacf(a, b, x) / a;
    return 1 - bt * betacf(b, a, 1 - x) / b;
}

Scalar incomplete_gamma_p(Scalar a, Scalar x) {
    if (a <= 0 || x < 0) throw std::invalid_argument("incomplete_gamma_p needs a > 0, x >= 0");
    if (x == 0) return 0;
    if (x < a + 1) {
        Scalar ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 3e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    Scalar b = x + 1 - a, c = 1e300, d = 1 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const Scalar an = -static_cast<Scalar>(i) * (static_cast<Scalar>(i) - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1 / d;
        const Scalar del = d * c;
        h *= del;
        if (std::abs(del - 1) < 3e-16) break;
    }
    return 1 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

Scalar student_t_two_sided_p(Scalar t, Scalar dof) {
    return incomplete_beta(dof / 2, 0.5, dof / (dof + t * t));
}

Scalar chi_squared_sf(Scalar x, Scalar dof) {
    if (x <= 0) return 1;
    return 1 - incomplete_gamma_p(dof / 2, x / 2);
}

Scalar f_dist_sf(Scalar f, Scalar d1, Scalar d2) {
    if (f <= 0) return 1;
    return incomplete_beta(d2 / 2, d1 / 2, d2 / (d2 + d1 * f));
}

Scalar correlation_ratio(const Column& categories, const Column& values) {
    if (categories.size() != values.size() || values.size() == 0) {
        throw std::invalid_argument("correlation_ratio needs equal-length columns");
    }
    if (is_constant(values)) {
        throw DegenerateColumnError("correlation_ratio undefined for constant values");
    }
    std::map<Scalar, std::pair<Scalar, std::size_t>> groups;  // sum, count
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        auto& g = groups[categories[i]];
        g.first += values[i];
        g.second += 1;
    }
    const Scalar grand = values.mean();
    Scalar ss_between = 0;
    for (const auto& [cat, g] : groups) {
        const Scalar mean = g.first / static_cast<Scalar>(g.second);
        ss_between += static_cast<Scalar>(g.second) * (mean - grand) * (mean - grand);
    }
    const Scalar ss_total = (values.array() - grand).square().sum();
    return std::sqrt(std::clamp(ss_between / ss_total, 0.0, 1.0));
}

Scalar cramers_v(const Column& a, const Column& b) {
    if (a.size() != b.size() || a.size() == 0) {
        throw std::invalid_argument("cramers_v needs equal-length columns");
    }
    std::map<Scalar, int> la, lb;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        la.emplace(a[i], 0);
        lb.emplace(b[i], 0);
    }
    int next = 0;
    for (auto& [k, v] : la) v = next++;
    next = 0;
    for (auto& [k, v] : lb) v = next++;
    const std::size_t r = la.size(), c = lb.size();
    if (r < 2 || c < 2) {
        throw DegenerateColumnError("cramers_v undefined for a single-level column");
    }
    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r),
                                                  static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        table(la[a[i]], lb[b[i]]) += 1;
    }
    const Scalar n = static_cast<Scalar>(a.size());
    const Eigen::VectorXd row_sum = table.rowwise().sum();
    const Eigen::VectorXd col_sum = table.colwise().sum();
    Scalar chi2 = 0;
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.cols(); ++j) {
            const Scalar expected = row_sum[i] * col_sum[j] / n;
            if (expected > 0) {
                const Scalar diff = table(i, j) - expected;
                chi2 += diff * diff / expected;
            }
        }
    }
    const Scalar denom = n * static_cast<Scalar>(std::min(r, c) - 1);
    return std::sqrt(std::clamp(chi2 / denom, 0.0, 1.0));
}

namespace {

Scalar cat_cat_p(const Column& a, const Column& b) {
    std::map<Scalar, int> la, lb;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        la.emplace(a[i], 0);
        lb.emplace(b[i], 0);
    }
    int next = 0;
    for (auto& [k, v] : la) v = next++;
    next = 0;
    for (auto& [k, v] : lb) v = next++;
    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(la.size()),
                                                  static_cast<Eigen::Index>(lb.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) table(la[a[i]], lb[b[i]]) += 1;
    const Scalar n = static_cast<Scalar>(a.size());
    const Eigen::VectorXd row_sum = table.rowwise().sum();
    const Eigen::VectorXd col_sum = table.colwise().sum();
    Scalar chi2 = 0;
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.cols(); ++j) {
            const Scalar expected = row_sum[i] * col_sum[j] / n;
            if (expected > 0) {
                const Scalar diff = table(i, j) - expected;
                chi2 += diff * diff / expected;
            }
        }
    }
    const Scalar dof = static_cast<Scalar>((table.rows() - 1) * (table.cols() - 1));
    if (dof <= 0) return 1;
    return chi_squared_sf(chi2, dof);
}

Scalar cat_num_p(const Column& categories, const Column& values) {
    std::map<Scalar, std::pair<Scalar, std::size_t>> groups;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        auto& g = groups[categories[i]];
        g.first += values[i];
        g.second += 1;
    }
    const std::size_t k = groups.size();
    const std::size_t n = static_cast<std::size_t>(values.size());
    if (k < 2 || n <= k) return 1;
    const Scalar grand = values.mean();
    Scalar ss_between = 0;
    for (const auto& [cat, g] : groups) {
        const Scalar mean = g.first / static_cast<Scalar>(g.second);
        ss_between += static_cast<Scalar>(g.second) * (mean - grand) * (mean - grand);
    }
    const Scalar ss_total = (values.array() - grand).square().sum();
    const Scalar ss_within = std::max(0.0, ss_total - ss_between);
    if (ss_within <= 0) return 0;
    const Scalar f = (ss_between / static_cast<Scalar>(k - 1)) /
                     (ss_within / static_cast<Scalar>(n - k));
    return f_dist_sf(f, static_cast<Scalar>(k - 1), static_cast<Scalar>(n - k));
}

std::vector<std::size_t> cluster_order(const Eigen::MatrixXd& coeff) {
    const std::size_t n = static_cast<std::size_t>(coeff.rows());
    Eigen::MatrixXd sim = coeff.cwiseAbs();
    for (Eigen::Index i = 0; i < sim.rows(); ++i) {
        for (Eigen::Index j = 0; j < sim.cols(); ++j) {
            if (std::isnan(sim(i, j))) sim(i, j) = 0;
        }
    }
    // Greedy chain: seed with the strongest pair, then keep appending the
    // column most similar to the chain's tail.
    std::size_t si = 0, sj = 1;
    Scalar best = -1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > best) {
                best = sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                si = i;
                sj = j;
            }
        }
    }
    std::vector<std::size_t> order = {si, sj};
    std::vector<bool> used(n, false);
    used[si] = used[sj] = true;
    while (order.size() < n) {
        const std::size_t tail = order.back();
        std::size_t pick = n;
        Scalar pick_sim = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j]) continue;
            const Scalar s = sim(static_cast<Eigen::Index>(tail), static_cast<Eigen::Index>(j));
            if (s > pick_sim) {
                pick_sim = s;
                pick = j;
            }
        }
        used[pick] = true;
        order.push_back(pick);
    }
    return order;
}

}  // namespace

AssociationMatrix associations(const std::vector<std::string>& names,
                               const std::vector<Column>& columns,
                               const std::vector<ColumnKind>& kinds, bool cluster) {
    const std::size_t n = names.size();
    if (columns.size() != n || kinds.size() != n) {
        throw std::invalid_argument("associations needs aligned names/columns/kinds");
    }
    AssociationMatrix out;
    out.labels = names;
    out.coeff = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n), kNaN);
    out.p_values = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                             static_cast<Eigen::Index>(n), kNaN);
    out.method.assign(n, std::vector<AssocMethod>(n, AssocMethod::SPEARMAN));

    std::vector<bool> degenerate(n);
    for (std::size_t i = 0; i < n; ++i) degenerate[i] = distinct_count(columns[i]) < 2;

    for (std::size_t i = 0; i < n; ++i) {
        const bool cat_i = kinds[i] == ColumnKind::CATEGORICAL;
        out.method[i][i] = cat_i ? AssocMethod::CRAMERS_V : AssocMethod::SPEARMAN;
        out.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        out.p_values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            AssocMethod method;
            Scalar coeff = kNaN, p = kNaN;
            const bool cat_i = kinds[i] == ColumnKind::CATEGORICAL;
            const bool cat_j = kinds[j] == ColumnKind::CATEGORICAL;
            if (cat_i && cat_j) {
                method = AssocMethod::CRAMERS_V;
            } else if (!cat_i && !cat_j) {
                method = AssocMethod::SPEARMAN;
            } else {
                method = AssocMethod::CORR_RATIO;
            }
            if (!degenerate[i] && !degenerate[j]) {
                if (method == AssocMethod::CRAMERS_V) {
                    coeff = cramers_v(columns[i], columns[j]);
                    p = cat_cat_p(columns[i], columns[j]);
                } else if (method == AssocMethod::SPEARMAN) {
                    coeff = spearman(columns[i], columns[j]);
                    p = p_value_spearman(coeff, static_cast<int>(columns[i].size()));
                } else {
                    const std::size_t cat = cat_i ? i : j;
                    const std::size_t num = cat_i ? j : i;
                    coeff = correlation_ratio(columns[cat], columns[num]);
                    p = cat_num_p(columns[cat], columns[num]);
                }
            }
            out.method[i][j] = out.method[j][i] = method;
            out.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = coeff;
            out.coeff(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = coeff;
            out.p_values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p;
            out.p_values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = p;
        }
    }

    if (cluster && n > 2) {
        const std::vector<std::size_t> order = cluster_order(out.coeff);
        AssociationMatrix reordered;
        reordered.labels.resize(n);
        reordered.coeff.resize(out.coeff.rows(), out.coeff.cols());
        reordered.p_values.resize(out.p_values.rows(), out.p_values.cols());
        reordered.method.assign(n, std::vector<AssocMethod>(n, AssocMethod::SPEARMAN));
        for (std::size_t i = 0; i < n; ++i) {
            reordered.labels[i] = out.labels[order[i]];
            for (std::size_t j = 0; j < n; ++j) {
                reordered.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    out.coeff(static_cast<Eigen::Index>(order[i]),
                              static_cast<Eigen::Index>(order[j]));
                reordered.p_values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    out.p_values(static_cast<Eigen::Index>(order[i]),
                                 static_cast<Eigen::Index>(order[j]));
                reordered.method[i][j] = out.method[order[i]][order[j]];
            }
        }
        return reordered;
    }
    return out;
}

SbsResult sbs_rank(int n_features, const SubsetEvaluator& evaluator) {
    if (n_features < 2) throw std::invalid_argument("sbs_rank needs at least 2 features");
    SbsResult res;
    auto evaluate = [&](const std::vector<int>& subset) {
        Scalar acc;
        try {
            acc = evaluator(subset);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "evaluator failed on subset {";
            for (std::size_t i = 0; i < subset.size(); ++i) {
                if (i) os << ',';
                os << subset[i];
            }
            os << "}: " << e.what();
            throw EvaluatorFailure(os.str());
        }
        ++res.evaluator_calls;
        return acc;
    };

    std::vector<int> current(static_cast<std::size_t>(n_features));
    std::iota(current.begin(), current.end(), 0);
    const Scalar full_accuracy = evaluate(current);

    while (current.size() > 1) {
        Scalar best_acc = -1;
        std::size_t best_pos = 0;
        for (std::size_t pos = 0; pos < current.size(); ++pos) {
            std::vector<int> candidate;
            candidate.reserve(current.size() - 1);
            for (std::size_t k = 0; k < current.size(); ++k) {
                if (k != pos) candidate.push_back(current[k]);
            }
            const Scalar acc = evaluate(candidate);
            if (acc > best_acc) {
                best_acc = acc;
                best_pos = pos;
            }
        }
        res.removal_order.push_back(current[best_pos]);
        res.removal_accuracy.push_back(best_acc);
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }

    const int k = n_features;
    res.ranked.push_back(current.front());
    for (auto it = res.removal_order.rbegin(); it != res.removal_order.rend(); ++it) {
        res.ranked.push_back(*it);
    }
    res.ranked_accuracy.resize(static_cast<std::size_t>(k));
    for (int r = 1; r <= k; ++r) {
        res.ranked_accuracy[static_cast<std::size_t>(r - 1)] =
            r == k ? full_accuracy
                   : res.removal_accuracy[static_cast<std::size_t>(k - r - 1)];
    }
    return res;
}

Scalar nearest_centroid_loo_accuracy(const Eigen::MatrixXd& features,
                                     const std::vector<int>& labels,
                                     const std::vector<int>& subset) {
    const Eigen::Index n = features.rows();
    if (n == 0 || labels.size() != static_cast<std::size_t>(n) || subset.empty()) {
        throw std::invalid_argument("nearest_centroid_loo_accuracy needs rows and a subset");
    }
    Eigen::MatrixXd scaled(n, static_cast<Eigen::Index>(subset.size()));
    for (std::size_t c = 0; c < subset.size(); ++c) {
        scaled.col(static_cast<Eigen::Index>(c)) = minmax_scale(features.col(subset[c]));
    }
    std::vector<int> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    int correct = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        int best_class = -1;
        Scalar best_dist = std::numeric_limits<Scalar>::infinity();
        for (int cls : classes) {
            Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(scaled.cols());
            Eigen::Index count = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i || labels[static_cast<std::size_t>(j)] != cls) continue;
                centroid += scaled.row(j);
                ++count;
            }
            if (count == 0) continue;
            centroid /= static_cast<Scalar>(count);
            const Scalar dist = (scaled.row(i) - centroid).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best_class = cls;
            }
        }
        if (best_class == labels[static_cast<std::size_t>(i)]) ++correct;
    }
    return static_cast<Scalar>(correct) / static_cast<Scalar>(n);
}

}  // namespace ovtsim
