#ifndef OVTSIM_ANALYTICS_HPP
#define OVTSIM_ANALYTICS_HPP

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "ovtsim/features.hpp"
#include "ovtsim/types.hpp"

namespace ovtsim {

using Column = Eigen::VectorXd;

struct ClassSummary {
    std::string feature;
    ClassLabel cls = ClassLabel::No_attempt;
    Scalar min = 0;
    Scalar mean = 0;
    Scalar max = 0;
    Scalar sigma = 0;  // population standard deviation
    std::size_t n = 0;
};

// One summary per (numeric feature, class) pair with at least one row.
std::vector<ClassSummary> class_stats(const std::vector<FeatureRow>& rows);

// (x - min) / (max - min); a constant column maps to all zeros.
Column minmax_scale(const Column& column);

struct HistogramResult {
    Eigen::VectorXd edges;   // n_bins + 1 values
    Eigen::VectorXi counts;  // right-closed last bin
};
HistogramResult histogram(const Column& column, int n_bins);

struct BoxStats {
    Scalar q1 = 0;
    Scalar median = 0;
    Scalar q3 = 0;
    Scalar whisker_lo = 0;
    Scalar whisker_hi = 0;
    std::vector<Scalar> outliers;  // ascending
};
// Quartiles by linear interpolation, 1.5 IQR whisker fences.
BoxStats boxplot_stats(const Column& column);

// Average ranks for ties, 1-based.
Column mid_ranks(const Column& column);

// Pearson correlation of mid-ranks. Throws DegenerateColumnError when either
// input is constant.
Scalar spearman(const Column& x, const Column& y);

// Two-sided p for a rank correlation via the t approximation with n-2 dof.
Scalar p_value_spearman(Scalar rho, int n);

// Regularized special functions used for the p-values.
Scalar incomplete_beta(Scalar a, Scalar b, Scalar x);
Scalar incomplete_gamma_p(Scalar a, Scalar x);
Scalar student_t_two_sided_p(Scalar t, Scalar dof);
Scalar chi_squared_sf(Scalar x, Scalar dof);
Scalar f_dist_sf(Scalar f, Scalar d1, Scalar d2);

// sqrt of the between-group share of variance, in [0, 1].
Scalar correlation_ratio(const Column& categories, const Column& values);

// Bias-uncorrected Cramer's V, in [0, 1].
Scalar cramers_v(const Column& a, const Column& b);

enum class ColumnKind { NUMERIC, CATEGORICAL };
enum class AssocMethod { SPEARMAN, CORR_RATIO, CRAMERS_V };

struct AssociationMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd coeff;  // NaN marks an undefined cell
    Eigen::MatrixXd p_values;
    std::vector<std::vector<AssocMethod>> method;
};

// Pairwise association across mixed numeric/categorical columns. With
// cluster=true the columns are reordered so similar profiles sit together.
AssociationMatrix associations(const std::vector<std::string>& names,
                               const std::vector<Column>& columns,
                               const std::vector<ColumnKind>& kinds, bool cluster = false);

// Greedy backward elimination over feature subsets.
//
// Schedule: one baseline call on the full set, then every round with m
// features evaluates all m one-removed subsets and drops the feature whose
// absence keeps accuracy highest, down to a single survivor. Total calls:
// 1 + sum_{m=2..k} m.
using SubsetEvaluator = std::function<Scalar(const std::vector<int>&)>;

struct SbsResult {
    std::vector<int> ranked;                 // most important first
    std::vector<Scalar> ranked_accuracy;     // accuracy of the top-r nested subset
    std::vector<int> removal_order;          // least important first
    std::vector<Scalar> removal_accuracy;    // accuracy right after each removal
    std::size_t evaluator_calls = 0;
};

SbsResult sbs_rank(int n_features, const SubsetEvaluator& evaluator);

// Default evaluator: leave-one-out nearest-centroid accuracy on min-max
// scaled feature columns. Ties resolve to the smallest class index.
Scalar nearest_centroid_loo_accuracy(const Eigen::MatrixXd& features,
                                     const std::vector<int>& labels,
                                     const std::vector<int>& subset);

}  // namespace ovtsim

#endif  // OVTSIM_ANALYTICS_HPP
