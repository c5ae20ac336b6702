#ifndef HHC_ESTIMATION_HPP
#define HHC_ESTIMATION_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hhc/errors.hpp"
#include "hhc/rng.hpp"

namespace hhc {

// Regressor matrix with named columns and household-level cluster ids.
struct DesignMatrix {
    Eigen::MatrixXd X;
    std::vector<std::string> names;
    std::vector<int> cluster_ids; // one per row

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
    int column(const std::string& name) const; // -1 when absent

    // throws NumericError naming the collinear columns
    void check_full_rank(double tol = 1e-9) const;

    // rows gathered by index (with repetition); cluster ids renumbered so
    // each drawn cluster is treated as a new cluster
    DesignMatrix subset(const std::vector<int>& rows) const;
};

// Multi-equation least-squares fit with a shared regressor matrix.
struct SystemFit {
    std::vector<std::string> eq_names;
    std::vector<std::string> coef_names;
    Eigen::MatrixXd beta;         // p x J
    Eigen::MatrixXd residuals;    // n x J
    Eigen::MatrixXd sigma;        // J x J residual cross moments / n
    Eigen::MatrixXd vcov_cluster; // (p*J) x (p*J), equation-major blocks
    Eigen::MatrixXd xtx_inverse;  // p x p
    int n_obs = 0;
    int n_clusters = 0;

    // stacked coefficient vector, equation-major: (eq0 coefs, eq1 coefs, ...)
    Eigen::VectorXd stacked() const;
    double coef(int eq, int col) const { return beta(col, eq); }
    double se_cluster(int eq, int col) const;
};

struct FitOptions {
    bool compute_vcov = true;
    bool check_rank = true;
    bool small_sample_adjust = false; // G/(G-1) on the meat
};

SystemFit fit_system(const Eigen::MatrixXd& Y, const DesignMatrix& X,
                     const std::vector<std::string>& eq_names, const FitOptions& opts = {});

// First stage of a control function: regress `endogenous` on the design
// (which must contain the excluded instruments); returns the residual and
// the homoskedastic F statistic on the instrument block.
struct FirstStage {
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    Eigen::VectorXd coefs;
    double f_excluded = 0.0;
    int n_excluded = 0;
};

FirstStage control_function_stage(const Eigen::VectorXd& endogenous, const DesignMatrix& design,
                                  const std::vector<std::string>& instrument_names);

// Differentiable restriction on the stacked coefficient vector.
struct Restriction {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

Restriction linear_restriction(int index, double target = 0.0, int dim = 0);
// beta[a1]*beta[s2] - beta[a2]*beta[s1] = 0, indices into the stacked vector
Restriction product_restriction(int a1, int a2, int s1, int s2);

struct WaldResult {
    double statistic = 0.0;
    int df = 0;
    double p_asymptotic = 1.0;
    std::optional<double> p_bootstrap;
    Eigen::VectorXd restriction_values;
    int bootstrap_B = 0;
};

WaldResult wald_nonlinear(const SystemFit& fit, const std::vector<Restriction>& restrictions);

// Pairs cluster bootstrap. The procedure receives the resampled row index
// list and a per-replication RNG substream and returns the recentered
// statistic, or nullopt when the resample is unusable (redrawn, counted).
using StatProcedure = std::function<std::optional<double>(const std::vector<int>& rows, RngStream& rng)>;

struct BootstrapResult {
    double observed = 0.0;
    std::vector<double> replicates;
    double p_value = 1.0;
    int redraws = 0;
};

struct BootstrapOptions {
    int B = 1000;
    uint64_t seed = 0;
    int threads = 1;
    int max_redraw_per_rep = 50;
};

// cluster_ids: per-row household id; resampling draws whole clusters with
// replacement. Deterministic given seed, independent of thread count.
BootstrapResult cluster_bootstrap(double observed_statistic, const std::vector<int>& cluster_ids,
                                  const StatProcedure& proc, const BootstrapOptions& opts);

// Plain serial twin of cluster_bootstrap, kept as the reference
// implementation; tests assert bit-identical output.
BootstrapResult cluster_bootstrap_serial(double observed_statistic, const std::vector<int>& cluster_ids,
                                         const StatProcedure& proc, const BootstrapOptions& opts);

// Shared helper: rows of each cluster, clusters ordered by first appearance.
std::vector<std::vector<int>> cluster_rows(const std::vector<int>& cluster_ids);

// Least-squares solve via Householder QR; throws NumericError when the
// R diagonal signals rank deficiency.
Eigen::MatrixXd qr_solve(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         Eigen::MatrixXd* xtx_inverse = nullptr, double rank_tol = 1e-10);

} // namespace hhc

#endif
