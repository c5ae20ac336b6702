#include "hhc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "hhc/parallel.hpp"
#include "hhc/stats.hpp"

namespace hhc {

int DesignMatrix::column(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return static_cast<int>(j);
    return -1;
}

void DesignMatrix::check_full_rank(double tol) const {
    if (!X.allFinite()) throw NumericError("design matrix contains non-finite entries");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(tol);
    const int r = static_cast<int>(qr.rank());
    if (r < p()) {
        // pivoted-away trailing columns are the collinear suspects
        const auto& perm = qr.colsPermutation().indices();
        std::ostringstream oss;
        oss << "design matrix rank " << r << " < " << p() << "; collinear columns:";
        for (int j = r; j < p(); ++j) {
            int col = perm(j);
            oss << ' ' << (col < static_cast<int>(names.size()) ? names[col] : std::to_string(col));
        }
        throw NumericError(oss.str());
    }
}

DesignMatrix DesignMatrix::subset(const std::vector<int>& rows) const {
    DesignMatrix out;
    out.names = names;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    out.cluster_ids.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
        out.cluster_ids[i] = cluster_ids.empty() ? static_cast<int>(i) : cluster_ids[rows[i]];
    }
    return out;
}

Eigen::MatrixXd qr_solve(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                         Eigen::MatrixXd* xtx_inverse, double rank_tol) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    const int p = static_cast<int>(X.cols());
    const Eigen::MatrixXd R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    double dmax = 0.0;
    for (int j = 0; j < p; ++j) dmax = std::max(dmax, std::abs(R(j, j)));
    for (int j = 0; j < p; ++j) {
        if (std::abs(R(j, j)) <= rank_tol * dmax)
            throw NumericError("rank-deficient design in least squares solve");
    }
    if (xtx_inverse) {
        Eigen::MatrixXd rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
        *xtx_inverse = rinv * rinv.transpose();
    }
    return qr.solve(Y);
}

Eigen::VectorXd SystemFit::stacked() const {
    const int p = static_cast<int>(beta.rows());
    const int J = static_cast<int>(beta.cols());
    Eigen::VectorXd out(p * J);
    for (int e = 0; e < J; ++e) out.segment(e * p, p) = beta.col(e);
    return out;
}

double SystemFit::se_cluster(int eq, int col) const {
    const int p = static_cast<int>(beta.rows());
    return std::sqrt(vcov_cluster(eq * p + col, eq * p + col));
}

std::vector<std::vector<int>> cluster_rows(const std::vector<int>& cluster_ids) {
    std::vector<std::vector<int>> groups;
    std::unordered_map<int, int> index;
    index.reserve(cluster_ids.size());
    for (std::size_t i = 0; i < cluster_ids.size(); ++i) {
        auto [it, inserted] = index.try_emplace(cluster_ids[i], static_cast<int>(groups.size()));
        if (inserted) groups.emplace_back();
        groups[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(i));
    }
    return groups;
}

SystemFit fit_system(const Eigen::MatrixXd& Y, const DesignMatrix& X,
                     const std::vector<std::string>& eq_names, const FitOptions& opts) {
    const int n = X.n();
    const int p = X.p();
    const int J = static_cast<int>(Y.cols());
    if (Y.rows() != n) throw NumericError("fit_system: Y rows != X rows");
    if (n <= p) throw NumericError("fit_system: need n > p");
    if (!Y.allFinite()) throw NumericError("fit_system: non-finite outcomes");
    if (opts.check_rank) X.check_full_rank();

    SystemFit fit;
    fit.eq_names = eq_names;
    fit.coef_names = X.names;
    fit.n_obs = n;
    fit.beta = qr_solve(X.X, Y, &fit.xtx_inverse);
    fit.residuals = Y - X.X * fit.beta;
    fit.sigma = fit.residuals.transpose() * fit.residuals / static_cast<double>(n);

    std::vector<int> ids = X.cluster_ids;
    if (ids.empty()) {
        ids.resize(static_cast<std::size_t>(n));
        std::iota(ids.begin(), ids.end(), 0);
    }
    const auto groups = cluster_rows(ids);
    fit.n_clusters = static_cast<int>(groups.size());

    if (opts.compute_vcov) {
        // stacked sandwich: meat from household-summed scores
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p * J, p * J);
        Eigen::VectorXd s(p * J);
        for (const auto& g : groups) {
            s.setZero();
            for (int row : g) {
                for (int e = 0; e < J; ++e)
                    s.segment(e * p, p) += X.X.row(row).transpose() * fit.residuals(row, e);
            }
            meat.selfadjointView<Eigen::Lower>().rankUpdate(s);
        }
        meat = meat.selfadjointView<Eigen::Lower>();
        if (opts.small_sample_adjust && fit.n_clusters > 1) {
            meat *= static_cast<double>(fit.n_clusters) / (fit.n_clusters - 1.0);
        }
        fit.vcov_cluster.resize(p * J, p * J);
        for (int e = 0; e < J; ++e) {
            for (int f = 0; f < J; ++f) {
                fit.vcov_cluster.block(e * p, f * p, p, p) =
                    fit.xtx_inverse * meat.block(e * p, f * p, p, p) * fit.xtx_inverse;
            }
        }
    }
    return fit;
}

FirstStage control_function_stage(const Eigen::VectorXd& endogenous, const DesignMatrix& design,
                                  const std::vector<std::string>& instrument_names) {
    const int n = design.n();
    const int p = design.p();
    if (endogenous.size() != n) throw NumericError("control_function_stage: size mismatch");
    std::vector<int> icols;
    for (const auto& nm : instrument_names) {
        int c = design.column(nm);
        if (c < 0) throw NumericError("control_function_stage: instrument column missing: " + nm);
        icols.push_back(c);
    }
    if (icols.empty()) throw NumericError("control_function_stage: no instruments given");

    FirstStage fs;
    fs.n_excluded = static_cast<int>(icols.size());
    Eigen::MatrixXd beta = qr_solve(design.X, endogenous);
    fs.coefs = beta.col(0);
    fs.fitted = design.X * fs.coefs;
    fs.residuals = endogenous - fs.fitted;
    const double rss_u = fs.residuals.squaredNorm();

    // restricted fit without the instrument block
    Eigen::MatrixXd Xr(n, p - fs.n_excluded);
    int k = 0;
    for (int j = 0; j < p; ++j) {
        if (std::find(icols.begin(), icols.end(), j) != icols.end()) continue;
        Xr.col(k++) = design.X.col(j);
    }
    Eigen::MatrixXd br = qr_solve(Xr, endogenous);
    const double rss_r = (endogenous - Xr * br).squaredNorm();
    const double df_u = static_cast<double>(n - p);
    if (df_u <= 0 || rss_u <= 0.0) {
        fs.f_excluded = std::numeric_limits<double>::infinity();
    } else {
        fs.f_excluded = ((rss_r - rss_u) / fs.n_excluded) / (rss_u / df_u);
    }
    return fs;
}

Restriction linear_restriction(int index, double target, int /*dim*/) {
    Restriction r;
    r.value = [index, target](const Eigen::VectorXd& th) { return th(index) - target; };
    r.gradient = [index](const Eigen::VectorXd& th) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(th.size());
        g(index) = 1.0;
        return g;
    };
    return r;
}

Restriction product_restriction(int a1, int a2, int s1, int s2) {
    Restriction r;
    r.value = [=](const Eigen::VectorXd& th) { return th(a1) * th(s2) - th(a2) * th(s1); };
    r.gradient = [=](const Eigen::VectorXd& th) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(th.size());
        g(a1) += th(s2);
        g(s2) += th(a1);
        g(a2) -= th(s1);
        g(s1) -= th(a2);
        return g;
    };
    return r;
}

WaldResult wald_nonlinear(const SystemFit& fit, const std::vector<Restriction>& restrictions) {
    const int q = static_cast<int>(restrictions.size());
    if (q == 0) throw NumericError("wald_nonlinear: empty restriction set");
    if (fit.vcov_cluster.size() == 0) throw NumericError("wald_nonlinear: fit lacks vcov");
    const Eigen::VectorXd th = fit.stacked();

    Eigen::VectorXd R(q);
    Eigen::MatrixXd G(q, th.size());
    for (int i = 0; i < q; ++i) {
        R(i) = restrictions[i].value(th);
        G.row(i) = restrictions[i].gradient(th).transpose();
    }
    if (!R.allFinite() || !G.allFinite())
        throw NumericError("wald_nonlinear: non-finite restriction or gradient");

    Eigen::MatrixXd omega = G * fit.vcov_cluster * G.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(omega);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
        throw NumericError("degenerate restriction covariance");
    }
    WaldResult out;
    out.statistic = R.dot(ldlt.solve(R));
    out.df = q;
    out.p_asymptotic = chi2_sf(out.statistic, q);
    out.restriction_values = R;
    return out;
}

namespace {

struct RepOutcome {
    double stat = 0.0;
    int redraws = 0;
    bool failed = false;
};

RepOutcome run_one_rep(const std::vector<std::vector<int>>& groups, const StatProcedure& proc,
                       RngStream stream, int max_redraw) {
    const std::size_t G = groups.size();
    RepOutcome out;
    std::vector<int> rows;
    for (int attempt = 0; attempt <= max_redraw; ++attempt) {
        rows.clear();
        for (std::size_t g = 0; g < G; ++g) {
            const auto& grp = groups[stream.uniform_index(G)];
            rows.insert(rows.end(), grp.begin(), grp.end());
        }
        auto val = proc(rows, stream);
        if (val.has_value()) {
            out.stat = *val;
            return out;
        }
        ++out.redraws;
    }
    out.failed = true;
    return out;
}

BootstrapResult bootstrap_impl(double observed, const std::vector<int>& cluster_ids,
                               const StatProcedure& proc, const BootstrapOptions& opts,
                               bool force_serial) {
    if (opts.B < 99) throw ConfigError("bootstrap requires B >= 99");
    const auto groups = cluster_rows(cluster_ids);
    if (groups.empty()) throw NumericError("bootstrap: empty sample");

    BootstrapResult res;
    res.observed = observed;
    res.replicates.assign(static_cast<std::size_t>(opts.B), 0.0);
    std::vector<int> redraws(static_cast<std::size_t>(opts.B), 0);
    std::vector<char> failed(static_cast<std::size_t>(opts.B), 0);

    RngStream master(opts.seed, 0x626F6F74ull); // "boot"
    const int threads = force_serial ? 1 : opts.threads;
    parallel_for(static_cast<std::size_t>(opts.B), threads, [&](std::size_t b) {
        RepOutcome rep = run_one_rep(groups, proc, master.substream(b), opts.max_redraw_per_rep);
        res.replicates[b] = rep.stat;
        redraws[b] = rep.redraws;
        failed[b] = rep.failed ? 1 : 0;
    });

    res.redraws = std::accumulate(redraws.begin(), redraws.end(), 0);
    const int nfail = std::accumulate(failed.begin(), failed.end(), 0);
    if (nfail > 0) throw NumericError("bootstrap: replication failed after max redraws");
    if (res.redraws > opts.B / 10)
        throw NumericError("bootstrap: more than 10% of replications redrawn");

    int count = 0;
    for (double w : res.replicates)
        if (w >= observed) ++count;
    res.p_value = (1.0 + count) / (opts.B + 1.0);
    return res;
}

} // namespace

BootstrapResult cluster_bootstrap(double observed, const std::vector<int>& cluster_ids,
                                  const StatProcedure& proc, const BootstrapOptions& opts) {
    return bootstrap_impl(observed, cluster_ids, proc, opts, false);
}

BootstrapResult cluster_bootstrap_serial(double observed, const std::vector<int>& cluster_ids,
                                         const StatProcedure& proc, const BootstrapOptions& opts) {
    return bootstrap_impl(observed, cluster_ids, proc, opts, true);
}

} // namespace hhc
