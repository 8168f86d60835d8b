#include "squeezecav/fock_oracle.hpp"

#include "squeezecav/errors.hpp"
#include "squeezecav/rk4.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace squeezecav {

namespace {

void require_dim(int dim) {
    if (dim < 2)
        throw Error(ErrorKind::Size, "Fock basis needs at least 2 levels, got " + std::to_string(dim));
}

// Real generator (u/2)(b^2 - b^dag^2) of the squeeze at phase zero.
Eigen::MatrixXd real_squeeze_generator(double u, int dim) {
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 2; n < dim; ++n) {
        const double amp = 0.5 * u * std::sqrt(static_cast<double>(n) * (n - 1));
        gen(n - 2, n) = amp;  // b^2
        gen(n, n - 2) = -amp; // -b^dag^2
    }
    return gen;
}

std::vector<double> thermal_weights(double n_th, int dim) {
    std::vector<double> w(static_cast<std::size_t>(dim), 0.0);
    if (n_th <= 0.0) {
        w[0] = 1.0;
        return w;
    }
    const double ratio = n_th / (n_th + 1.0);
    double p = 1.0 / (n_th + 1.0);
    double total = 0.0;
    for (int m = 0; m < dim; ++m) {
        w[static_cast<std::size_t>(m)] = p;
        total += p;
        p *= ratio;
    }
    for (double &x : w)
        x /= total;
    return w;
}

} // namespace

// --- FockDensityMatrix -------------------------------------------------------

FockDensityMatrix::FockDensityMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        throw Error(ErrorKind::Size, "density matrix must be square");
    require_dim(static_cast<int>(entries_.rows()));
}

FockDensityMatrix FockDensityMatrix::vacuum(int dim) {
    require_dim(dim);
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(0, 0) = 1.0;
    return FockDensityMatrix(std::move(m));
}

FockDensityMatrix FockDensityMatrix::thermal(double n_th, int dim) {
    require_dim(dim);
    if (!(n_th >= 0.0))
        throw Error(ErrorKind::Domain, "thermal occupation must be >= 0");
    const auto w = thermal_weights(n_th, dim);
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k)
        m(k, k) = w[static_cast<std::size_t>(k)];
    return FockDensityMatrix(std::move(m));
}

double FockDensityMatrix::hermiticity_error() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double FockDensityMatrix::top_population() const {
    const int n = dim();
    return entries_(n - 1, n - 1).real() + entries_(n - 2, n - 2).real();
}

double FockDensityMatrix::purity() const {
    // tr(rho^2) = sum |rho_mn|^2 for Hermitian rho
    return entries_.cwiseAbs2().sum();
}

void FockDensityMatrix::hermitize() {
    ComplexMatrix sym = 0.5 * (entries_ + entries_.adjoint());
    entries_ = std::move(sym);
}

FockDensityMatrix FockDensityMatrix::embedded(int new_dim) const {
    if (new_dim < dim())
        throw Error(ErrorKind::Size, "cannot embed into a smaller basis");
    ComplexMatrix m = ComplexMatrix::Zero(new_dim, new_dim);
    m.topLeftCorner(dim(), dim()) = entries_;
    return FockDensityMatrix(std::move(m));
}

// --- operators ---------------------------------------------------------------

LadderOperators build_operators(int dim) {
    require_dim(dim);
    LadderOperators ops;
    ops.dim = dim;
    ops.lowering = ComplexMatrix::Zero(dim, dim);
    for (int m = 1; m < dim; ++m)
        ops.lowering(m - 1, m) = std::sqrt(static_cast<double>(m));
    ops.raising = ops.lowering.adjoint();
    ops.number = ops.raising * ops.lowering;
    ops.lowering_sq = ops.lowering * ops.lowering;
    ops.raising_sq = ops.raising * ops.raising;
    return ops;
}

ComplexMatrix lindblad_rhs(const ComplexMatrix &rho, double g) {
    const int dim = static_cast<int>(rho.rows());
    std::vector<double> root(static_cast<std::size_t>(dim + 2));
    for (std::size_t k = 0; k < root.size(); ++k)
        root[k] = std::sqrt(static_cast<double>(k));

    const double q = 0.25 * g;
    ComplexMatrix out(dim, dim);
    for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
            std::complex<double> acc = -0.5 * static_cast<double>(m + n) * rho(m, n);
            if (m + 1 < dim && n + 1 < dim)
                acc += root[m + 1] * root[n + 1] * rho(m + 1, n + 1);
            // [b^2 - b^dag^2, rho]
            std::complex<double> comm = 0.0;
            if (m + 2 < dim)
                comm += root[m + 1] * root[m + 2] * rho(m + 2, n);
            if (m >= 2)
                comm -= root[m] * root[m - 1] * rho(m - 2, n);
            if (n >= 2)
                comm -= root[n] * root[n - 1] * rho(m, n - 2);
            if (n + 2 < dim)
                comm += root[n + 1] * root[n + 2] * rho(m, n + 2);
            out(m, n) = acc + q * comm;
        }
    }
    return out;
}

ObservableSet observables_from_rho(const FockDensityMatrix &state) {
    const auto &rho = state.entries();
    const int dim = state.dim();
    std::complex<double> b1 = 0.0;
    std::complex<double> b2 = 0.0;
    double n1 = 0.0;
    double n2 = 0.0;
    for (int m = 1; m < dim; ++m) {
        const double dm = static_cast<double>(m);
        b1 += std::sqrt(dm) * rho(m, m - 1);
        if (m >= 2)
            b2 += std::sqrt(dm * (dm - 1.0)) * rho(m, m - 2);
        n1 += dm * rho(m, m).real();
        n2 += dm * (dm - 1.0) * rho(m, m).real();
    }
    const double mean_x = 2.0 * b1.real();
    const double mean_y = 2.0 * b1.imag();
    const double var_x = 2.0 * b2.real() + 2.0 * n1 + 1.0 - mean_x * mean_x;
    const double var_y = -2.0 * b2.real() + 2.0 * n1 + 1.0 - mean_y * mean_y;

    ObservableSet obs;
    obs.dx = std::sqrt(var_x);
    obs.dy = std::sqrt(var_y);
    obs.product = obs.dx * obs.dy;
    obs.n_mean = n1;
    if (n1 > 1e-12)
        obs.g2 = n2 / (n1 * n1);
    return obs;
}

FockDensityMatrix sts_density_matrix(double u, double phi, double n_th, int dim) {
    require_dim(dim);
    if (!(u >= 0.0) || !(n_th >= 0.0))
        throw Error(ErrorKind::Domain, "STS needs u >= 0 and n_th >= 0");
    if (n_th > 0.0 && std::pow(n_th / (n_th + 1.0), dim) >= 1e-12)
        throw Error(ErrorKind::Truncation,
                    "thermal tail exceeds 1e-12 at N = " + std::to_string(dim), std::nullopt, n_th);

    const int work = 2 * dim;
    const auto w = thermal_weights(n_th, dim);
    Eigen::MatrixXd squeeze = real_squeeze_generator(u, work).exp();

    // S(u e^{i phi}) = R S(u) R^dag with R = exp(i phi/2 b^dag b).
    Eigen::VectorXcd rot(work);
    for (int m = 0; m < work; ++m)
        rot[m] = std::polar(1.0, 0.5 * phi * m);

    // S rho_T S^dag = sum_m w_m (S e_m)(S e_m)^dag; columns of S scaled by sqrt(w).
    Eigen::MatrixXd scaled = Eigen::MatrixXd::Zero(work, dim);
    for (int m = 0; m < dim; ++m)
        scaled.col(m) = squeeze.col(m) * std::sqrt(w[static_cast<std::size_t>(m)]);
    Eigen::MatrixXd full = scaled * scaled.transpose();

    double outside = 0.0;
    for (int m = dim; m < work; ++m)
        outside += full(m, m);
    if (outside > 1e-10)
        throw Error(ErrorKind::Truncation,
                    "squeezed state leaks " + fmt::format("{:.6g}", outside) + " population beyond N = " +
                        std::to_string(dim),
                    std::nullopt, outside);

    ComplexMatrix rho(dim, dim);
    for (int n = 0; n < dim; ++n)
        for (int m = 0; m < dim; ++m)
            rho(m, n) = rot[m] * full(m, n) * std::conj(rot[n]);
    rho /= rho.trace().real();
    return FockDensityMatrix(std::move(rho));
}

double trace_distance(const FockDensityMatrix &a, const FockDensityMatrix &b) {
    const int dim = std::max(a.dim(), b.dim());
    const ComplexMatrix diff = a.embedded(dim).entries() - b.embedded(dim).entries();
    const ComplexMatrix herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

// --- evolution ----------------------------------------------------------------

FockEvolver::FockEvolver(FockDensityMatrix rho0, double g, double dtau, FockEvolverOptions options)
    : rho_(std::move(rho0)), g_(g), dtau_(dtau), options_(options) {
    if (!(g >= 0.0) || !std::isfinite(g))
        throw Error(ErrorKind::Domain, "pump ratio g must be finite and >= 0");
    if (!(dtau > 0.0))
        throw Error(ErrorKind::Domain, "dtau must be > 0");
    if (std::abs(rho_.trace() - 1.0) > options_.trace_tolerance)
        throw Error(ErrorKind::Invariant, "initial density matrix is not normalized");
    if (rho_.hermiticity_error() > 1e-10)
        throw Error(ErrorKind::Invariant, "initial density matrix is not Hermitian");
    ensure_basis();
}

void FockEvolver::ensure_basis() {
    while (rho_.top_population() > options_.truncation_tolerance) {
        if (2 * rho_.dim() > options_.max_dim)
            throw Error(ErrorKind::Truncation,
                        "Fock basis cap " + std::to_string(options_.max_dim) +
                            " reached at tau = " + fmt::format("{:.6g}", tau_) +
                            " with <n> = " + fmt::format("{:.6g}", observables_from_rho(rho_).n_mean),
                        tau_, observables_from_rho(rho_).n_mean);
        rho_ = rho_.embedded(2 * rho_.dim());
    }
}

void FockEvolver::step(double h) {
    auto rhs = [this](double, const ComplexMatrix &r) { return lindblad_rhs(r, g_); };
    rho_.entries() = rk4_step(rhs, tau_, rho_.entries(), h);
    tau_ += h;

    max_hermiticity_drift_ = std::max(max_hermiticity_drift_, rho_.hermiticity_error());
    rho_.hermitize();
    const double drift = std::abs(rho_.trace() - 1.0);
    max_trace_drift_ = std::max(max_trace_drift_, drift);
    if (drift > options_.trace_tolerance)
        throw Error(ErrorKind::Invariant, "trace drifted by " + fmt::format("{:.6g}", drift), tau_, drift);
    ensure_basis();
}

void FockEvolver::advance_to(double tau) {
    while (tau - tau_ > 1e-9 * dtau_) {
        const double remaining = tau - tau_;
        if (remaining >= dtau_ * (1.0 - 1e-9)) {
            step(dtau_);
            ++steps_;
            // keep the clock on the k * dtau grid used by the analytic integrator
            const double aligned = static_cast<double>(steps_) * dtau_;
            if (std::abs(aligned - tau_) < 1e-9 * dtau_)
                tau_ = aligned;
        } else {
            step(remaining);
            tau_ = tau;
        }
    }
}

FockTrajectory evolve_rho(const FockDensityMatrix &rho0, double g, const IntegrationControl &ctrl,
                          FockEvolverOptions options) {
    ctrl.validate();
    FockEvolver evolver(rho0, g, ctrl.dtau, options);
    FockTrajectory out;
    auto record = [&] {
        out.tau.push_back(evolver.tau());
        out.states.push_back(evolver.rho());
    };
    record();
    const long full = static_cast<long>(std::floor(ctrl.tau_end / ctrl.dtau + 1e-9));
    for (long k = ctrl.sample_every; k <= full; k += ctrl.sample_every) {
        evolver.advance_to(static_cast<double>(k) * ctrl.dtau);
        record();
    }
    if (ctrl.tau_end - evolver.tau() > 1e-9 * ctrl.dtau) {
        evolver.advance_to(ctrl.tau_end);
        record();
    }
    out.max_trace_drift = evolver.max_trace_drift();
    out.max_hermiticity_drift = evolver.max_hermiticity_drift();
    return out;
}

OracleReport compare_trajectories(const Trajectory &analytic, double g, const IntegrationControl &ctrl,
                                  const OracleComparisonOptions &options) {
    ctrl.validate();
    if (analytic.size() == 0)
        throw Error(ErrorKind::Domain, "empty analytic trajectory");
    for (const auto &s : analytic.states)
        if (s.u > 0.0 && std::abs(std::remainder(s.phi, 2.0 * std::numbers::pi)) > 1e-12)
            throw Error(ErrorKind::Domain, "oracle comparison assumes the squeezing phase is 0");

    OracleReport report;
    report.g = g;
    const auto &s0 = analytic.states.front();
    FockEvolver evolver(sts_density_matrix(s0.u, 0.0, s0.n_th, options.initial_dim), g, ctrl.dtau,
                        options.evolver);

    auto rebuild = [&](const StsState &s) {
        for (int dim = evolver.dim();; dim *= 2) {
            try {
                return sts_density_matrix(s.u, 0.0, s.n_th, dim);
            } catch (const Error &e) {
                if (e.kind() != ErrorKind::Truncation || 2 * dim > options.evolver.max_dim)
                    throw;
            }
        }
    };

    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double tau = analytic.tau[i];
        try {
            evolver.advance_to(tau);
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::Truncation)
                throw;
            report.truncation_note = e.what();
            break;
        }
        const auto oracle = observables_from_rho(evolver.rho());
        const auto &exact = analytic.observables[i];
        report.max_dev_dx = std::max(report.max_dev_dx, std::abs(oracle.dx - exact.dx));
        report.max_dev_dy = std::max(report.max_dev_dy, std::abs(oracle.dy - exact.dy));
        report.max_dev_n_mean = std::max(report.max_dev_n_mean, std::abs(oracle.n_mean - exact.n_mean));
        if (oracle.g2 && exact.g2)
            report.max_dev_g2 = std::max(report.max_dev_g2, std::abs(*oracle.g2 - *exact.g2));

        const bool last = i + 1 == analytic.size();
        if (last || i % static_cast<std::size_t>(std::max(1, options.reconstruct_every)) == 0) {
            const auto &s = analytic.states[i];
            try {
                const auto sts = rebuild(s);
                report.max_trace_distance =
                    std::max(report.max_trace_distance, trace_distance(evolver.rho(), sts));
            } catch (const Error &e) {
                if (e.kind() != ErrorKind::Truncation)
                    throw;
                report.truncation_note = e.what();
            }
            const double purity_dev = std::abs(evolver.rho().purity() - 1.0 / (2.0 * s.n_th + 1.0));
            report.max_purity_deviation = std::max(report.max_purity_deviation, purity_dev);
        }
        report.samples_compared = i + 1;
        report.usable_tau_end = tau;
    }
    report.max_trace_drift = evolver.max_trace_drift();
    report.max_hermiticity_drift = evolver.max_hermiticity_drift();
    report.final_dim = evolver.dim();
    return report;
}

} // namespace squeezecav
