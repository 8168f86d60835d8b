#pragma once

#include "squeezecav/core_model.hpp"
#include "squeezecav/sts_dynamics.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace squeezecav {

using ComplexMatrix = Eigen::MatrixXcd;

/// Density matrix in the number basis |0>..|N-1>.
class FockDensityMatrix {
  public:
    explicit FockDensityMatrix(ComplexMatrix entries);

    static FockDensityMatrix vacuum(int dim);
    /// Truncated Bose-Einstein distribution, renormalized over the N levels.
    static FockDensityMatrix thermal(double n_th, int dim);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const ComplexMatrix &entries() const { return entries_; }
    ComplexMatrix &entries() { return entries_; }

    std::complex<double> trace() const { return entries_.trace(); }
    double hermiticity_error() const;
    /// Summed population of the two highest number states.
    double top_population() const;
    double purity() const;

    void hermitize();
    /// Zero-pads to a larger basis.
    FockDensityMatrix embedded(int new_dim) const;

  private:
    ComplexMatrix entries_;
};

struct LadderOperators {
    int dim = 0;
    ComplexMatrix lowering;   // b |m> = sqrt(m) |m-1>
    ComplexMatrix raising;    // b^dag
    ComplexMatrix number;     // b^dag b
    ComplexMatrix lowering_sq;
    ComplexMatrix raising_sq;
};

/// Throws Size for dim < 2.
LadderOperators build_operators(int dim);

/// Interaction-picture master equation with the pump phase fixed so that the
/// drive is the real squeezing generator:
///   d rho / d tau = (g/4) [b^2 - b^dag^2, rho] + b rho b^dag - {b^dag b, rho}/2
/// Evaluated element-wise in O(N^2).
ComplexMatrix lindblad_rhs(const ComplexMatrix &rho, double g);

/// Quadratures X = b + b^dag and Y = -i(b - b^dag), evaluated with [b, b^dag] = 1.
/// g2 is absent when <n> <= 1e-12.
ObservableSet observables_from_rho(const FockDensityMatrix &rho);

/// S(xi) rho_T S(xi)^dag with xi = u e^{i phi}, S(xi) = exp[(xi^* b^2 - xi b^dag^2)/2].
/// The squeeze is computed in a basis of twice the size and then cropped; throws
/// Truncation if the thermal tail or the population beyond `dim` exceeds 1e-12 / 1e-10.
FockDensityMatrix sts_density_matrix(double u, double phi, double n_th, int dim);

/// 0.5 * sum |eig(a - b)|, after zero-padding the smaller operand.
double trace_distance(const FockDensityMatrix &a, const FockDensityMatrix &b);

struct FockEvolverOptions {
    int max_dim = 512;
    double truncation_tolerance = 1e-10; // top-two-level population that triggers growth
    double trace_tolerance = 1e-9;
};

/// Stepwise RK4 evolution of the truncated density matrix. The basis doubles
/// (zero-padding rho) whenever the top two levels collect more than the
/// truncation tolerance; beyond max_dim a Truncation error names tau and <n>.
class FockEvolver {
  public:
    FockEvolver(FockDensityMatrix rho0, double g, double dtau, FockEvolverOptions options = {});

    /// Advances with steps of dtau (the last one possibly shorter) up to tau.
    void advance_to(double tau);

    double tau() const { return tau_; }
    const FockDensityMatrix &rho() const { return rho_; }
    int dim() const { return rho_.dim(); }
    double max_trace_drift() const { return max_trace_drift_; }
    double max_hermiticity_drift() const { return max_hermiticity_drift_; }

  private:
    void step(double h);
    void ensure_basis();

    FockDensityMatrix rho_;
    double g_;
    double dtau_;
    FockEvolverOptions options_;
    double tau_ = 0.0;
    long steps_ = 0;
    double max_trace_drift_ = 0.0;
    double max_hermiticity_drift_ = 0.0;
};

struct FockTrajectory {
    std::vector<double> tau;
    std::vector<FockDensityMatrix> states;
    double max_trace_drift = 0.0;
    double max_hermiticity_drift = 0.0;
};

/// Samples every ctrl.sample_every steps plus tau_end, like sts integrate().
FockTrajectory evolve_rho(const FockDensityMatrix &rho0, double g, const IntegrationControl &ctrl,
                          FockEvolverOptions options = {});

struct OracleComparisonOptions {
    int initial_dim = 64;
    FockEvolverOptions evolver;
    // Reconstruct the STS and measure trace distance / purity every this many samples.
    int reconstruct_every = 10;
};

struct OracleReport {
    double g = 0.0;
    double max_dev_dx = 0.0;
    double max_dev_dy = 0.0;
    double max_dev_n_mean = 0.0;
    double max_dev_g2 = 0.0;
    double max_trace_distance = 0.0;
    double max_purity_deviation = 0.0;
    double max_trace_drift = 0.0;
    double max_hermiticity_drift = 0.0;
    int final_dim = 0;
    std::size_t samples_compared = 0;
    double usable_tau_end = 0.0;
    std::optional<std::string> truncation_note; // set when the oracle stopped early
};

/// Evolves the oracle from the STS at analytic.states[0] along the analytic
/// grid and reports max deviations of dX, dY, <n>, g2 and the trace distance
/// between the evolved rho and the STS rebuilt from (u, phi, n_th).
OracleReport compare_trajectories(const Trajectory &analytic, double g, const IntegrationControl &ctrl,
                                  const OracleComparisonOptions &options = {});

} // namespace squeezecav
