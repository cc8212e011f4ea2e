#ifndef SOLMAP_TRANSPORT_HPP
#define SOLMAP_TRANSPORT_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "solmap/expr.hpp"
#include "solmap/grid.hpp"
#include "solmap/quad.hpp"

namespace solmap {

class SolveError : public std::runtime_error {
  public:
    enum class Kind { NoConvergence, Stagnation, Regularity, Domain };
    SolveError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

namespace transport {

/** Semilinear transport problem d_t y + d_theta y = phi(t, eta, y), y(0,.) = y0.
 *  y0 lives on [0,1] with ntheta+1 nodes (periodic endpoint); phi uses
 *  variables (t, eta, xi). The solver grid couples dt = dtheta. */
struct TransportProblem {
    GridFn1D y0;
    Expression phi;
    double T = 1.0;
};

/** phi with the partial derivatives the Lemma-b/c constants need, optionally
 *  wrapped by the smooth cutoff xi -> chi(xi/B) * phi (Lemma-d device). */
class Nonlinearity {
  public:
    static Nonlinearity from(const Expression& phi);
    Nonlinearity with_cutoff(double level) const;

    bool has_cutoff() const { return level_ > 0.0; }
    double cutoff_level() const { return level_; }

    double value(double t, double eta, double xi) const;
    double d_eta(double t, double eta, double xi) const;
    double d_xi(double t, double eta, double xi) const;
    double d_eta_xi(double t, double eta, double xi) const;
    double d_xi_xi(double t, double eta, double xi) const;

    const Expression& base() const { return phi_; }

    bool uses_t() const { return uses_t_; }
    bool uses_eta() const { return uses_eta_; }
    bool uses_xi() const { return uses_xi_; }

  private:
    Expression phi_, phi_eta_, phi_xi_, phi_eta_xi_, phi_xi_xi_;
    int it_ = -1, ie_ = -1, ix_ = -1;
    std::size_t env_size_ = 0;
    double level_ = 0.0;
    bool uses_t_ = true, uses_eta_ = true, uses_xi_ = true;

    double eval(const Expression& e, double t, double eta, double xi) const;
};

/** Smooth plateau cutoff: 1 on [-1,1], 0 outside (-2,2), built from
 *  chi0(s) = exp((s-1)^{-1} (s-2)^{-1}) on (1,2). */
double cutoff_chi(double s);
double cutoff_chi_d1(double s);
double cutoff_chi_d2(double s);

enum class StepPolicy { LemmaC, FixedCount };
enum class InitPolicy { Continuation, ConstantValue };

struct PicardConfig {
    double tol = 1e-12;          // sup-norm fixed point tolerance
    int max_iter = 200;          // per window
    double xi_window = 0.0;      // sampling half-width for constants; 0 = auto
    int cutoff = -1;             // -1 auto, 0 off, 1 on
    StepPolicy policy = StepPolicy::LemmaC;
    int fixed_steps = 0;         // used with StepPolicy::FixedCount
    Quadrature quad = Quadrature::Trapezoid;
    double safety = 1.25;        // inflation of sampled suprema
    InitPolicy init = InitPolicy::Continuation;
    double init_value = 0.0;     // first iterate when init == ConstantValue
};

/** Lemma b/c constants for one window. */
struct Constants {
    double M0 = 0.0, M1 = 0.0, M = 0.0;
    double R = 0.0, L = 0.0, alpha = 0.0;
};

struct StepRecord {
    double t0 = 0.0, t2 = 0.0;
    double A = 0.0;
    Constants c;
    double xi_window = 0.0;
    int iterations = 0;
    double contraction = 0.0;  // max measured per-iteration ratio
};

struct SolveReport {
    CylFn y;
    std::vector<StepRecord> steps;
    double residual_sup = 0.0;
    bool regular = false;
    bool cutoff_active = false;
    double cutoff_level = 0.0;
    bool complete = false;
    double solved_until = 0.0;
    double blowup_estimate = 0.0;  // meaningful when !complete
};

/** Transported initial data: bar_y0(t, eta) = y0(eta - t), exact nodewise.
 *  Requires T * ntheta integral so characteristics hit nodes. */
CylFn bar_y0(const GridFn1D& y0, double T);

/** Characteristics integral I(a,z)(t,eta) = int_a^t z(tau, eta - t + tau) dtau
 *  along the lattice-aligned characteristics; signed for t < a. */
CylFn char_integral(double a_time, const CylFn& z, Quadrature quad = Quadrature::Trapezoid);

/** Sampled suprema of |phi(.,.,0)| and the Lemma-b partials over
 *  [t0,t2] x S^1 x [-xi_window, xi_window], inflated by `safety`;
 *  R per Lemma c (forward restart), L = min(t2-t0, 1/(3MR)), alpha = L M (2+R). */
Constants lemma_constants(const Nonlinearity& phi, double t0, double t2, int ntheta,
                          double data_bound, double xi_window, double safety = 1.25);

struct PicardResult {
    CylFn z;                     // window-local fixed point
    int iterations = 0;
    std::vector<double> ratios;  // ||z_{k+1}-z_k|| / ||z_k-z_{k-1}||
    double max_abs = 0.0;        // largest |z| seen over all iterates
};

/** Fixed point of z -> z0 + I(t0, phi o [id, z]) on the window grid.
 *  z0 is window-local (time measured from t_offset); history supplies the
 *  integrand values just before the window for the order-4 quadrature. */
PicardResult picard_step(const CylFn& z0, const Nonlinearity& phi, double t_offset,
                         const PicardConfig& cfg, const CylFn* first_iterate = nullptr);

/** March y = bar_y0 + I(0, phi o [id,y]) across lemma-c windows. */
SolveReport solve(const TransportProblem& problem, const PicardConfig& cfg = {});

struct LinearizedOptions {
    double tol = 1e-12;
    int max_iter = 200;
    Quadrature quad = Quadrature::Simpson4;
    const CylFn* first_iterate = nullptr;  // optional override for the first window
};

/** u solving u = v + I(0, a u) by Picard on windows of length <= 1/(12 sup|a|). */
CylFn linearized_solve(const CylFn& a, const CylFn& v, const LinearizedOptions& opts = {});

/** Lemma b(1) margin: (1 + ||v||_{F_i}) e^{L M_i} - 1 - ||y||_{F_i} for the
 *  solution y of y = v + I(0, phi o [id,y]) on [0, y.T()]; i in {0,1}.
 *  The xi sampling window is widened to cover the realized solution. */
double apriori_margin(const CylFn& v, const Nonlinearity& phi, const CylFn& y, int i,
                      double safety = 1.25, double xi_window = 0.0);

/** Distance between fixed points converged from two constant initial iterates. */
double uniqueness_probe(const TransportProblem& problem, const PicardConfig& cfg, double init1,
                        double init2);

/** sup | d_t y + d_theta y - phi(t,eta,y) | with the module's stencils. */
double residual_sup(const CylFn& y, const TransportProblem& problem);

}  // namespace transport
}  // namespace solmap

#endif
