#ifndef SOLMAP_HARNESS_HPP
#define SOLMAP_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "solmap/grid.hpp"
#include "solmap/transport.hpp"

namespace solmap::harness {

/** Nested time horizons T_1 < T_2 < ... on a shared angular grid. */
struct LevelLadder {
    std::vector<double> horizons;
};

struct PairError {
    int i = 0, j = 0;  // horizon indices, i < j
    double error = 0.0;
    bool ok = false;
    std::string message;
};

/** || restrict(solve at T_j, T_i) - solve at T_i ||_sup for all i < j. */
std::vector<PairError> consistency_check(const transport::TransportProblem& base,
                                         const transport::PicardConfig& cfg,
                                         const LevelLadder& ladder);

struct BijectivityReport {
    double max_residual = 0.0;    // || u - v - I(0, a u) || over the trials
    double injectivity = 0.0;     // || u || for v = 0 from a random first iterate
    int trials = 0;
    bool vacuous = false;
};

/** Random smooth right-hand sides (trigonometric polynomials, seeded). */
BijectivityReport bijectivity_probe(const CylFn& a, int trials, std::uint64_t seed = 0,
                                    double tol = 1e-12,
                                    Quadrature quad = Quadrature::Simpson4);

struct BootstrapRow {
    int ntheta = 0;
    std::vector<double> norms;  // c0i_norm for i = 0..i_max
};

/** c0i_norm of the solution for i <= i_max across grid refinements. */
std::vector<BootstrapRow> bootstrap_check(const Expression& y0_expr, const Expression& phi,
                                          double T, const transport::PicardConfig& cfg,
                                          int i_max, const std::vector<int>& nthetas);

struct ExpLevelVerdict {
    int level = 0;
    double min_x = 0.0;
    bool success = false;  // iff min_{[-i,i]} x > 0
};

/** The exp-equation counterexample: per level i, y = log o (x|[-i,i]) exists
 *  iff x > 0 on [-i,i]; the linearization multiplier is x itself. */
std::vector<ExpLevelVerdict> exp_counterexample(const GridFn1D& x, int i_max);

/** Random trigonometric polynomial on the cylinder (for probes and tests). */
CylFn random_trig_cylfn(double T, int nt, int ntheta, std::uint64_t seed, int modes = 3,
                        double amplitude = 1.0);

}  // namespace solmap::harness

#endif
