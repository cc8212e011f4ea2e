#ifndef SOLMAP_LINALG_HPP
#define SOLMAP_LINALG_HPP

#include <span>
#include <vector>

namespace solmap {

/** Dense row-major matrix, sized for the N <= 400 operators of this project. */
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : r_(rows), c_(cols) {
        v_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    }
    int rows() const { return r_; }
    int cols() const { return c_; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * c_ + j]; }
    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * c_ + j]; }

    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> apply_transpose(std::span<const double> x) const;
    /** max absolute row sum */
    double inf_norm() const;

  private:
    int r_ = 0, c_ = 0;
    std::vector<double> v_;
};

/** LU factorization with partial pivoting (PA = LU). */
class LuFactor {
  public:
    explicit LuFactor(DenseMatrix a);

    bool singular() const { return singular_; }
    /** Solve A x = b. */
    std::vector<double> solve(std::span<const double> b) const;
    /** Solve A^T x = b using the same factors. */
    std::vector<double> solve_transpose(std::span<const double> b) const;

  private:
    DenseMatrix lu_;
    std::vector<int> piv_;
    bool singular_ = false;
};

/** Smallest singular value estimate by inverse power iteration on A^T A.
 *  Deterministic start vector; returns 0 for a numerically singular factorization. */
double smallest_singular_value(const DenseMatrix& a, int iterations = 60);

/** Estimate with the converged direction returned in `direction` (unit 2-norm). */
double smallest_singular_value(const DenseMatrix& a, std::vector<double>& direction,
                               int iterations);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

}  // namespace solmap

#endif
