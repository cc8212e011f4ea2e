#ifndef SOLMAP_GRID_HPP
#define SOLMAP_GRID_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "solmap/expr.hpp"

namespace solmap {

class GridError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/** Grid function on [a,b] with N+1 uniform nodes, N >= 2. */
class GridFn1D {
  public:
    GridFn1D() = default;
    GridFn1D(double a, double b, std::vector<double> values);

    /** Sample an expression of one variable at the uniform nodes. */
    static GridFn1D sample(double a, double b, int n_nodes, const Expression& f,
                           const std::string& variable);

    double a() const { return a_; }
    double b() const { return b_; }
    int n_nodes() const { return static_cast<int>(v_.size()); }
    double h() const { return (b_ - a_) / static_cast<double>(v_.size() - 1); }
    double node(int k) const { return a_ + h() * k; }
    double operator[](int k) const { return v_[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return v_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double sup_norm() const;

  private:
    double a_ = 0.0, b_ = 1.0;
    std::vector<double> v_;
};

GridFn1D operator+(const GridFn1D& x, const GridFn1D& y);
GridFn1D operator-(const GridFn1D& x, const GridFn1D& y);
GridFn1D operator*(double c, const GridFn1D& x);
/** y + alpha*x on matching grids. */
GridFn1D axpy(double alpha, const GridFn1D& x, const GridFn1D& y);
double sup_distance(const GridFn1D& x, const GridFn1D& y);

/** Grid function on the cylinder [0,T] x S^1.
 *
 *  Time nodes t_j = j*T/nt, j = 0..nt; angular nodes eta_m = m/ntheta,
 *  m = 0..ntheta-1 (index arithmetic modulo ntheta, eta=1 never stored).
 */
class CylFn {
  public:
    CylFn() = default;
    CylFn(double T, int nt, int ntheta);

    double T() const { return T_; }
    int nt() const { return nt_; }
    int ntheta() const { return ntheta_; }
    double dt() const { return T_ / nt_; }
    double dtheta() const { return 1.0 / ntheta_; }
    double t_node(int j) const { return T_ * j / nt_; }
    double eta_node(int m) const { return static_cast<double>(m) / ntheta_; }

    double operator()(int j, int m) const {
        return v_[static_cast<std::size_t>(j) * ntheta_ + wrap(m)];
    }
    double& at(int j, int m) { return v_[static_cast<std::size_t>(j) * ntheta_ + wrap(m)]; }

    std::span<const double> slice(int j) const {
        return {v_.data() + static_cast<std::size_t>(j) * ntheta_,
                static_cast<std::size_t>(ntheta_)};
    }
    std::span<double> slice(int j) {
        return {v_.data() + static_cast<std::size_t>(j) * ntheta_,
                static_cast<std::size_t>(ntheta_)};
    }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double sup_norm() const;
    void check_finite(const char* what) const;

    bool same_grid(const CylFn& o) const {
        return nt_ == o.nt_ && ntheta_ == o.ntheta_ && T_ == o.T_;
    }

  private:
    double T_ = 1.0;
    int nt_ = 0;
    int ntheta_ = 0;
    std::vector<double> v_;

    int wrap(int m) const {
        m %= ntheta_;
        return m < 0 ? m + ntheta_ : m;
    }
};

CylFn operator+(const CylFn& x, const CylFn& y);
CylFn operator-(const CylFn& x, const CylFn& y);
CylFn operator*(double c, const CylFn& x);
CylFn axpy(double alpha, const CylFn& x, const CylFn& y);
double sup_distance(const CylFn& x, const CylFn& y);

/** l-fold periodic angular derivative by central finite differences.
 *  stencil_order 4 (default) or 2; requires ntheta >= 2l+5. */
CylFn d_theta(const CylFn& y, int l, int stencil_order = 4);

/** One slice worth of the same stencil (used for slice norms). */
std::vector<double> d_theta_slice(std::span<const double> slice, double dtheta,
                                  int stencil_order = 4);

/** Time derivative: central stencil inside, one-sided at the ends.
 *  stencil_order 4 needs nt >= 4, order 2 needs nt >= 2. */
CylFn d_time(const CylFn& y, int stencil_order = 4);

/** C^{0,i} norm: max over l <= i of sup |d_theta^l y|. */
double c0i_norm(const CylFn& y, int i, int stencil_order = 4);

/** Restriction to [0,T'] where T' must coincide with a time node. */
CylFn restrict_time(const CylFn& y, double t_prime);

/** Composition z(t,eta) = x(t, eta, y(t,eta)); x uses variables (t, eta, xi). */
CylFn compose(const Expression& x, const CylFn& y);

/** CSV: GridFn1D as "node,value"; CylFn as "t,eta,value" row-major in t then eta. */
void write_csv(const GridFn1D& f, const std::string& path);
void write_csv(const CylFn& f, const std::string& path);
GridFn1D read_grid_csv(const std::string& path, double a, double b);

}  // namespace solmap

#endif
