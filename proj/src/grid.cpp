#include "solmap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace solmap {

namespace {
void require(bool ok, const std::string& msg) {
    if (!ok) throw GridError(msg);
}
}  // namespace

GridFn1D::GridFn1D(double a, double b, std::vector<double> values)
    : a_(a), b_(b), v_(std::move(values)) {
    require(a_ < b_, "GridFn1D: need a < b");
    require(v_.size() >= 3, "GridFn1D: need at least 3 nodes");
    for (double x : v_) require(std::isfinite(x), "GridFn1D: non-finite value");
}

GridFn1D GridFn1D::sample(double a, double b, int n_nodes, const Expression& f,
                          const std::string& variable) {
    std::optional<int> vi = f.var_index(variable);
    std::vector<double> env(f.variables().size(), 0.0);
    std::vector<double> v(static_cast<std::size_t>(n_nodes));
    for (int k = 0; k < n_nodes; ++k) {
        double s = a + (b - a) * k / (n_nodes - 1);
        if (vi) env[static_cast<std::size_t>(*vi)] = s;
        v[static_cast<std::size_t>(k)] = f.eval(env);
    }
    return GridFn1D(a, b, std::move(v));
}

double GridFn1D::sup_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

namespace {
void check_match(const GridFn1D& x, const GridFn1D& y) {
    require(x.n_nodes() == y.n_nodes() && x.a() == y.a() && x.b() == y.b(),
            "GridFn1D: grid mismatch");
}
}  // namespace

GridFn1D operator+(const GridFn1D& x, const GridFn1D& y) { return axpy(1.0, x, y); }
GridFn1D operator-(const GridFn1D& x, const GridFn1D& y) { return axpy(-1.0, y, x); }

GridFn1D operator*(double c, const GridFn1D& x) {
    std::vector<double> v = x.values();
    for (double& e : v) e *= c;
    return GridFn1D(x.a(), x.b(), std::move(v));
}

GridFn1D axpy(double alpha, const GridFn1D& x, const GridFn1D& y) {
    check_match(x, y);
    std::vector<double> v = y.values();
    for (int k = 0; k < x.n_nodes(); ++k) v[static_cast<std::size_t>(k)] += alpha * x[k];
    return GridFn1D(x.a(), x.b(), std::move(v));
}

double sup_distance(const GridFn1D& x, const GridFn1D& y) {
    check_match(x, y);
    double m = 0.0;
    for (int k = 0; k < x.n_nodes(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
    return m;
}

CylFn::CylFn(double T, int nt, int ntheta) : T_(T), nt_(nt), ntheta_(ntheta) {
    require(T_ > 0.0, "CylFn: need T > 0");
    require(nt_ >= 1 && ntheta_ >= 2, "CylFn: grid too small");
    v_.assign(static_cast<std::size_t>(nt_ + 1) * ntheta_, 0.0);
}

double CylFn::sup_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

void CylFn::check_finite(const char* what) const {
    for (double x : v_)
        if (!std::isfinite(x)) throw GridError(std::string(what) + ": non-finite value");
}

namespace {
void check_match(const CylFn& x, const CylFn& y) {
    require(x.same_grid(y), "CylFn: grid mismatch");
}
}  // namespace

CylFn operator+(const CylFn& x, const CylFn& y) { return axpy(1.0, x, y); }
CylFn operator-(const CylFn& x, const CylFn& y) { return axpy(-1.0, y, x); }

CylFn operator*(double c, const CylFn& x) {
    CylFn r = x;
    for (double& e : r.values()) e *= c;
    return r;
}

CylFn axpy(double alpha, const CylFn& x, const CylFn& y) {
    check_match(x, y);
    CylFn r = y;
    const std::vector<double>& xs = x.values();
    std::vector<double>& rs = r.values();
    for (std::size_t i = 0; i < rs.size(); ++i) rs[i] += alpha * xs[i];
    return r;
}

double sup_distance(const CylFn& x, const CylFn& y) {
    check_match(x, y);
    double m = 0.0;
    const std::vector<double>& xs = x.values();
    const std::vector<double>& ys = y.values();
    for (std::size_t i = 0; i < xs.size(); ++i) m = std::max(m, std::abs(xs[i] - ys[i]));
    return m;
}

std::vector<double> d_theta_slice(std::span<const double> slice, double dtheta,
                                  int stencil_order) {
    const int n = static_cast<int>(slice.size());
    std::vector<double> out(static_cast<std::size_t>(n));
    auto at = [&](int m) {
        m %= n;
        return slice[static_cast<std::size_t>(m < 0 ? m + n : m)];
    };
    if (stencil_order == 2) {
        for (int m = 0; m < n; ++m)
            out[static_cast<std::size_t>(m)] = (at(m + 1) - at(m - 1)) / (2.0 * dtheta);
    } else if (stencil_order == 4) {
        for (int m = 0; m < n; ++m)
            out[static_cast<std::size_t>(m)] =
                (-at(m + 2) + 8.0 * at(m + 1) - 8.0 * at(m - 1) + at(m - 2)) / (12.0 * dtheta);
    } else {
        throw GridError("d_theta: stencil order must be 2 or 4");
    }
    return out;
}

CylFn d_theta(const CylFn& y, int l, int stencil_order) {
    require(l >= 1, "d_theta: order must be >= 1");
    require(y.ntheta() >= 2 * l + 5, "d_theta: grid too coarse for requested stencil");
    CylFn cur = y;
    for (int rep = 0; rep < l; ++rep) {
        CylFn next(cur.T(), cur.nt(), cur.ntheta());
        for (int j = 0; j <= cur.nt(); ++j) {
            std::vector<double> d = d_theta_slice(cur.slice(j), cur.dtheta(), stencil_order);
            std::copy(d.begin(), d.end(), next.slice(j).begin());
        }
        cur = std::move(next);
    }
    return cur;
}

CylFn d_time(const CylFn& y, int stencil_order) {
    const int nt = y.nt();
    const double h = y.dt();
    CylFn out(y.T(), nt, y.ntheta());
    if (stencil_order == 2) {
        require(nt >= 2, "d_time: need at least 3 time nodes");
        for (int m = 0; m < y.ntheta(); ++m) {
            out.at(0, m) = (-3.0 * y(0, m) + 4.0 * y(1, m) - y(2, m)) / (2.0 * h);
            for (int j = 1; j < nt; ++j) out.at(j, m) = (y(j + 1, m) - y(j - 1, m)) / (2.0 * h);
            out.at(nt, m) = (3.0 * y(nt, m) - 4.0 * y(nt - 1, m) + y(nt - 2, m)) / (2.0 * h);
        }
        return out;
    }
    require(stencil_order == 4, "d_time: stencil order must be 2 or 4");
    require(nt >= 4, "d_time: need at least 5 time nodes for order 4");
    for (int m = 0; m < y.ntheta(); ++m) {
        out.at(0, m) = (-25.0 * y(0, m) + 48.0 * y(1, m) - 36.0 * y(2, m) + 16.0 * y(3, m) -
                        3.0 * y(4, m)) /
                       (12.0 * h);
        out.at(1, m) = (-3.0 * y(0, m) - 10.0 * y(1, m) + 18.0 * y(2, m) - 6.0 * y(3, m) +
                        y(4, m)) /
                       (12.0 * h);
        for (int j = 2; j <= nt - 2; ++j)
            out.at(j, m) =
                (-y(j + 2, m) + 8.0 * y(j + 1, m) - 8.0 * y(j - 1, m) + y(j - 2, m)) / (12.0 * h);
        out.at(nt - 1, m) = (3.0 * y(nt, m) + 10.0 * y(nt - 1, m) - 18.0 * y(nt - 2, m) +
                             6.0 * y(nt - 3, m) - y(nt - 4, m)) /
                            (12.0 * h);
        out.at(nt, m) = (25.0 * y(nt, m) - 48.0 * y(nt - 1, m) + 36.0 * y(nt - 2, m) -
                         16.0 * y(nt - 3, m) + 3.0 * y(nt - 4, m)) /
                        (12.0 * h);
    }
    return out;
}

double c0i_norm(const CylFn& y, int i, int stencil_order) {
    double m = y.sup_norm();
    CylFn cur = y;
    for (int l = 1; l <= i; ++l) {
        cur = d_theta(cur, 1, stencil_order);
        m = std::max(m, cur.sup_norm());
    }
    return m;
}

CylFn restrict_time(const CylFn& y, double t_prime) {
    double steps = t_prime / y.dt();
    int j1 = static_cast<int>(std::lround(steps));
    require(std::abs(steps - j1) < 1e-9 && j1 >= 1 && j1 <= y.nt(),
            "restrict: T' is not a time node");
    CylFn r(t_prime, j1, y.ntheta());
    std::copy(y.values().begin(),
              y.values().begin() + static_cast<std::ptrdiff_t>((j1 + 1) * y.ntheta()),
              r.values().begin());
    return r;
}

CylFn compose(const Expression& x, const CylFn& y) {
    std::vector<double> env(x.variables().size(), 0.0);
    std::optional<int> it = x.var_index("t");
    std::optional<int> ie = x.var_index("eta");
    std::optional<int> ix = x.var_index("xi");
    CylFn z(y.T(), y.nt(), y.ntheta());
    for (int j = 0; j <= y.nt(); ++j) {
        for (int m = 0; m < y.ntheta(); ++m) {
            if (it) env[static_cast<std::size_t>(*it)] = y.t_node(j);
            if (ie) env[static_cast<std::size_t>(*ie)] = y.eta_node(m);
            if (ix) env[static_cast<std::size_t>(*ix)] = y(j, m);
            try {
                z.at(j, m) = x.eval(env);
            } catch (const DomainError& e) {
                std::ostringstream os;
                os << e.what() << " at node (t=" << y.t_node(j) << ", eta=" << y.eta_node(m)
                   << ")";
                throw DomainError(os.str(), e.position());
            }
        }
    }
    return z;
}

void write_csv(const GridFn1D& f, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "cannot open for writing: " + path);
    out << "node,value\n";
    char buf[96];
    for (int k = 0; k < f.n_nodes(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.node(k), f[k]);
        out << buf;
    }
}

void write_csv(const CylFn& f, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "cannot open for writing: " + path);
    out << "t,eta,value\n";
    char buf[144];
    for (int j = 0; j <= f.nt(); ++j)
        for (int m = 0; m < f.ntheta(); ++m) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.t_node(j), f.eta_node(m),
                          f(j, m));
            out << buf;
        }
}

GridFn1D read_grid_csv(const std::string& path, double a, double b) {
    std::ifstream in(path);
    require(in.good(), "cannot open: " + path);
    std::string line;
    std::vector<double> values;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.find("value") != std::string::npos) continue;  // header
        }
        std::size_t comma = line.rfind(',');
        require(comma != std::string::npos, "bad CSV line: " + line);
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return GridFn1D(a, b, std::move(values));
}

}  // namespace solmap
