#include "solmap/quad.hpp"

#include <stdexcept>

namespace solmap {

void cumulative_integral(std::span<const double> f, double h, Quadrature rule,
                         std::span<double> out) {
    const std::size_t n = f.size();
    if (out.size() != n) throw std::invalid_argument("cumulative_integral: size mismatch");
    if (n == 0) return;
    out[0] = 0.0;
    if (n == 1) return;

    if (rule == Quadrature::Trapezoid || n < 4) {
        if (rule == Quadrature::Simpson4 && n == 3) {
            // quadratic through the three points
            out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
            out[2] = out[1] + h / 12.0 * (-f[0] + 8.0 * f[1] + 5.0 * f[2]);
            return;
        }
        for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
        return;
    }

    // cubic-interpolant steps, exact for cubic integrands
    out[1] = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    out[2] = out[1] + h / 24.0 * (-f[0] + 13.0 * f[1] + 13.0 * f[2] - f[3]);
    for (std::size_t k = 3; k < n; ++k)
        out[k] = out[k - 1] +
                 h / 24.0 * (f[k - 3] - 5.0 * f[k - 2] + 19.0 * f[k - 1] + 9.0 * f[k]);
}

std::vector<double> cumulative_integral(std::span<const double> f, double h, Quadrature rule) {
    std::vector<double> out(f.size());
    cumulative_integral(f, h, rule, out);
    return out;
}

}  // namespace solmap
