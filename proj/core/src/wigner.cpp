#include "cubicgen/wigner.hpp"

#include <cmath>
#include <numbers>

#include "cubicgen/error.hpp"

namespace cubicgen {
namespace {

double trapezoid(std::span<const double> x, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) {
        sum += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
    }
    return sum;
}

// Scratch holds the Wigner basis functions W_{m,n}(alpha) for the current m.
double wigner_point(const ComplexVector& c, Complex alpha, std::vector<Complex>& scratch) {
    const auto levels = static_cast<std::size_t>(c.size());
    scratch.assign(levels, Complex{});
    auto rho = [&](std::size_t m, std::size_t n) { return c[static_cast<Eigen::Index>(m)] *
                                                          std::conj(c[static_cast<Eigen::Index>(n)]); };
    const Complex two_alpha = 2.0 * alpha;
    const Complex two_alpha_conj = std::conj(two_alpha);

    scratch[0] = std::exp(-2.0 * std::norm(alpha)) / std::numbers::pi;
    double w = std::real(rho(0, 0) * scratch[0]);
    for (std::size_t n = 1; n < levels; ++n) {
        scratch[n] = two_alpha * scratch[n - 1] / std::sqrt(static_cast<double>(n));
        w += 2.0 * std::real(rho(0, n) * scratch[n]);
    }
    for (std::size_t m = 1; m < levels; ++m) {
        const double sm = std::sqrt(static_cast<double>(m));
        Complex previous = scratch[m];
        scratch[m] = (two_alpha_conj * previous - sm * scratch[m - 1]) / sm;
        w += std::real(rho(m, m) * scratch[m]);
        for (std::size_t n = m + 1; n < levels; ++n) {
            const Complex next =
                (two_alpha * scratch[n - 1] - sm * previous) / std::sqrt(static_cast<double>(n));
            previous = scratch[n];
            scratch[n] = next;
            w += 2.0 * std::real(rho(m, n) * scratch[n]);
        }
    }
    return 2.0 * w;
}

}  // namespace

double WignerGrid::integral() const {
    std::vector<double> marginal = q_marginal();
    return trapezoid(q_axis, marginal);
}

std::vector<double> WignerGrid::q_marginal() const {
    std::vector<double> out(q_axis.size());
    std::vector<double> row(p_axis.size());
    for (std::size_t i = 0; i < q_axis.size(); ++i) {
        for (std::size_t j = 0; j < p_axis.size(); ++j) {
            row[j] = values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        out[i] = trapezoid(p_axis, row);
    }
    return out;
}

WignerGrid wigner(const StateVector& state, std::span<const double> q_axis, std::span<const double> p_axis) {
    state.space().require_modes(1, "wigner");
    if (q_axis.empty() || p_axis.empty()) {
        throw ConfigError("wigner: empty phase-space axis");
    }
    WignerGrid grid{{q_axis.begin(), q_axis.end()},
                    {p_axis.begin(), p_axis.end()},
                    Eigen::MatrixXd(static_cast<Eigen::Index>(q_axis.size()),
                                    static_cast<Eigen::Index>(p_axis.size()))};
    std::vector<Complex> scratch;
    for (std::size_t i = 0; i < q_axis.size(); ++i) {
        for (std::size_t j = 0; j < p_axis.size(); ++j) {
            grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                wigner_point(state.amplitudes(), Complex(q_axis[i], p_axis[j]), scratch);
        }
    }
    return grid;
}

double wigner_at(const StateVector& state, double q, double p) {
    state.space().require_modes(1, "wigner_at");
    std::vector<Complex> scratch;
    return wigner_point(state.amplitudes(), Complex(q, p), scratch);
}

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) {
        throw ConfigError("linspace: need at least one point");
    }
    std::vector<double> out(static_cast<std::size_t>(points));
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = lo + step * k;
    out.back() = hi;
    return out;
}

}  // namespace cubicgen
