#include "cubicgen/params.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cubicgen/error.hpp"

namespace cubicgen {

std::string_view param_name(Param p) {
    switch (p) {
        case Param::Alpha: return "alpha";
        case Param::PhiBs: return "phi_bs";
        case Param::Theta: return "theta";
        case Param::XiAbs: return "xi_abs";
        case Param::PhiXi: return "phi_xi";
        case Param::BetaAbs: return "beta_abs";
        case Param::PhiBeta: return "phi_beta";
    }
    return "?";
}

bool is_angle(Param p) {
    return p == Param::PhiBs || p == Param::Theta || p == Param::PhiXi || p == Param::PhiBeta;
}

ParamVector::ParamVector(const Values& values, const Mask& fixed) : values_(values), fixed_(fixed) {}

ParamVector ParamVector::canonical() const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ParamVector out = *this;
    for (Param p : kAllParams) {
        if (is_angle(p)) {
            double v = std::fmod(out[p], two_pi);
            if (v < 0.0) v += two_pi;
            if (v >= two_pi) v = 0.0;
            out[p] = v;
        }
    }
    return out;
}

void ParamVector::validate() const {
    for (Param p : kAllParams) {
        if (!std::isfinite((*this)[p])) {
            throw ConfigError("parameter " + std::string(param_name(p)) + " is not finite");
        }
    }
    if (xi_abs() < 0.0) throw ConfigError("parameter xi_abs must be >= 0");
    if (beta_abs() < 0.0) throw ConfigError("parameter beta_abs must be >= 0");
}

double transmission_to_phi_bs(double transmission) {
    if (!(transmission > 0.0 && transmission <= 1.0)) {
        throw ConfigError("transmission must lie in (0, 1], got " + std::to_string(transmission));
    }
    return std::acos(std::sqrt(transmission));
}

double phi_bs_to_transmission(double phi_bs) {
    const double c = std::cos(phi_bs);
    return c * c;
}

}  // namespace cubicgen
