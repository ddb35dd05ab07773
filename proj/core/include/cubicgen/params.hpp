#pragma once

#include <array>
#include <span>
#include <string_view>

namespace cubicgen {

// Interferometer settings, in the order they appear in the parameter vector.
enum class Param : int {
    Alpha = 0,  // real amplitude of the coherent seed
    PhiBs,      // beamsplitter angle; transmission T = cos^2(phi_bs)
    Theta,      // phase shift on mode 2
    XiAbs,      // two-mode squeezing magnitude
    PhiXi,      // two-mode squeezing phase
    BetaAbs,    // output displacement magnitude
    PhiBeta,    // output displacement phase
};

inline constexpr int kParamCount = 7;
inline constexpr std::array<Param, kParamCount> kAllParams = {
    Param::Alpha, Param::PhiBs, Param::Theta, Param::XiAbs, Param::PhiXi, Param::BetaAbs, Param::PhiBeta};

std::string_view param_name(Param p);
bool is_angle(Param p);

class ParamVector {
public:
    using Values = std::array<double, kParamCount>;
    using Mask = std::array<bool, kParamCount>;

    ParamVector() = default;
    explicit ParamVector(const Values& values, const Mask& fixed = {});

    double operator[](Param p) const { return values_[static_cast<std::size_t>(p)]; }
    double& operator[](Param p) { return values_[static_cast<std::size_t>(p)]; }

    double alpha() const { return (*this)[Param::Alpha]; }
    double phi_bs() const { return (*this)[Param::PhiBs]; }
    double theta() const { return (*this)[Param::Theta]; }
    double xi_abs() const { return (*this)[Param::XiAbs]; }
    double phi_xi() const { return (*this)[Param::PhiXi]; }
    double beta_abs() const { return (*this)[Param::BetaAbs]; }
    double phi_beta() const { return (*this)[Param::PhiBeta]; }

    const Values& values() const { return values_; }
    const Mask& fixed_mask() const { return fixed_; }
    bool is_fixed(Param p) const { return fixed_[static_cast<std::size_t>(p)]; }
    void set_fixed(Param p, bool fixed = true) { fixed_[static_cast<std::size_t>(p)] = fixed; }

    // Angles mapped into [0, 2pi); other entries unchanged.
    ParamVector canonical() const;

    // Throws ConfigError for non-finite entries or negative magnitudes.
    void validate() const;

    friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
    Values values_{};
    Mask fixed_{};
};

double transmission_to_phi_bs(double transmission);
double phi_bs_to_transmission(double phi_bs);

}  // namespace cubicgen
