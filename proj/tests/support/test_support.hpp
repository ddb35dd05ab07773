#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "cubicgen/fock_space.hpp"
#include "cubicgen/params.hpp"

namespace testing_support {

inline constexpr double kPi = std::numbers::pi;

// Fixed-transmission optimum for (r=0.15, 5 dB) at T = 0.5. The branch
// (alpha, theta, phi_xi) -> (-alpha, theta + pi, phi_xi + pi) is equivalent.
inline cubicgen::ParamVector balanced_target1_optimum() {
    return cubicgen::ParamVector({-0.2202, kPi / 4.0, 1.5 * kPi, 0.1293, kPi, 0.1814, 0.5 * kPi});
}

inline cubicgen::ComplexMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    cubicgen::ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {normal(rng), normal(rng)};
    }
    return m;
}

inline cubicgen::ComplexMatrix random_anti_hermitian(Eigen::Index n, std::uint64_t seed) {
    const cubicgen::ComplexMatrix m = random_matrix(n, seed);
    return 0.5 * (m - m.adjoint());
}

inline cubicgen::ParamVector random_params(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return cubicgen::ParamVector({-1.0 + 2.0 * u(rng), 0.1 + 1.3 * u(rng), 2.0 * kPi * u(rng), 0.05 + 0.5 * u(rng),
                                  2.0 * kPi * u(rng), 0.05 + 1.0 * u(rng), 2.0 * kPi * u(rng)});
}

inline double max_abs_diff(const cubicgen::ComplexMatrix& a, const cubicgen::ComplexMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const cubicgen::ComplexVector& a, const cubicgen::ComplexVector& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("cubicgen-" + tag + "-" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testing_support
