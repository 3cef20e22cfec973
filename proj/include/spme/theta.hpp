#pragma once

#include <array>
#include <cstddef>

namespace spme {

/// The five estimated quantities in SI units.
struct PhysicalTheta {
    double negative_diffusivity;     ///< D_n [m^2/s]
    double positive_diffusivity;     ///< D_p [m^2/s]
    double electrolyte_diffusivity;  ///< D_e [m^2/s]
    double transference;             ///< t+ [-]
    double noise_variance;           ///< sigma^2 [V^2]

    /// D's > 0, 0 < t+ < 1, sigma^2 > 0 (all finite).
    bool valid() const;

    bool operator==(const PhysicalTheta&) const = default;
};

/// Sampling-space coordinates:
/// (D_n * 1e14, D_p * 1e13, D_e * 1e10, t+, ln sigma^2).
class ThetaVector {
public:
    static constexpr std::size_t size = 5;
    static constexpr double negative_scale = 1e14;
    static constexpr double positive_scale = 1e13;
    static constexpr double electrolyte_scale = 1e10;

    enum Index : std::size_t { neg_diffusivity = 0, pos_diffusivity, el_diffusivity, transference, log_noise };

    ThetaVector() = default;
    explicit ThetaVector(const std::array<double, size>& scaled) : v_(scaled) {}

    static ThetaVector from_physical(const PhysicalTheta& p);
    PhysicalTheta to_physical() const;

    bool valid() const { return to_physical().valid(); }

    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    const std::array<double, size>& values() const { return v_; }

    bool operator==(const ThetaVector&) const = default;

private:
    std::array<double, size> v_{};
};

/// Row labels of reported tables.
inline constexpr std::array<const char*, ThetaVector::size> parameter_labels{"D_n", "D_p", "D_e", "t_plus", "sigma2"};

/// sigma^2 is reported in units of 1e-9 V^2.
inline constexpr double reported_noise_unit = 1e-9;

/// Scaled D's and t+, followed by sigma^2 / reported_noise_unit.
std::array<double, ThetaVector::size> reported(const ThetaVector& theta);

/// Nominal truth: the default cell diffusivities and transference number
/// with noise variance 1.6e-9 V^2.
PhysicalTheta default_true_theta();

}  // namespace spme
