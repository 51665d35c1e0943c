// SPDX-License-Identifier: Apache-2.0
//
// Angle grids, scalar complex far-field patterns and the metrics used to
// summarise them (peak direction, sidelobe level, half-power beamwidth).
//
// Angles are degrees throughout. Elevation theta runs over [-90, 90] so a
// single azimuth cut phi covers a full plane: (theta < 0, phi) is the same
// direction as (|theta|, phi + 180).

#ifndef DBRIS_FIELD_HPP
#define DBRIS_FIELD_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dbris
{

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kDbFloor = -120.0;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Free-space wavenumber in rad/m.
inline double wavenumber(double frequency_hz) { return 2.0 * kPi * frequency_hz / kSpeedOfLight; }

struct Direction
{
    double theta_deg = 0.0;
    double phi_deg = 0.0;
};

// Transverse (x, y) part of the unit vector pointing to (theta, phi).
struct Transverse
{
    double ux = 0.0;
    double uy = 0.0;
};
Transverse transverse(const Direction& d);

class AngleGrid
{
public:
    // theta_start..theta_stop inclusive with the given step; phi values must
    // themselves be uniformly spaced by phi_step.
    static AngleGrid uniform(double theta_start, double theta_stop, double theta_step,
                             std::vector<double> phi_values, double phi_step = 90.0);

    AngleGrid(std::vector<double> theta, std::vector<double> phi, double theta_step, double phi_step);

    std::span<const double> theta() const { return theta_; }
    std::span<const double> phi() const { return phi_; }
    double theta_step() const { return theta_step_; }
    double phi_step() const { return phi_step_; }

    std::size_t ntheta() const { return theta_.size(); }
    std::size_t nphi() const { return phi_.size(); }
    std::size_t size() const { return theta_.size() * phi_.size(); }

    // Row-major: theta outer, phi inner.
    std::size_t index(std::size_t it, std::size_t ip) const { return it * phi_.size() + ip; }
    Direction direction(std::size_t flat) const;

    std::optional<std::size_t> find_theta(double theta_deg) const;
    std::optional<std::size_t> find_phi(double phi_deg) const;
    std::optional<std::size_t> find(const Direction& d) const;

    bool operator==(const AngleGrid& other) const = default;

private:
    std::vector<double> theta_;
    std::vector<double> phi_;
    double theta_step_;
    double phi_step_;
};

class ComplexPattern
{
public:
    ComplexPattern(AngleGrid grid, std::vector<cplx> values);
    static ComplexPattern zeros(AngleGrid grid);

    const AngleGrid& grid() const { return grid_; }
    std::span<const cplx> values() const { return values_; }
    std::span<cplx> values() { return values_; }

    cplx at(std::size_t it, std::size_t ip) const { return values_[grid_.index(it, ip)]; }

    // Values along the phi cut, ordered by increasing theta.
    std::vector<cplx> cut(double phi_deg) const;

private:
    AngleGrid grid_;
    std::vector<cplx> values_;
};

struct PatternMetrics
{
    Direction peak_direction;
    double peak_level_db = 0.0;      // cut peak relative to the global pattern maximum
    double sidelobe_level_db = kDbFloor;
    double half_power_beamwidth_deg = 0.0;
};

PatternMetrics pattern_metrics(const ComplexPattern& p, double cut_phi_deg);

// 20 log10 |value| normalised to a 0 dB peak, floored at kDbFloor.
std::vector<double> pattern_db(const ComplexPattern& p);
std::vector<double> magnitude_db(std::span<const cplx> values);

// Cut-level helpers shared with the measurement module.
struct CutLobe
{
    std::size_t peak = 0;
    std::size_t left_null = 0;
    std::size_t right_null = 0;
};
CutLobe main_lobe(std::span<const double> magnitude);
double sidelobe_level_db(std::span<const double> magnitude, const CutLobe& lobe);
double half_power_beamwidth(std::span<const double> magnitude, std::span<const double> theta, std::size_t peak);

} // namespace dbris

#endif
