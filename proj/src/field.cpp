// SPDX-License-Identifier: Apache-2.0
#include "dbris/field.hpp"

#include "dbris/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dbris
{

namespace
{

constexpr double kAngleTol = 1e-9;
constexpr double kStepTol = 1e-6;
constexpr double kHalfPowerDb = -3.0102999566398120;

bool all_finite(std::span<const cplx> v)
{
    return std::all_of(v.begin(), v.end(), [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double wrap360(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w < 0.0)
        w += 360.0;
    if (w >= 360.0 - kAngleTol)
        w = 0.0;
    return w;
}

void check_uniform(const std::vector<double>& v, double step, const char* axis)
{
    if (!(step > 0.0))
        throw Error(ErrorKind::InvalidInput, std::string(axis) + " step must be positive");
    for (std::size_t i = 1; i < v.size(); ++i)
    {
        if (std::abs((v[i] - v[i - 1]) - step) > kStepTol)
            throw Error(ErrorKind::InvalidInput, std::string(axis) + " samples are not uniformly spaced by the declared step");
    }
}

} // namespace

Transverse transverse(const Direction& d)
{
    const double st = std::sin(deg2rad(d.theta_deg));
    return {st * std::cos(deg2rad(d.phi_deg)), st * std::sin(deg2rad(d.phi_deg))};
}

AngleGrid AngleGrid::uniform(double theta_start, double theta_stop, double theta_step,
                             std::vector<double> phi_values, double phi_step)
{
    if (!(theta_step > 0.0) || theta_stop < theta_start)
        throw Error(ErrorKind::InvalidInput, "invalid theta range");
    const double span = (theta_stop - theta_start) / theta_step;
    const auto n = static_cast<std::size_t>(std::llround(span)) + 1;
    if (std::abs(span - std::round(span)) > 1e-9)
        throw Error(ErrorKind::InvalidInput, "theta range is not a whole number of steps");
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i)
        theta[i] = theta_start + static_cast<double>(i) * theta_step;
    return AngleGrid(std::move(theta), std::move(phi_values), theta_step, phi_step);
}

AngleGrid::AngleGrid(std::vector<double> theta, std::vector<double> phi, double theta_step, double phi_step)
    : theta_(std::move(theta)), phi_(std::move(phi)), theta_step_(theta_step), phi_step_(phi_step)
{
    if (theta_.empty() || phi_.empty())
        throw Error(ErrorKind::InvalidInput, "angle grid must be non-empty");
    for (std::size_t i = 0; i < theta_.size(); ++i)
    {
        if (theta_[i] < -90.0 - kAngleTol || theta_[i] > 90.0 + kAngleTol)
            throw Error(ErrorKind::InvalidInput, "theta outside [-90, 90]");
        if (i > 0 && !(theta_[i] > theta_[i - 1]))
            throw Error(ErrorKind::InvalidInput, "theta samples must be strictly increasing");
    }
    for (double p : phi_)
    {
        if (p < 0.0 || p >= 360.0)
            throw Error(ErrorKind::InvalidInput, "phi outside [0, 360)");
    }
    check_uniform(theta_, theta_step_, "theta");
    check_uniform(phi_, phi_step_, "phi");
}

Direction AngleGrid::direction(std::size_t flat) const
{
    return {theta_[flat / phi_.size()], phi_[flat % phi_.size()]};
}

std::optional<std::size_t> AngleGrid::find_theta(double theta_deg) const
{
    for (std::size_t i = 0; i < theta_.size(); ++i)
    {
        if (std::abs(theta_[i] - theta_deg) <= kAngleTol)
            return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> AngleGrid::find_phi(double phi_deg) const
{
    const double w = wrap360(phi_deg);
    for (std::size_t i = 0; i < phi_.size(); ++i)
    {
        if (std::abs(phi_[i] - w) <= kAngleTol)
            return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> AngleGrid::find(const Direction& d) const
{
    auto it = find_theta(d.theta_deg);
    auto ip = find_phi(d.phi_deg);
    if (it && ip)
        return index(*it, *ip);
    // Same direction written with the opposite elevation sign.
    it = find_theta(-d.theta_deg);
    ip = find_phi(d.phi_deg + 180.0);
    if (it && ip)
        return index(*it, *ip);
    return std::nullopt;
}

ComplexPattern::ComplexPattern(AngleGrid grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_.size())
        throw Error(ErrorKind::InvalidInput, "pattern length does not match grid size");
    if (!all_finite(values_))
        throw Error(ErrorKind::InvalidInput, "pattern contains non-finite values");
}

ComplexPattern ComplexPattern::zeros(AngleGrid grid)
{
    const auto n = grid.size();
    return ComplexPattern(std::move(grid), std::vector<cplx>(n));
}

std::vector<cplx> ComplexPattern::cut(double phi_deg) const
{
    const auto ip = grid_.find_phi(phi_deg);
    if (!ip)
        throw Error(ErrorKind::InvalidInput, "cut phi " + std::to_string(phi_deg) + " is not on the grid");
    std::vector<cplx> out(grid_.ntheta());
    for (std::size_t it = 0; it < grid_.ntheta(); ++it)
        out[it] = at(it, *ip);
    return out;
}

std::vector<double> magnitude_db(std::span<const cplx> values)
{
    double peak = 0.0;
    for (const auto& v : values)
        peak = std::max(peak, std::abs(v));
    if (peak == 0.0)
        throw Error(ErrorKind::EmptyPattern, "empty pattern");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const double a = std::abs(values[i]);
        out[i] = a == 0.0 ? kDbFloor : std::max(kDbFloor, 20.0 * std::log10(a / peak));
    }
    return out;
}

std::vector<double> pattern_db(const ComplexPattern& p)
{
    return magnitude_db(p.values());
}

CutLobe main_lobe(std::span<const double> mag)
{
    CutLobe lobe;
    for (std::size_t i = 1; i < mag.size(); ++i)
    {
        if (mag[i] > mag[lobe.peak])
            lobe.peak = i;
    }
    std::size_t l = lobe.peak;
    while (l > 0 && mag[l - 1] <= mag[l])
        --l;
    std::size_t r = lobe.peak;
    while (r + 1 < mag.size() && mag[r + 1] <= mag[r])
        ++r;
    lobe.left_null = l;
    lobe.right_null = r;
    return lobe;
}

double sidelobe_level_db(std::span<const double> mag, const CutLobe& lobe)
{
    const std::size_t n = mag.size();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (i >= lobe.left_null && i <= lobe.right_null)
            continue;
        const bool left_ok = i == 0 || mag[i] >= mag[i - 1];
        const bool right_ok = i + 1 == n || mag[i] >= mag[i + 1];
        if (left_ok && right_ok)
            best = std::max(best, mag[i]);
    }
    if (best == 0.0)
        return kDbFloor;
    return std::max(kDbFloor, 20.0 * std::log10(best / mag[lobe.peak]));
}

double half_power_beamwidth(std::span<const double> mag, std::span<const double> theta, std::size_t peak)
{
    const double ref = mag[peak];
    auto db = [&](std::size_t i) { return mag[i] == 0.0 ? kDbFloor : std::max(kDbFloor, 20.0 * std::log10(mag[i] / ref)); };
    auto cross = [&](std::size_t inside, std::size_t outside) {
        const double d_in = db(inside);
        const double d_out = db(outside);
        const double t = (kHalfPowerDb - d_in) / (d_out - d_in);
        return theta[inside] + t * (theta[outside] - theta[inside]);
    };

    double left = theta.front();
    for (std::size_t i = peak; i > 0; --i)
    {
        if (db(i - 1) < kHalfPowerDb)
        {
            left = cross(i, i - 1);
            break;
        }
    }
    double right = theta.back();
    for (std::size_t i = peak; i + 1 < mag.size(); ++i)
    {
        if (db(i + 1) < kHalfPowerDb)
        {
            right = cross(i, i + 1);
            break;
        }
    }
    return right - left;
}

PatternMetrics pattern_metrics(const ComplexPattern& p, double cut_phi_deg)
{
    const auto cut = p.cut(cut_phi_deg);
    std::vector<double> mag(cut.size());
    std::transform(cut.begin(), cut.end(), mag.begin(), [](const cplx& z) { return std::abs(z); });

    double global = 0.0;
    for (const auto& v : p.values())
        global = std::max(global, std::abs(v));
    const double cut_peak = *std::max_element(mag.begin(), mag.end());
    if (cut_peak == 0.0)
        throw Error(ErrorKind::EmptyPattern, "empty pattern");

    const auto lobe = main_lobe(mag);
    const auto theta = p.grid().theta();

    PatternMetrics m;
    m.peak_direction = {theta[lobe.peak], p.grid().phi()[*p.grid().find_phi(cut_phi_deg)]};
    m.peak_level_db = 20.0 * std::log10(cut_peak / global);
    m.sidelobe_level_db = sidelobe_level_db(mag, lobe);
    m.half_power_beamwidth_deg = half_power_beamwidth(mag, theta, lobe.peak);
    if (!(m.half_power_beamwidth_deg > 0.0))
        m.half_power_beamwidth_deg = p.grid().theta_step();
    return m;
}

} // namespace dbris
