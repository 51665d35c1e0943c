// SPDX-License-Identifier: Apache-2.0
//
// Sub-6 GHz element topology: port incidence matrix, geometry vector,
// DC-feeding feasibility, per-state reflection phases, the mean phase-entropy
// objective and the genetic search over geometry bitstrings.

#ifndef DBRIS_TOPOLOGY_HPP
#define DBRIS_TOPOLOGY_HPP

#include "dbris/em_oracle.hpp"
#include "dbris/phase_entropy.hpp"
#include "dbris/thevenin.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace dbris
{

// Y(a, b) = m + 1 when internal port m joins elements a and b, 0 otherwise.
// Elements and ports are 0-based in the API; Y stores 1-based port IDs.
class PortIncidenceMatrix
{
public:
    PortIncidenceMatrix(int elements, std::vector<int> y_row_major);

    // rows x cols patches; element (r, c) = r*cols + c. Ports are numbered
    // element by element, right neighbour first, then the one below.
    static PortIncidenceMatrix grid(int rows, int cols);

    int elements() const { return n_; }
    int ports() const { return static_cast<int>(ends_.size()); }
    int at(int a, int b) const { return y_[static_cast<std::size_t>(a * n_ + b)]; }
    // (n1, n2) with n1 < n2.
    std::pair<int, int> endpoints(int port) const { return ends_[static_cast<std::size_t>(port)]; }
    const std::vector<int>& data() const { return y_; }

private:
    int n_;
    std::vector<int> y_;
    std::vector<std::pair<int, int>> ends_;
};

// Port m sits halfway between its two element centres.
std::vector<Position> port_midpoints(const PortIncidenceMatrix& y, const std::vector<Position>& element_centres);

struct SwitchPlacement
{
    int port = 0;
    int anode_side = 0; // 0: anode on n1, cathode on n2; 1: the reverse

    bool operator==(const SwitchPlacement&) const = default;
};

struct GeometryVector
{
    std::vector<std::uint8_t> x0;
    std::vector<SwitchPlacement> switches;

    bool operator==(const GeometryVector&) const = default;
};

// Distinct in-range switch ports that are not also hard-wired in x0.
bool geometry_valid(const GeometryVector& x, int ports);

struct FeedingSpec
{
    std::array<int, 4> dc_points{}; // ground, then three control points

    void validate(int elements) const;
};

bool feeding_constraint(const PortIncidenceMatrix& y, const GeometryVector& x, const FeedingSpec& spec);

// 2^Q load assignments; bit j of the state index turns switch j on.
std::vector<StateVector> element_states(const GeometryVector& x);

// arg E_s at the observation direction (must be on the network grid) for
// every switch state, folded into [0, 360).
PhaseSet reflection_phases(const PortNetwork& net, const GeometryVector& x, const IncidentWave& wave,
                           const Direction& observation, const LoadConstants& k = {});

// A reconfigurable element: incidence matrix plus port geometry and coupling.
struct SubElement
{
    PortIncidenceMatrix y;
    std::vector<Position> port_positions;
    CouplingModel coupling;
};

// rows x cols patches on a square pitch, ports at the gaps.
SubElement grid_element(int rows, int cols, double pitch_m, const CouplingModel& coupling);

struct EntropyObjectiveSpec
{
    std::vector<Direction> angles;
    std::vector<double> frequencies_hz;
    std::vector<double> weights; // K*L entries indexed l*K + k; empty = uniform
    Direction incidence;
    cplx amplitude{1.0, 0.0};

    std::size_t samples() const { return angles.size() * frequencies_hz.size(); }
    void validate() const;
};

struct ObjectiveStats
{
    int null_samples = 0;
};

// Mean phase entropy over (angle, frequency) samples. Infeasible geometries
// score -infinity. Each geometry is factored once per frequency with every
// switch on; switch-off states are low-rank corrections of that solve.
class EntropyObjective
{
public:
    EntropyObjective(SubElement element, FeedingSpec feeding, EntropyObjectiveSpec spec, LoadConstants k = {});

    double operator()(const GeometryVector& x, ObjectiveStats* stats = nullptr) const;

    // Per-sample entropies, index l*K + k. Requires a valid geometry.
    std::vector<double> sample_entropies(const GeometryVector& x, ObjectiveStats* stats = nullptr) const;

    // E_s at every sample for every state: [l*K + k][state].
    std::vector<std::vector<cplx>> sample_fields(const GeometryVector& x) const;

    const SubElement& element() const { return element_; }
    const FeedingSpec& feeding() const { return feeding_; }
    const EntropyObjectiveSpec& spec() const { return spec_; }

private:
    struct Band
    {
        Eigen::MatrixXcd Z;
        Eigen::VectorXcd v;
        Eigen::MatrixXcd E; // K x M
        Eigen::VectorXcd eoc;
    };

    SubElement element_;
    FeedingSpec feeding_;
    EntropyObjectiveSpec spec_;
    LoadConstants k_;
    std::vector<Band> bands_;
};

// Same quantity by dense solves on synthesized networks, no low-rank updates.
double objective_direct(const SubElement& element, const FeedingSpec& feeding, const EntropyObjectiveSpec& spec,
                        const GeometryVector& x, const LoadConstants& k = {});

// Bitstring layout [x0 | (position bits, orientation bit) per switch].
struct GenomeLayout
{
    int ports = 0;
    int switches = 0;

    int position_bits() const;
    int size() const { return ports + switches * (position_bits() + 1); }
};

using Genome = std::vector<std::uint8_t>;

// Positions are MSB first. Out-of-range, duplicate or x0-overlapping switch
// positions decode to nullopt.
std::optional<GeometryVector> decode(const Genome& g, const GenomeLayout& layout);
Genome encode(const GeometryVector& x, const GenomeLayout& layout);

// Two-stage sampler: x0 uniform subject to four separate DC components, then
// switch placements uniform over the feasible completions of that x0.
std::optional<GeometryVector> sample_feasible(const PortIncidenceMatrix& y, const FeedingSpec& spec, int switches,
                                              std::mt19937_64& rng, int attempts);

struct GaParams
{
    int population = 64;
    int generations = 100;
    double crossover = 0.9;
    double mutation = -1.0; // < 0 means 1 / genome length
    int tournament = 3;
    int elitism = 1;
    std::uint64_t seed = 1;
    int max_evaluations = 0; // 0 = unlimited
    int init_attempts = 200000;

    void validate() const;
};

struct GaGeneration
{
    int generation = 0;
    double best = 0.0;
    double mean = 0.0; // over feasible individuals
    double feasible_fraction = 0.0;
};

struct GaResult
{
    GeometryVector best;
    double fitness = 0.0;
    std::vector<GaGeneration> history;
    int evaluations = 0;
};

using FitnessFn = std::function<double(const GeometryVector&)>;

// Fitness is only called for decodable, DC-feasible genomes; everything else
// scores -infinity. Throws InfeasiblePopulation if initialisation finds no
// feasible individual.
GaResult optimize(const PortIncidenceMatrix& y, const FeedingSpec& feeding, int switches, const FitnessFn& fitness,
                  const GaParams& params, const std::vector<Genome>* initial = nullptr);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

} // namespace dbris

#endif
