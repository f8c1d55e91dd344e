#pragma once

#include "csilsh/fingerprint_store.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace csilsh {

// Synthetic massive-MIMO-OFDM scenes. A single basestation with a
// half-wavelength uniform linear array sits at the midpoint of the y = 0 edge
// of the square [0, side] x [0, side]; the array runs along x and its
// broadside points into the area (+y). Channels come from a ray-based
// geometric model: one direct path (LoS) or P single-bounce scatterer paths
// (NLoS), with free-space 1/d amplitude per segment.

inline constexpr double kSpeedOfLight = 299'792'458.0;

enum class Propagation { LoS, NLoS };

struct SceneConfig {
    std::size_t antennas = 32;
    std::size_t subcarriers = 8;
    double carrier_hz = 2.68e9;
    double bandwidth_hz = 20e6;
    double area_side_m = 200.0;
    std::size_t n_points = 2000;
    Propagation propagation = Propagation::LoS;
    std::size_t n_scatterers = 10;
    /// +infinity disables noise.
    double snr_db = 20.0;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t feature_dim() const noexcept { return antennas * subcarriers; }

    friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// Plain `key=value` text, one field per line.
void write_scene_config(const SceneConfig& config, std::ostream& out);
void write_scene_config(const SceneConfig& config, const std::string& path);
SceneConfig read_scene_config(std::istream& in);
SceneConfig read_scene_config(const std::string& path);

std::string to_string(Propagation p);
Propagation parse_propagation(const std::string& s);

/// Complex antenna x subcarrier frequency response, row-major by antenna.
class ChannelMatrix {
public:
    ChannelMatrix(std::size_t antennas, std::size_t subcarriers)
        : antennas_(antennas), subcarriers_(subcarriers), entries_(antennas * subcarriers) {}

    std::size_t antennas() const noexcept { return antennas_; }
    std::size_t subcarriers() const noexcept { return subcarriers_; }

    std::complex<double>& at(std::size_t a, std::size_t s) { return entries_[a * subcarriers_ + s]; }
    const std::complex<double>& at(std::size_t a, std::size_t s) const { return entries_[a * subcarriers_ + s]; }

    std::span<std::complex<double>> entries() noexcept { return entries_; }
    std::span<const std::complex<double>> entries() const noexcept { return entries_; }

    double frobenius_norm_squared() const noexcept;

    friend bool operator==(const ChannelMatrix&, const ChannelMatrix&) = default;

private:
    std::size_t antennas_;
    std::size_t subcarriers_;
    std::vector<std::complex<double>> entries_;
};

/// Scene-global geometry derived from a config: basestation location, the
/// NLoS scatterers and their per-path phases. Shared by every transmitter.
struct Scene {
    SceneConfig config;
    Position basestation;
    std::vector<Position> scatterers;
    std::vector<double> path_phases;

    /// Frequency of subcarrier s; S subcarriers span the band edge to edge.
    double subcarrier_hz(std::size_t s) const;
};

Scene make_scene(const SceneConfig& config);

/// One propagation path as seen at the array.
struct PathGeometry {
    double delay_s;
    double azimuth_rad;  ///< from array broadside; positive towards +x
    double amplitude;
    double phase_rad;
};

/// Paths for a transmitter at `pos`; throws Errc::PositionOutOfArea outside the square.
std::vector<PathGeometry> trace_paths(const Scene& scene, const Position& pos);

/// Sums paths: entry (a, s) = sum_p g_p e^{j phi_p} e^{-j 2 pi f_s tau_p} e^{j pi a sin theta_p}.
ChannelMatrix synthesize(const SceneConfig& config, const Scene& scene, std::span<const PathGeometry> paths);

ChannelMatrix los_channel(const Scene& scene, const Position& pos);
ChannelMatrix los_channel(const SceneConfig& config, const Position& pos);
ChannelMatrix nlos_channel(const Scene& scene, const Position& pos);
ChannelMatrix nlos_channel(const SceneConfig& config, const Position& pos);

/// H + W, W i.i.d. circularly-symmetric Gaussian with E||W||_F^2 = ||H||_F^2 / 10^(snr_db/10).
ChannelMatrix add_noise(const ChannelMatrix& h, double snr_db, std::uint64_t seed);

/// Magnitudes after a unitary DFT over antennas (beamspace) and a unitary
/// inverse DFT over subcarriers (delay), flattened beam-major: index b * S + k.
std::vector<double> extract_features(const ChannelMatrix& h);

/// Database scene of config.n_points transmitters.
Dataset generate_scene(const SceneConfig& config, unsigned threads = 1);

struct SceneSplit {
    Dataset database;
    Dataset queries;
};

/// config.n_points database transmitters plus `n_queries` held-out ones from
/// the same scene (same scatterers), drawn as points N .. N+Q-1 of one stream.
SceneSplit generate_scene_split(const SceneConfig& config, std::size_t n_queries, unsigned threads = 1);

} // namespace csilsh
