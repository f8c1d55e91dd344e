#include "csilsh/channel_sim.hpp"

#include "csilsh/error.hpp"
#include "csilsh/parallel.hpp"
#include "csilsh/random.hpp"

#include "text.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>

namespace csilsh {

namespace {

using cd = std::complex<double>;

// Segment lengths below this are clamped so the 1/d gain stays finite.
constexpr double kMinSegmentM = 1.0;

double segment(const Position& a, const Position& b) {
    return distance(a, b);
}

double azimuth_from(const Position& bs, const Position& p) {
    return std::atan2(p.x - bs.x, p.y - bs.y);
}

void check_inside(const SceneConfig& c, const Position& p) {
    if (!(p.x >= 0.0 && p.x <= c.area_side_m && p.y >= 0.0 && p.y <= c.area_side_m)) {
        throw Error(Errc::PositionOutOfArea, "(" + text::format_double(p.x) + ", " + text::format_double(p.y) +
                                                 ") outside [0, " + text::format_double(c.area_side_m) + "]^2");
    }
}

Dataset generate_points(const SceneConfig& config, std::size_t count, unsigned threads) {
    config.validate();
    const Scene scene = make_scene(config);
    const std::size_t dim = config.feature_dim();
    std::vector<double> features(count * dim);
    std::vector<Position> positions(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const std::uint64_t point_seed = derive_seed(config.seed, "point", i);
        Rng rng(point_seed);
        const Position p{rng.uniform(0.0, config.area_side_m), rng.uniform(0.0, config.area_side_m)};
        const ChannelMatrix clean =
            config.propagation == Propagation::LoS ? los_channel(scene, p) : nlos_channel(scene, p);
        const ChannelMatrix noisy = add_noise(clean, config.snr_db, derive_seed(point_seed, "noise"));
        const auto f = extract_features(noisy);
        std::copy(f.begin(), f.end(), features.begin() + static_cast<std::ptrdiff_t>(i * dim));
        positions[i] = p;
    });
    return Dataset(dim, std::move(features), std::move(positions));
}

} // namespace

void SceneConfig::validate() const {
    const auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
    if (antennas == 0 || subcarriers == 0) {
        fail("antennas and subcarriers must be >= 1");
    }
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
        fail("carrier frequency must be positive");
    }
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) {
        fail("bandwidth must be positive");
    }
    if (!(area_side_m > 0.0) || !std::isfinite(area_side_m)) {
        fail("area side must be positive");
    }
    if (n_points == 0) {
        fail("n_points must be >= 1");
    }
    if (propagation == Propagation::NLoS && n_scatterers == 0) {
        fail("NLoS scenes need at least one scatterer");
    }
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        fail("snr_db must be a number or +inf");
    }
}

std::string to_string(Propagation p) {
    return p == Propagation::LoS ? "los" : "nlos";
}

Propagation parse_propagation(const std::string& s) {
    if (s == "los" || s == "LoS" || s == "LOS") {
        return Propagation::LoS;
    }
    if (s == "nlos" || s == "NLoS" || s == "NLOS") {
        return Propagation::NLoS;
    }
    throw Error(Errc::InvalidConfig, "propagation must be 'los' or 'nlos', got '" + s + "'");
}

void write_scene_config(const SceneConfig& c, std::ostream& out) {
    out << "antennas=" << c.antennas << '\n'
        << "subcarriers=" << c.subcarriers << '\n'
        << "carrier_hz=" << text::format_double(c.carrier_hz) << '\n'
        << "bandwidth_hz=" << text::format_double(c.bandwidth_hz) << '\n'
        << "area_side_m=" << text::format_double(c.area_side_m) << '\n'
        << "n_points=" << c.n_points << '\n'
        << "propagation=" << to_string(c.propagation) << '\n'
        << "n_scatterers=" << c.n_scatterers << '\n'
        << "snr_db=" << text::format_double(c.snr_db) << '\n'
        << "seed=" << c.seed << '\n';
    if (!out) {
        throw Error(Errc::IoError, "failed writing scene config");
    }
}

void write_scene_config(const SceneConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(Errc::IoError, "cannot open " + path + " for writing");
    }
    write_scene_config(config, out);
}

SceneConfig read_scene_config(std::istream& in) {
    std::map<std::string, std::string, std::less<>> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto l = text::chomp(line);
        if (l.empty() || l.front() == '#') {
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::InvalidConfig, "scene config line without '=': " + std::string(l));
        }
        kv[std::string(l.substr(0, eq))] = std::string(l.substr(eq + 1));
    }
    SceneConfig c;
    const auto num = [&](const char* key, double& field) {
        if (auto it = kv.find(key); it != kv.end()) {
            field = text::parse_double(it->second, Errc::InvalidConfig, key);
            kv.erase(it);
        }
    };
    const auto count = [&](const char* key, auto& field) {
        if (auto it = kv.find(key); it != kv.end()) {
            field = text::parse_int<std::remove_reference_t<decltype(field)>>(it->second, Errc::InvalidConfig, key);
            kv.erase(it);
        }
    };
    count("antennas", c.antennas);
    count("subcarriers", c.subcarriers);
    num("carrier_hz", c.carrier_hz);
    num("bandwidth_hz", c.bandwidth_hz);
    num("area_side_m", c.area_side_m);
    count("n_points", c.n_points);
    if (auto it = kv.find("propagation"); it != kv.end()) {
        c.propagation = parse_propagation(it->second);
        kv.erase(it);
    }
    count("n_scatterers", c.n_scatterers);
    num("snr_db", c.snr_db);
    count("seed", c.seed);
    if (!kv.empty()) {
        throw Error(Errc::InvalidConfig, "unknown scene config key '" + kv.begin()->first + "'");
    }
    c.validate();
    return c;
}

SceneConfig read_scene_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path);
    }
    return read_scene_config(in);
}

double ChannelMatrix::frobenius_norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto& v : entries_) {
        acc += std::norm(v);
    }
    return acc;
}

double Scene::subcarrier_hz(std::size_t s) const {
    if (config.subcarriers == 1) {
        return config.carrier_hz;
    }
    const double spacing = config.bandwidth_hz / static_cast<double>(config.subcarriers - 1);
    return config.carrier_hz - 0.5 * config.bandwidth_hz + spacing * static_cast<double>(s);
}

Scene make_scene(const SceneConfig& config) {
    config.validate();
    Scene scene{config, Position{0.5 * config.area_side_m, 0.0}, {}, {}};
    if (config.propagation == Propagation::NLoS) {
        Rng rng(derive_seed(config.seed, "scatterers"));
        scene.scatterers.reserve(config.n_scatterers);
        scene.path_phases.reserve(config.n_scatterers);
        for (std::size_t p = 0; p < config.n_scatterers; ++p) {
            const double x = rng.uniform(0.0, config.area_side_m);
            const double y = rng.uniform(0.0, config.area_side_m);
            scene.scatterers.push_back({x, y});
            scene.path_phases.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
        }
    }
    return scene;
}

std::vector<PathGeometry> trace_paths(const Scene& scene, const Position& pos) {
    check_inside(scene.config, pos);
    const Position& bs = scene.basestation;
    std::vector<PathGeometry> paths;
    if (scene.config.propagation == Propagation::LoS) {
        const double d = segment(pos, bs);
        paths.push_back({d / kSpeedOfLight, azimuth_from(bs, pos), 1.0 / std::max(d, kMinSegmentM), 0.0});
        return paths;
    }
    paths.reserve(scene.scatterers.size());
    for (std::size_t p = 0; p < scene.scatterers.size(); ++p) {
        const Position& sc = scene.scatterers[p];
        const double d1 = segment(pos, sc);
        const double d2 = segment(sc, bs);
        paths.push_back({(d1 + d2) / kSpeedOfLight, azimuth_from(bs, sc),
                         1.0 / (std::max(d1, kMinSegmentM) * std::max(d2, kMinSegmentM)), scene.path_phases[p]});
    }
    return paths;
}

ChannelMatrix synthesize(const SceneConfig& config, const Scene& scene, std::span<const PathGeometry> paths) {
    ChannelMatrix h(config.antennas, config.subcarriers);
    const double two_pi = 2.0 * std::numbers::pi;
    for (const auto& path : paths) {
        const double spatial = std::numbers::pi * std::sin(path.azimuth_rad);
        for (std::size_t s = 0; s < config.subcarriers; ++s) {
            // Reduce f * tau modulo one cycle before scaling by 2 pi.
            const double cycles = scene.subcarrier_hz(s) * path.delay_s;
            const double temporal = -two_pi * (cycles - std::floor(cycles)) + path.phase_rad;
            for (std::size_t a = 0; a < config.antennas; ++a) {
                h.at(a, s) += std::polar(path.amplitude, temporal + spatial * static_cast<double>(a));
            }
        }
    }
    return h;
}

ChannelMatrix los_channel(const Scene& scene, const Position& pos) {
    if (scene.config.propagation != Propagation::LoS) {
        Scene los = scene;
        los.config.propagation = Propagation::LoS;
        return synthesize(los.config, los, trace_paths(los, pos));
    }
    return synthesize(scene.config, scene, trace_paths(scene, pos));
}

ChannelMatrix los_channel(const SceneConfig& config, const Position& pos) {
    SceneConfig c = config;
    c.propagation = Propagation::LoS;
    return los_channel(make_scene(c), pos);
}

ChannelMatrix nlos_channel(const Scene& scene, const Position& pos) {
    if (scene.config.propagation != Propagation::NLoS) {
        throw Error(Errc::InvalidConfig, "nlos_channel needs a scene built with NLoS propagation");
    }
    return synthesize(scene.config, scene, trace_paths(scene, pos));
}

ChannelMatrix nlos_channel(const SceneConfig& config, const Position& pos) {
    SceneConfig c = config;
    c.propagation = Propagation::NLoS;
    return nlos_channel(make_scene(c), pos);
}

ChannelMatrix add_noise(const ChannelMatrix& h, double snr_db, std::uint64_t seed) {
    ChannelMatrix out = h;
    if (snr_db == std::numeric_limits<double>::infinity()) {
        return out;
    }
    const auto entries = static_cast<double>(h.entries().size());
    const double noise_power = h.frobenius_norm_squared() / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(noise_power / (2.0 * entries));
    Rng rng(seed);
    for (auto& v : out.entries()) {
        const double re = rng.normal();
        const double im = rng.normal();
        v += cd(sigma * re, sigma * im);
    }
    return out;
}

std::vector<double> extract_features(const ChannelMatrix& h) {
    const std::size_t na = h.antennas();
    const std::size_t ns = h.subcarriers();
    const double two_pi = 2.0 * std::numbers::pi;

    // Beamspace: X[b, s] = 1/sqrt(A) sum_a H[a, s] e^{-j 2 pi a b / A}.
    std::vector<cd> beam(na * ns);
    std::vector<cd> tw_a(na);
    for (std::size_t i = 0; i < na; ++i) {
        tw_a[i] = std::polar(1.0, -two_pi * static_cast<double>(i) / static_cast<double>(na));
    }
    const double sa = 1.0 / std::sqrt(static_cast<double>(na));
    for (std::size_t b = 0; b < na; ++b) {
        for (std::size_t s = 0; s < ns; ++s) {
            cd acc = 0.0;
            for (std::size_t a = 0; a < na; ++a) {
                acc += h.at(a, s) * tw_a[(a * b) % na];
            }
            beam[b * ns + s] = acc * sa;
        }
    }

    // Delay: Y[b, k] = 1/sqrt(S) sum_s X[b, s] e^{+j 2 pi s k / S}.
    std::vector<cd> tw_s(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        tw_s[i] = std::polar(1.0, two_pi * static_cast<double>(i) / static_cast<double>(ns));
    }
    const double ss = 1.0 / std::sqrt(static_cast<double>(ns));
    std::vector<double> features(na * ns);
    for (std::size_t b = 0; b < na; ++b) {
        for (std::size_t k = 0; k < ns; ++k) {
            cd acc = 0.0;
            for (std::size_t s = 0; s < ns; ++s) {
                acc += beam[b * ns + s] * tw_s[(s * k) % ns];
            }
            features[b * ns + k] = std::abs(acc * ss);
        }
    }
    return features;
}

Dataset generate_scene(const SceneConfig& config, unsigned threads) {
    return generate_points(config, config.n_points, threads);
}

SceneSplit generate_scene_split(const SceneConfig& config, std::size_t n_queries, unsigned threads) {
    if (n_queries == 0) {
        throw Error(Errc::InvalidConfig, "need at least one query");
    }
    const Dataset all = generate_points(config, config.n_points + n_queries, threads);
    return {all.slice(0, config.n_points), all.slice(config.n_points, n_queries)};
}

} // namespace csilsh
