// csilsh: generate synthetic CSI scenes, build and query LSH fingerprint
// indexes, and run (L, T, delta) trade-off sweeps.

#include "csilsh/channel_sim.hpp"
#include "csilsh/error.hpp"
#include "csilsh/experiment.hpp"
#include "csilsh/fingerprint_store.hpp"
#include "csilsh/lsh_index.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

void add_scene_flags(CLI::App& cmd, csilsh::SceneConfig& scene, std::string& propagation) {
    cmd.add_option("--propagation", propagation, "los or nlos")->capture_default_str();
    cmd.add_option("--n", scene.n_points, "database transmitters")->capture_default_str();
    cmd.add_option("--antennas", scene.antennas, "basestation antennas")->capture_default_str();
    cmd.add_option("--subcarriers", scene.subcarriers, "subcarriers across the band")->capture_default_str();
    cmd.add_option("--carrier-hz", scene.carrier_hz, "carrier frequency")->capture_default_str();
    cmd.add_option("--bandwidth-hz", scene.bandwidth_hz, "bandwidth")->capture_default_str();
    cmd.add_option("--area-side", scene.area_side_m, "side of the square area in meters")->capture_default_str();
    cmd.add_option("--scatterers", scene.n_scatterers, "NLoS scatterer count")->capture_default_str();
    cmd.add_option("--snr-db", scene.snr_db, "SNR in dB, 'inf' disables noise")->capture_default_str();
}

std::string fmt(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") {
        return std::cout;
    }
    file.open(path);
    if (!file) {
        throw csilsh::Error(csilsh::Errc::IoError, "cannot open " + path + " for writing");
    }
    return file;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSH-accelerated CSI fingerprint positioning"};
    app.require_subcommand(1);

    csilsh::SceneConfig scene;
    std::string propagation = "los";
    unsigned threads = 1;

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic scene as dataset CSV");
    std::string gen_out;
    std::string gen_queries_out;
    std::size_t gen_queries = 0;
    add_scene_flags(*gen, scene, propagation);
    gen->add_option("--seed", scene.seed, "master seed")->required();
    gen->add_option("--out", gen_out, "dataset CSV path")->required();
    gen->add_option("--queries", gen_queries, "held-out query transmitters to generate")->capture_default_str();
    gen->add_option("--queries-out", gen_queries_out, "query CSV path (with --queries)");
    gen->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();

    // build
    auto* build = app.add_subcommand("build", "build an LSH index over a dataset CSV");
    std::string build_data;
    std::string build_out;
    csilsh::HashConfig hash;
    build->add_option("--data", build_data, "dataset CSV")->required();
    build->add_option("--out", build_out, "index file")->required();
    build->add_option("--L", hash.bits, "hash length in bits")->capture_default_str();
    build->add_option("--T", hash.tables, "number of tables")->capture_default_str();
    build->add_option("--delta", hash.delta, "default Hamming threshold")->capture_default_str();
    build->add_option("--seed", hash.seed, "index seed")->capture_default_str();
    build->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();

    // query
    auto* query = app.add_subcommand("query", "estimate positions of query fingerprints");
    std::string query_index;
    std::string query_data;
    std::string query_file;
    std::string query_out;
    std::size_t query_k = 2;
    std::optional<std::size_t> query_delta;
    std::string fallback = "exhaustive";
    query->add_option("--index", query_index, "index file from `build`")->required();
    query->add_option("--data", query_data, "dataset CSV the index was built from")->required();
    query->add_option("--queries", query_file, "query fingerprints (dataset CSV format)")->required();
    query->add_option("--K", query_k, "neighbors to average")->capture_default_str();
    query->add_option("--delta", query_delta, "Hamming threshold (default: the index's)");
    query->add_option("--fallback", fallback, "exhaustive or partial")->capture_default_str();
    query->add_option("--out", query_out, "output CSV, default stdout");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run an (L, T, delta) trade-off sweep");
    csilsh::SweepSpec spec;
    std::string sweep_out;
    add_scene_flags(*sweep, scene, propagation);
    sweep->add_option("--seed", spec.seed, "master seed")->required();
    sweep->add_option("--L", spec.bits_values, "hash lengths")->delimiter(',')->capture_default_str();
    sweep->add_option("--T", spec.tables_values, "table counts")->delimiter(',')->capture_default_str();
    sweep->add_option("--delta", spec.delta_values, "Hamming thresholds")->delimiter(',')->capture_default_str();
    sweep->add_option("--K", spec.k, "neighbors to average")->capture_default_str();
    sweep->add_option("--queries", spec.n_queries, "held-out queries per repeat")->capture_default_str();
    sweep->add_option("--repeats", spec.repeats, "scene seeds per point")->capture_default_str();
    sweep->add_option("--threads", spec.threads, "worker threads, 0 = all cores")->capture_default_str();
    sweep->add_option("--out", sweep_out, "metrics CSV, default stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*gen) {
            scene.propagation = csilsh::parse_propagation(propagation);
            if (gen_queries > 0) {
                if (gen_queries_out.empty()) {
                    throw csilsh::Error(csilsh::Errc::InvalidConfig, "--queries needs --queries-out");
                }
                const auto split = csilsh::generate_scene_split(scene, gen_queries, threads);
                csilsh::write_dataset_csv(split.database, gen_out);
                csilsh::write_dataset_csv(split.queries, gen_queries_out);
            } else {
                csilsh::write_dataset_csv(csilsh::generate_scene(scene, threads), gen_out);
            }
            csilsh::write_scene_config(scene, gen_out + ".scene");
        } else if (*build) {
            const auto data = csilsh::read_dataset_csv(build_data);
            hash.dim = data.dim();
            const auto index = csilsh::build_index(data, hash, threads);
            csilsh::save_index(index, build_out);
        } else if (*query) {
            const auto index = csilsh::load_index(query_index);
            const auto data = csilsh::read_dataset_csv(query_data, index.config().dim);
            const auto queries = csilsh::read_dataset_csv(query_file, index.config().dim);
            csilsh::FallbackPolicy policy;
            if (fallback == "exhaustive") {
                policy = csilsh::FallbackPolicy::Exhaustive;
            } else if (fallback == "partial") {
                policy = csilsh::FallbackPolicy::Partial;
            } else {
                throw csilsh::Error(csilsh::Errc::InvalidConfig, "--fallback must be exhaustive or partial");
            }
            const std::size_t delta = query_delta.value_or(index.config().delta);
            std::ofstream file;
            std::ostream& out = open_out(query_out, file);
            out << "x_hat,y_hat,compared\n";
            for (std::size_t q = 0; q < queries.size(); ++q) {
                const auto r = csilsh::approx_knn(index, data, queries.fingerprint(q), query_k, delta, policy);
                if (r.neighbors.size() == 0) {
                    out << "nan,nan," << r.compared << '\n';
                    continue;
                }
                const auto p = csilsh::estimate_position(data, r.neighbors);
                out << fmt(p.x) << ',' << fmt(p.y) << ',' << r.compared << '\n';
            }
        } else if (*sweep) {
            scene.propagation = csilsh::parse_propagation(propagation);
            const auto rows = csilsh::run_sweep(spec, scene);
            std::ofstream file;
            csilsh::write_metrics_csv(rows, open_out(sweep_out, file));
        }
    } catch (const csilsh::Error& e) {
        std::cerr << "csilsh: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "csilsh: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
