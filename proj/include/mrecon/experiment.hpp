#pragma once

#include "mrecon/bounds.hpp"
#include "mrecon/embedding.hpp"
#include "mrecon/geometry.hpp"
#include "mrecon/sdp.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mrecon {

enum class Dataset { Segment, Circle, SphereGrid, SphereUniform, SwissRoll };
// exact: intrinsic distances; graph: shortest paths in the eps-graph of the
// sample; euclidean: straight-line distances in the ambient space
enum class DistanceSource { Exact, Graph, Euclidean };
enum class MetricKind { Euclidean, Graph };

struct ExperimentConfig {
    std::string name = "custom";
    Dataset dataset = Dataset::Segment;
    int k = 100;
    double eps = 0.2;
    int n = 2;
    double c2 = 0.0; // 0 means 2/pi
    DistanceSource distance_source = DistanceSource::Exact;
    MetricKind recovered_metric = MetricKind::Euclidean;
    std::optional<double> graph_eps; // radius of the Isomap-style graph; defaults to eps
    std::uint64_t seed = 0;
    SolverConfig solver;
    std::string output_dir;

    double resolved_c2() const;
    double resolved_graph_eps() const { return graph_eps.value_or(eps); }
};

std::string to_string(Dataset d);
std::string to_string(DistanceSource s);
std::string to_string(MetricKind m);

// Set one field from its flag name (with or without leading dashes, '-' or '_').
// Throws InvalidArgument on unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// Flat key=value text; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
void validate(const ExperimentConfig& cfg);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);
// Reference Err for a preset, if any.
std::optional<double> published_err(const std::string& name);

struct Instance {
    Sample sample;         // cloud and exact intrinsic distances
    DistanceMatrix input;  // distances handed to the solver
    ReachConstants consts; // for the distortion audit
};

Instance make_instance(const ExperimentConfig& cfg);

struct ExperimentReport {
    ExperimentConfig config;
    double err = 0.0;
    double err_full_rank = 0.0;
    double rank_dropped_mass = 0.0;
    SdpSolution solution;
    Certificate certificate;
    DistortionAudit audit;
    double eps_limit = 0.0; // min(eps0, 1/(c1 + 1)); exceeding it is reported, not enforced
    bool eps_in_regime = false;
    int eps_pairs = 0;
    double seconds = 0.0; // wall time, kept out of the JSON so artifacts stay reproducible
    PointCloud recovered;

    std::string to_json() const;
};

// Runs the pipeline and, when output_dir is set, writes the artifacts there.
// Stage failures leave a FAILED marker and are rethrown as StageError.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
    std::string experiment;
    int k = 0;
    std::string eps;
    int n = 0;
    double err = 0.0;
    std::optional<double> paper_err;
    bool converged = false;
    bool failed = false;
};

std::string summary_csv(const std::vector<SummaryRow>& rows);

struct ReproduceResult {
    std::vector<SummaryRow> rows;
    int exit_code = 0;
};

// The five reference presets, the snowflake MDS regression and the MVU circle demo.
ReproduceResult reproduce_all(std::uint64_t seed, const std::string& output_dir);

} // namespace mrecon
