#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnd/optics.hpp"
#include "qnd/scenarios.hpp"
#include "qnd/statistics.hpp"

namespace qnd::cli {

inline constexpr int run_document_version = 1;

/// Malformed document: bad JSON, wrong types, unknown keys, version mismatch.
/// The message starts with the JSON pointer of the offending value.
class DocumentError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct MonteCarloSection {
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::optional<BeamProfile> profile;
};

struct ScanSection {
    std::optional<int> points_per_stage;
    bool reverse = false;
};

struct OutputSection {
    std::string path = "-";
    std::optional<int> precision;
};

/// Parsed run document (schema in docs/run_document.md).
struct RunDocument {
    int version = run_document_version;
    std::optional<OpticalGeometry> geometry;
    std::optional<Ensemble> ensemble;
    /// Weight sets for `intensity`: "geometry" and/or "minimum".
    std::vector<std::string> weight_sets;
    std::optional<Cascade> cascade;
    ScanSection scan;
    std::vector<double> angles;
    std::optional<MonteCarloSection> montecarlo;
    std::optional<CouplingParams> coupling;
    OutputSection output;
};

RunDocument parse_run_document(const std::string& text);
RunDocument load_run_document(const std::string& path);

/// A version-1 document holding `cascade` as inline stages.
nlohmann::ordered_json cascade_document(const Cascade& cascade, int points_per_stage);

} // namespace qnd::cli
