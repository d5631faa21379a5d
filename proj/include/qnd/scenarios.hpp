#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qnd/statistics.hpp"

namespace qnd {

/// Built-in dissociation cascades, named "n-m" by members in tube A and B.
enum class CascadeKind { Dimer11, Trimer12, Tetramer13, Tetramer22 };

std::string to_string(CascadeKind kind);
CascadeKind cascade_kind_from_string(const std::string& name);

struct Stage {
    std::string label;
    Ensemble ensemble;
};

/// Ordered ensemble stages sharing the same per-tube means.
struct Cascade {
    std::string name;
    Eigen::Index tube_count = 2;
    std::vector<Stage> stages;
    double molecule_scale = 1.0;

    /// Minimum weights from the first stage's means; held for the whole scan.
    Eigen::VectorXcd weights() const;
};

/// Throws ValidationError if stages disagree on tube count or per-tube means
/// (relative tolerance 1e-12), or the cascade is empty.
void validate_cascade(const Cascade& cascade);

/// The dissociation sequence of `kind` with N complexes of the bound kind
/// on average. Stage 0 is the fully bound state.
Cascade build_cascade(CascadeKind kind, double molecule_scale);

/// Same stages in reverse order: an association sequence.
Cascade reversed(const Cascade& cascade);

/// Bound fraction p of `bound` mixed with (1 - p) of `dissociated`: every
/// mean count of the first scaled by p, of the second by 1 - p.
Ensemble mix(const Ensemble& bound, const Ensemble& dissociated, double bound_fraction);

struct ScanPoint {
    /// Schematic axis in [0, K - 1] for K stages.
    double parameter = 0.0;
    /// Stage whose species carry weight `bound_fraction`; the rest is stage + 1.
    std::size_t stage_index = 0;
    double bound_fraction = 1.0;
    std::string stage_label;
    Ensemble ensemble{2};
    IntensityReport report;
};

/// Linear bound-fraction interpolation between consecutive stages.
/// `points_per_stage` >= 2 counts both plateau endpoints of each step; shared
/// endpoints are emitted once. Integer parameters use the stage ensembles
/// unchanged.
std::vector<ScanPoint> scan(const Cascade& cascade, int points_per_stage);

} // namespace qnd
