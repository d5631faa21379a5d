#include "qnd/scenarios.hpp"

#include <algorithm>
#include <cmath>

namespace qnd {

namespace {

Species make_species(std::string name, int in_a, int in_b, double mean_count)
{
    Eigen::VectorXi c(2);
    c << in_a, in_b;
    return {std::move(name), std::move(c), mean_count};
}

Stage make_stage(std::string label, std::vector<Species> species)
{
    return {std::move(label), Ensemble(2, std::move(species))};
}

} // namespace

std::string to_string(CascadeKind kind)
{
    switch (kind) {
    case CascadeKind::Dimer11: return "dimer11";
    case CascadeKind::Trimer12: return "trimer12";
    case CascadeKind::Tetramer13: return "tetramer13";
    case CascadeKind::Tetramer22: return "tetramer22";
    }
    return "unknown";
}

CascadeKind cascade_kind_from_string(const std::string& name)
{
    for (CascadeKind k : {CascadeKind::Dimer11, CascadeKind::Trimer12, CascadeKind::Tetramer13, CascadeKind::Tetramer22})
        if (name == to_string(k))
            return k;
    throw std::invalid_argument("unknown cascade kind '" + name +
                                "' (expected dimer11, trimer12, tetramer13 or tetramer22)");
}

Eigen::VectorXcd Cascade::weights() const
{
    if (stages.empty())
        throw ValidationError("cascade has no stages");
    return minimum_weights(stages.front().ensemble);
}

void validate_cascade(const Cascade& cascade)
{
    if (cascade.stages.empty())
        throw ValidationError("cascade '" + cascade.name + "' has no stages");
    const Eigen::VectorXd reference = tube_means(cascade.stages.front().ensemble);
    for (const Stage& stage : cascade.stages) {
        if (stage.ensemble.tube_count() != cascade.tube_count)
            throw ValidationError("stage '" + stage.label + "' has the wrong tube count");
        const Eigen::VectorXd mu = tube_means(stage.ensemble);
        const double scale = std::max(1.0, reference.cwiseAbs().maxCoeff());
        if ((mu - reference).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw ValidationError("stage '" + stage.label + "' changes the per-tube mean molecule numbers");
    }
}

Cascade build_cascade(CascadeKind kind, double n)
{
    if (!(n > 0.0) || !std::isfinite(n))
        throw ValidationError("molecule scale N must be positive");

    Cascade c;
    c.name = to_string(kind);
    c.tube_count = 2;
    c.molecule_scale = n;
    switch (kind) {
    case CascadeKind::Dimer11:
        c.stages = {
            make_stage("dimers 1-1", {make_species("dimer 1-1", 1, 1, n)}),
            make_stage("free", {make_species("free A", 1, 0, n), make_species("free B", 0, 1, n)}),
        };
        break;
    case CascadeKind::Trimer12:
        c.stages = {
            make_stage("trimers 1-2", {make_species("trimer 1-2", 1, 2, n)}),
            make_stage("dimers 1-1 + free",
                       {make_species("dimer 1-1", 1, 1, n), make_species("free B", 0, 1, n)}),
            make_stage("free", {make_species("free A", 1, 0, n), make_species("free B", 0, 1, 2 * n)}),
        };
        break;
    case CascadeKind::Tetramer13:
        c.stages = {
            make_stage("tetramers 1-3", {make_species("tetramer 1-3", 1, 3, n)}),
            make_stage("trimers 1-2 + free",
                       {make_species("trimer 1-2", 1, 2, n), make_species("free B", 0, 1, n)}),
            make_stage("dimers 1-1 + free",
                       {make_species("dimer 1-1", 1, 1, n), make_species("free B", 0, 1, 2 * n)}),
            make_stage("free", {make_species("free A", 1, 0, n), make_species("free B", 0, 1, 3 * n)}),
        };
        break;
    case CascadeKind::Tetramer22:
        c.stages = {
            make_stage("tetramers 2-2", {make_species("tetramer 2-2", 2, 2, n)}),
            make_stage("dimers 1-1", {make_species("dimer 1-1", 1, 1, 2 * n)}),
            make_stage("free", {make_species("free A", 1, 0, 2 * n), make_species("free B", 0, 1, 2 * n)}),
        };
        break;
    }
    return c;
}

Cascade reversed(const Cascade& cascade)
{
    Cascade out = cascade;
    out.name = cascade.name + " (association)";
    std::reverse(out.stages.begin(), out.stages.end());
    return out;
}

Ensemble mix(const Ensemble& bound, const Ensemble& dissociated, double bound_fraction)
{
    if (!(bound_fraction >= 0.0 && bound_fraction <= 1.0))
        throw ValidationError("bound fraction must lie in [0, 1]");
    return merge(bound.scaled(bound_fraction), dissociated.scaled(1.0 - bound_fraction));
}

std::vector<ScanPoint> scan(const Cascade& cascade, int points_per_stage)
{
    if (points_per_stage < 2)
        throw ValidationError("points per stage must be at least 2");
    validate_cascade(cascade);
    const Eigen::VectorXcd g = cascade.weights();

    auto plateau = [&](std::size_t k) {
        const Stage& stage = cascade.stages[k];
        return ScanPoint{static_cast<double>(k), k, 1.0, stage.label, stage.ensemble, intensity(stage.ensemble, g)};
    };

    std::vector<ScanPoint> points;
    points.push_back(plateau(0));
    const int steps = points_per_stage - 1;
    for (std::size_t k = 0; k + 1 < cascade.stages.size(); ++k) {
        const Stage& from = cascade.stages[k];
        const Stage& to = cascade.stages[k + 1];
        for (int j = 1; j < steps; ++j) {
            const double t = static_cast<double>(j) / steps;
            const double p = 1.0 - t;
            Ensemble e = mix(from.ensemble, to.ensemble, p);
            IntensityReport r = intensity(e, g);
            points.push_back({static_cast<double>(k) + t, k, p, from.label + " -> " + to.label, std::move(e), r});
        }
        points.push_back(plateau(k + 1));
    }
    return points;
}

} // namespace qnd
