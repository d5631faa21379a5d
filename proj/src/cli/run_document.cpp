#include "qnd/cli/run_document.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

namespace qnd::cli {

namespace {

using json = nlohmann::json;

// Typed, location-aware view of one JSON object.
class Node {
  public:
    Node(const json& value, std::string pointer) : value_(value), pointer_(std::move(pointer)) {}

    const std::string& pointer() const { return pointer_; }
    const json& raw() const { return value_; }

    [[noreturn]] void fail(const std::string& message) const
    {
        throw DocumentError((pointer_.empty() ? "/" : pointer_) + ": " + message);
    }

    void expect_object() const
    {
        if (!value_.is_object())
            fail("expected an object");
    }

    void allow_keys(std::initializer_list<std::string_view> keys) const
    {
        expect_object();
        for (const auto& item : value_.items()) {
            bool known = false;
            for (std::string_view k : keys)
                known = known || item.key() == k;
            if (!known)
                Node(item.value(), pointer_ + "/" + item.key()).fail("unknown key '" + item.key() + "'");
        }
    }

    bool has(const char* key) const { return value_.contains(key); }

    Node at(const char* key) const
    {
        if (!value_.contains(key))
            fail(std::string("missing required key '") + key + "'");
        return {value_.at(key), pointer_ + "/" + key};
    }

    Node at(std::size_t index) const { return {value_.at(index), pointer_ + "/" + std::to_string(index)}; }

    std::size_t array_size() const
    {
        if (!value_.is_array())
            fail("expected an array");
        return value_.size();
    }

    double number() const
    {
        if (!value_.is_number())
            fail("expected a number");
        return value_.get<double>();
    }

    std::int64_t integer() const
    {
        if (!value_.is_number_integer())
            fail("expected an integer");
        if (value_.is_number_unsigned() && value_.get<std::uint64_t>() > std::numeric_limits<std::int64_t>::max())
            fail("integer out of range");
        return value_.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer() const
    {
        if (!value_.is_number_integer() || (value_.is_number_integer() && !value_.is_number_unsigned() && value_.get<std::int64_t>() < 0))
            fail("expected a non-negative integer");
        return value_.get<std::uint64_t>();
    }

    bool boolean() const
    {
        if (!value_.is_boolean())
            fail("expected true or false");
        return value_.get<bool>();
    }

    std::string string() const
    {
        if (!value_.is_string())
            fail("expected a string");
        return value_.get<std::string>();
    }

    std::vector<double> numbers() const
    {
        std::vector<double> out(array_size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = at(i).number();
        return out;
    }

  private:
    const json& value_;
    std::string pointer_;
};

template <typename F>
auto located(const Node& node, F&& build)
{
    try {
        return build();
    } catch (const ValidationError& e) {
        throw ValidationError(node.pointer() + ": " + e.what());
    } catch (const GeometryError& e) {
        throw GeometryError(node.pointer() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        node.fail(e.what());
    }
}

OpticalGeometry parse_geometry(const Node& node)
{
    node.allow_keys({"wavelength", "tube_positions", "probe", "detection"});
    const double wavelength = node.has("wavelength") ? node.at("wavelength").number() : 1.0;
    const std::vector<double> positions = node.at("tube_positions").numbers();
    const std::string probe = node.at("probe").string();
    const std::string detection = node.has("detection") ? node.at("detection").string() : "traveling";
    return located(node, [&] {
        return OpticalGeometry(wavelength, positions, mode_kind_from_string(probe), mode_kind_from_string(detection));
    });
}

std::vector<Species> parse_species_list(const Node& list)
{
    std::vector<Species> species;
    for (std::size_t s = 0; s < list.array_size(); ++s) {
        const Node item = list.at(s);
        item.allow_keys({"name", "composition", "mean_count"});
        Species sp;
        sp.name = item.has("name") ? item.at("name").string() : "species " + std::to_string(s);
        const Node comp = item.at("composition");
        sp.composition.resize(static_cast<Eigen::Index>(comp.array_size()));
        for (std::size_t i = 0; i < comp.array_size(); ++i) {
            const std::int64_t c = comp.at(i).integer();
            if (c < 0 || c > std::numeric_limits<int>::max())
                comp.at(i).fail("member count must be a non-negative integer");
            sp.composition(static_cast<Eigen::Index>(i)) = static_cast<int>(c);
        }
        sp.mean_count = item.at("mean_count").number();
        species.push_back(std::move(sp));
    }
    return species;
}

Ensemble parse_ensemble_body(const Node& node, Eigen::Index tube_count)
{
    std::vector<Species> species = node.has("species") ? parse_species_list(node.at("species")) : std::vector<Species>{};
    return located(node, [&] { return Ensemble(tube_count, std::move(species)); });
}

Eigen::Index parse_tube_count(const Node& node)
{
    const std::int64_t t = node.at("tube_count").integer();
    if (t < 1 || t > 1024)
        node.at("tube_count").fail("tube_count must be between 1 and 1024");
    return static_cast<Eigen::Index>(t);
}

Ensemble parse_ensemble(const Node& node)
{
    node.allow_keys({"tube_count", "species"});
    return parse_ensemble_body(node, parse_tube_count(node));
}

Cascade parse_cascade(const Node& node)
{
    node.expect_object();
    if (node.has("kind")) {
        node.allow_keys({"kind", "N"});
        const std::string kind = node.at("kind").string();
        const double n = node.at("N").number();
        return located(node, [&] { return build_cascade(cascade_kind_from_string(kind), n); });
    }
    node.allow_keys({"name", "tube_count", "N", "stages"});
    Cascade c;
    c.name = node.has("name") ? node.at("name").string() : "custom";
    c.tube_count = parse_tube_count(node);
    c.molecule_scale = node.has("N") ? node.at("N").number() : 1.0;
    const Node stages = node.at("stages");
    for (std::size_t k = 0; k < stages.array_size(); ++k) {
        const Node stage = stages.at(k);
        stage.allow_keys({"label", "species"});
        std::string label = stage.has("label") ? stage.at("label").string() : "stage " + std::to_string(k);
        c.stages.push_back({std::move(label), parse_ensemble_body(stage, c.tube_count)});
    }
    if (c.stages.empty())
        stages.fail("cascade needs at least one stage");
    return c;
}

std::vector<double> parse_angles(const Node& node)
{
    node.allow_keys({"angles"});
    const Node angles = node.at("angles");
    if (angles.raw().is_array())
        return angles.numbers();
    angles.allow_keys({"start", "stop", "count"});
    const double start = angles.at("start").number();
    const double stop = angles.at("stop").number();
    const std::int64_t count = angles.at("count").integer();
    if (count < 1 || count > 1000000)
        angles.at("count").fail("count must be between 1 and 1000000");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

BeamProfile parse_profile(const Node& node)
{
    node.allow_keys({"shape", "width", "tube_length"});
    const std::string shape = node.at("shape").string();
    const double width = node.at("width").number();
    const double length = node.at("tube_length").number();
    return located(node, [&] { return BeamProfile(beam_shape_from_string(shape), width, length); });
}

MonteCarloSection parse_montecarlo(const Node& node)
{
    node.allow_keys({"samples", "seed", "threads", "profile"});
    MonteCarloSection mc;
    if (node.has("samples")) {
        mc.samples = node.at("samples").unsigned_integer();
        if (*mc.samples < 1)
            node.at("samples").fail("samples must be at least 1");
    }
    if (node.has("seed"))
        mc.seed = node.at("seed").unsigned_integer();
    if (node.has("threads"))
        mc.threads = static_cast<unsigned>(node.at("threads").unsigned_integer());
    if (node.has("profile"))
        mc.profile = parse_profile(node.at("profile"));
    return mc;
}

CouplingParams parse_coupling(const Node& node)
{
    node.allow_keys({"dipole_moment", "probe_field", "hbar", "coupling", "detuning", "cavity_decay"});
    CouplingParams p;
    auto read = [&](const char* key, double& field) {
        if (node.has(key))
            field = node.at(key).number();
    };
    read("dipole_moment", p.dipole_moment);
    read("probe_field", p.probe_field);
    read("hbar", p.hbar);
    read("coupling", p.coupling);
    read("detuning", p.detuning);
    read("cavity_decay", p.cavity_decay);
    return p;
}

nlohmann::ordered_json species_json(const Species& s)
{
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["composition"] = std::vector<int>(s.composition.data(), s.composition.data() + s.composition.size());
    j["mean_count"] = s.mean_count;
    return j;
}

} // namespace

RunDocument parse_run_document(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DocumentError(std::string("invalid JSON: ") + e.what());
    }
    const Node doc(root, "");
    doc.allow_keys({"version", "geometry", "ensemble", "intensity", "cascade", "scan", "pattern", "montecarlo",
                    "coupling", "output"});

    RunDocument out;
    const std::int64_t version = doc.at("version").integer();
    if (version != run_document_version)
        doc.at("version").fail("unsupported version " + std::to_string(version) + " (expected " +
                               std::to_string(run_document_version) + ")");
    out.version = static_cast<int>(version);

    if (doc.has("geometry"))
        out.geometry = parse_geometry(doc.at("geometry"));
    if (doc.has("ensemble"))
        out.ensemble = parse_ensemble(doc.at("ensemble"));
    if (doc.has("intensity")) {
        const Node node = doc.at("intensity");
        node.allow_keys({"weights"});
        const Node sets = node.at("weights");
        for (std::size_t i = 0; i < sets.array_size(); ++i) {
            std::string name = sets.at(i).string();
            if (name != "geometry" && name != "minimum")
                sets.at(i).fail("weight set must be 'geometry' or 'minimum'");
            out.weight_sets.push_back(std::move(name));
        }
    }
    if (doc.has("cascade"))
        out.cascade = parse_cascade(doc.at("cascade"));
    if (doc.has("scan")) {
        const Node node = doc.at("scan");
        node.allow_keys({"points_per_stage", "reverse"});
        if (node.has("points_per_stage")) {
            const std::int64_t p = node.at("points_per_stage").integer();
            if (p < 2 || p > 100000)
                node.at("points_per_stage").fail("points_per_stage must be between 2 and 100000");
            out.scan.points_per_stage = static_cast<int>(p);
        }
        if (node.has("reverse"))
            out.scan.reverse = node.at("reverse").boolean();
    }
    if (doc.has("pattern"))
        out.angles = parse_angles(doc.at("pattern"));
    if (doc.has("montecarlo"))
        out.montecarlo = parse_montecarlo(doc.at("montecarlo"));
    if (doc.has("coupling"))
        out.coupling = parse_coupling(doc.at("coupling"));
    if (doc.has("output")) {
        const Node node = doc.at("output");
        node.allow_keys({"path", "precision"});
        if (node.has("path"))
            out.output.path = node.at("path").string();
        if (node.has("precision")) {
            const std::int64_t p = node.at("precision").integer();
            if (p < 1 || p > 17)
                node.at("precision").fail("precision must be between 1 and 17");
            out.output.precision = static_cast<int>(p);
        }
    }
    return out;
}

RunDocument load_run_document(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DocumentError(path + ": cannot open run document");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_run_document(buffer.str());
    } catch (const DocumentError& e) {
        throw DocumentError(path + ": " + e.what());
    }
}

nlohmann::ordered_json cascade_document(const Cascade& cascade, int points_per_stage)
{
    nlohmann::ordered_json doc;
    doc["version"] = run_document_version;
    nlohmann::ordered_json c;
    c["name"] = cascade.name;
    c["tube_count"] = cascade.tube_count;
    c["N"] = cascade.molecule_scale;
    c["stages"] = nlohmann::ordered_json::array();
    for (const Stage& stage : cascade.stages) {
        nlohmann::ordered_json s;
        s["label"] = stage.label;
        s["species"] = nlohmann::ordered_json::array();
        for (const Species& sp : stage.ensemble.species())
            s["species"].push_back(species_json(sp));
        c["stages"].push_back(std::move(s));
    }
    doc["cascade"] = std::move(c);
    doc["scan"] = {{"points_per_stage", points_per_stage}, {"reverse", false}};
    return doc;
}

} // namespace qnd::cli
