#include "qnd/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "qnd/montecarlo.hpp"
#include "qnd/optics.hpp"
#include "qnd/scenarios.hpp"
#include "qnd/statistics.hpp"

namespace qnd::cli {

namespace {

std::string format_number(double v, int precision)
{
    if (v == 0.0)
        return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string format_fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-')
        s.erase(0, 1);
    return s;
}

std::string format_complex(Complex z, int precision)
{
    std::string re = format_number(z.real(), precision);
    std::string im = format_number(std::abs(z.imag()), precision);
    return re + (std::signbit(z.imag()) && z.imag() != 0.0 ? "-" : "+") + im + "i";
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

void write_row(std::ostream& csv, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            csv << ',';
        csv << csv_field(fields[i]);
    }
    csv << "\r\n";
}

// Photon rates and amplitudes either in units of |C|^2 and C, or multiplied
// through by the coupling prefactor.
struct Units {
    Complex prefactor{1.0, 0.0};
    std::string rate_unit = "[|C|^2]";
    std::string amplitude_unit = "[C]";
    int precision = default_precision;

    explicit Units(const RunDocument& doc)
    {
        if (doc.coupling) {
            prefactor = cavity_prefactor(*doc.coupling);
            rate_unit = "[photons]";
            amplitude_unit = "[abs]";
        }
        if (doc.output.precision)
            precision = *doc.output.precision;
    }

    std::string rate(double r) const { return format_number(r * std::norm(prefactor), precision); }
    Complex amplitude(Complex a) const { return a * prefactor; }
    std::string number(double v) const { return format_number(v, precision); }
};

std::string format_weights(const Eigen::VectorXcd& g, int precision)
{
    std::string out;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (i)
            out += ';';
        out += format_complex(g(i), precision);
    }
    return out;
}

template <typename T>
const T& require(const std::optional<T>& section, const char* name)
{
    if (!section)
        throw DocumentError(std::string("/: missing required section '") + name + "'");
    return *section;
}

double minimum_alpha(const Ensemble& ensemble)
{
    try {
        return population_ratio(ensemble);
    } catch (const ValidationError& e) {
        throw GeometryError(std::string("diffraction minimum undefined: ") + e.what());
    }
}

void report_minimum_geometry(const RunDocument& doc, double alpha, std::ostream& log)
{
    log << "alpha = <N_A>/<N_B> = " << format_number(alpha, 12) << "\n";
    if (!doc.geometry)
        return;
    const std::vector<double> x = minimum_spacings(alpha, doc.geometry->probe_kind());
    log << "minimum spacings Delta/lambda (tube A on antinode):";
    for (double v : x)
        log << ' ' << format_fixed(v, 6);
    log << "\n";
}

McConfig mc_config(const MonteCarloSection& section)
{
    McConfig config;
    config.samples = section.samples.value_or(100000);
    config.seed = section.seed.value_or(0);
    config.threads = section.threads;
    if (section.profile) {
        config.position_resolved = true;
        config.profile = section.profile;
    }
    return config;
}

void check_tube_count(const OpticalGeometry& geometry, const Ensemble& ensemble)
{
    if (geometry.tube_count() != ensemble.tube_count())
        throw ValidationError("geometry has " + std::to_string(geometry.tube_count()) + " tubes but ensemble has " +
                              std::to_string(ensemble.tube_count()));
}

} // namespace

double parse_ratio(const std::string& text)
{
    auto parse_double = [&](std::string_view s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
            throw DocumentError("cannot parse ratio '" + text + "'");
        return v;
    };
    const std::string_view sv = text;
    const auto slash = sv.find('/');
    if (slash == std::string_view::npos)
        return parse_double(sv);
    const double den = parse_double(sv.substr(slash + 1));
    if (den == 0.0)
        throw DocumentError("ratio '" + text + "' has a zero denominator");
    return parse_double(sv.substr(0, slash)) / den;
}

CouplingParams parse_coupling_flag(const std::string& text)
{
    CouplingParams p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw DocumentError("--coupling: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double value = parse_ratio(item.substr(eq + 1));
        if (key == "d0")
            p.dipole_moment = value;
        else if (key == "Ep")
            p.probe_field = value;
        else if (key == "hbar")
            p.hbar = value;
        else if (key == "gs")
            p.coupling = value;
        else if (key == "detuning")
            p.detuning = value;
        else if (key == "kappa")
            p.cavity_decay = value;
        else
            throw DocumentError("--coupling: unknown key '" + key + "'");
    }
    return p;
}

RunDocument apply_overrides(RunDocument doc, const Overrides& o)
{
    if (o.samples || o.seed) {
        if (!doc.montecarlo)
            doc.montecarlo.emplace();
        if (o.samples)
            doc.montecarlo->samples = o.samples;
        if (o.seed)
            doc.montecarlo->seed = o.seed;
    }
    if (doc.montecarlo && !doc.montecarlo->seed) {
        if (const char* env = std::getenv(seed_environment_variable)) {
            std::uint64_t seed = 0;
            const std::string_view s = env;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
            if (ec != std::errc() || ptr != s.data() + s.size())
                throw DocumentError(std::string(seed_environment_variable) + ": not an unsigned integer");
            doc.montecarlo->seed = seed;
        }
    }
    if (o.points_per_stage)
        doc.scan.points_per_stage = o.points_per_stage;
    if (o.output)
        doc.output.path = *o.output;
    if (o.precision)
        doc.output.precision = o.precision;
    if (o.coupling)
        doc.coupling = o.coupling;
    return doc;
}

void cmd_intensity(const RunDocument& doc, std::ostream& csv, std::ostream& log)
{
    const Ensemble& ensemble = require(doc.ensemble, "ensemble");
    const Units units(doc);
    const std::vector<std::string> sets = doc.weight_sets.empty() ? std::vector<std::string>{"geometry"} : doc.weight_sets;

    write_row(csv, {"weight_set", "weights", "amplitude_re" + units.amplitude_unit,
                    "amplitude_im" + units.amplitude_unit, "coherent_part" + units.rate_unit,
                    "fluctuation_part" + units.rate_unit, "photon_rate" + units.rate_unit});
    for (const std::string& set : sets) {
        Eigen::VectorXcd g;
        if (set == "geometry") {
            const OpticalGeometry& geometry = require(doc.geometry, "geometry");
            check_tube_count(geometry, ensemble);
            g = phase_factors(geometry, 0.0);
        } else {
            const double alpha = minimum_alpha(ensemble);
            report_minimum_geometry(doc, alpha, log);
            g = minimum_weights(ensemble);
        }
        const IntensityReport r = intensity(ensemble, g);
        const Complex a = units.amplitude(r.amplitude_mean);
        write_row(csv, {set, format_weights(g, units.precision), units.number(a.real()), units.number(a.imag()),
                        units.rate(r.coherent_part), units.rate(r.fluctuation_part), units.rate(r.photon_rate)});
        log << set << ": photon rate " << units.rate(r.photon_rate) << ' ' << units.rate_unit << "\n";
    }
}

void cmd_scan(const RunDocument& doc, std::ostream& csv, std::ostream& log)
{
    Cascade cascade = require(doc.cascade, "cascade");
    validate_cascade(cascade);
    if (doc.scan.reverse)
        cascade = reversed(cascade);
    const Units units(doc);
    const int points_per_stage = doc.scan.points_per_stage.value_or(default_points_per_stage);

    const double alpha = minimum_alpha(cascade.stages.front().ensemble);
    report_minimum_geometry(doc, alpha, log);
    const std::vector<ScanPoint> points = scan(cascade, points_per_stage);

    std::vector<McEstimate> mc;
    if (doc.montecarlo) {
        std::vector<Ensemble> ensembles;
        ensembles.reserve(points.size());
        for (const ScanPoint& p : points)
            ensembles.push_back(p.ensemble);
        mc = estimate_scan(ensembles, cascade.weights(), mc_config(*doc.montecarlo));
    }

    std::vector<std::string> header{"parameter", "stage_label", "bound_fraction", "photon_rate" + units.rate_unit};
    if (!mc.empty()) {
        header.push_back("mc_mean" + units.rate_unit);
        header.push_back("mc_stderr" + units.rate_unit);
    }
    write_row(csv, header);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const ScanPoint& p = points[i];
        std::vector<std::string> row{units.number(p.parameter), p.stage_label, units.number(p.bound_fraction),
                                     units.rate(p.report.photon_rate)};
        if (!mc.empty()) {
            row.push_back(units.rate(mc[i].photon_rate_mean));
            row.push_back(units.rate(mc[i].photon_rate_stderr));
        }
        write_row(csv, row);
    }

    log << "cascade " << cascade.name << ", N = " << format_number(cascade.molecule_scale, 12) << ", "
        << cascade.stages.size() << " stages; horizontal axis is schematic (linear bound-fraction mixing)\n";
    for (const ScanPoint& p : points)
        if (p.bound_fraction == 1.0)
            log << "  plateau " << p.stage_index << " (" << p.stage_label << "): " << units.rate(p.report.photon_rate)
                << ' ' << units.rate_unit << "\n";
}

void cmd_pattern(const RunDocument& doc, std::ostream& csv, std::ostream& log)
{
    const OpticalGeometry& geometry = require(doc.geometry, "geometry");
    const Ensemble& ensemble = require(doc.ensemble, "ensemble");
    if (doc.angles.empty())
        throw DocumentError("/: missing required section 'pattern' (angle grid)");
    check_tube_count(geometry, ensemble);
    for (double theta : doc.angles)
        if (!(std::abs(theta) < std::numbers::pi / 2))
            throw GeometryError("detection angle " + format_number(theta, 12) + " rad outside (-pi/2, pi/2)");

    const Units units(doc);
    write_row(csv, {"angle[rad]", "photon_rate" + units.rate_unit, "coherent_part" + units.rate_unit,
                    "fluctuation_part" + units.rate_unit});
    double best_angle = doc.angles.front();
    double best_coherent = INFINITY;
    for (double theta : doc.angles) {
        const IntensityReport r = intensity(ensemble, phase_factors(geometry, theta));
        write_row(csv, {units.number(theta), units.rate(r.photon_rate), units.rate(r.coherent_part),
                        units.rate(r.fluctuation_part)});
        if (r.coherent_part < best_coherent) {
            best_coherent = r.coherent_part;
            best_angle = theta;
        }
    }
    log << "smallest coherent part " << units.rate(best_coherent) << ' ' << units.rate_unit << " at angle "
        << format_number(best_angle, 12) << " rad\n";
}

void cmd_minimum(double alpha, ModeKind probe, std::ostream& csv, std::ostream& log)
{
    const std::vector<double> x = minimum_spacings(alpha, probe);
    write_row(csv, {"spacing_over_wavelength", "identity"});
    for (double v : x)
        write_row(csv, {format_fixed(v, 6), "cos(2*pi*" + format_fixed(v, 6) + ") = " +
                                                format_fixed(std::cos(2.0 * std::numbers::pi * v), 6)});
    log << "alpha = " << format_number(alpha, 12) << ", " << to_string(probe)
        << " probe, tube A on an antinode; add integer periods for larger spacings\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"qnd: light scattering from polar-molecule complexes in 1D tubes at the diffraction minimum", "qnd"};
    app.require_subcommand(1);
    app.footer("Photon rates are in units of |C|^2 unless --coupling is given. Tube A is placed on a probe\n"
               "antinode. Beam profiles have peak 1: tophat R = 1 on |x - L/2| <= W/2; gaussian\n"
               "R = exp(-(2(x - L/2)/W)^2), so int R = (W sqrt(pi)/2) erf(L/W) on a tube of length L.\n"
               "Exit codes: 0 ok, 2 parse, 3 geometry, 4 validation.");

    Overrides overrides;
    std::string doc_path;
    std::string coupling_text;
    std::uint64_t samples = 0, seed = 0;
    int points = 0, precision = 0;
    std::string output;

    auto add_common = [&](CLI::App* sub, bool with_mc) {
        sub->add_option("document", doc_path, "Run document (JSON, see docs/run_document.md)")->required();
        sub->add_option("--output,-o", output, "Write CSV here instead of standard output");
        sub->add_option("--precision", precision, "Significant digits in CSV output (default 12)")
            ->check(CLI::Range(1, 17));
        sub->add_option("--coupling", coupling_text,
                        "Report absolute rates: d0=..,Ep=..,hbar=..,gs=..,detuning=..,kappa=..");
        if (with_mc) {
            sub->add_option("--samples", samples, "Monte Carlo samples (enables MC columns)")
                ->check(CLI::PositiveNumber);
            sub->add_option("--seed", seed, std::string("Monte Carlo seed (default from ") +
                                                seed_environment_variable + ", else 0)");
        }
    };

    CLI::App* intensity_cmd = app.add_subcommand("intensity", "Photon rate for an ensemble and weight sets");
    add_common(intensity_cmd, false);
    CLI::App* scan_cmd = app.add_subcommand("scan", "Plateau scan along a dissociation cascade");
    add_common(scan_cmd, true);
    scan_cmd->add_option("--points-per-stage", points, "Points per dissociation step, endpoints included (>= 2)")
        ->check(CLI::Range(2, 100000));
    CLI::App* pattern_cmd = app.add_subcommand("pattern", "Photon rate versus in-plane detection angle");
    add_common(pattern_cmd, false);

    std::string alpha_text;
    std::string probe_text = "standing";
    CLI::App* minimum_cmd = app.add_subcommand(
        "minimum", "Tube spacings Delta/lambda giving a diffraction minimum (tube A on a probe antinode)");
    minimum_cmd->add_option("--alpha", alpha_text, "Population ratio <N_A>/<N_B>, e.g. 1/3")->required();
    minimum_cmd->add_option("--probe", probe_text, "Probe mode: standing or traveling");
    minimum_cmd->add_option("--output,-o", output, "Write CSV here instead of standard output");

    std::string kind_text;
    double export_n = 1.0;
    CLI::App* export_cmd = app.add_subcommand("export-cascade", "Write a built-in cascade as an editable run document");
    export_cmd->add_option("--kind", kind_text, "dimer11, trimer12, tetramer13 or tetramer22")->required();
    export_cmd->add_option("--N", export_n, "Mean number of bound complexes")->check(CLI::PositiveNumber);
    export_cmd->add_option("--points-per-stage", points, "Default points per stage")->check(CLI::Range(2, 100000));
    export_cmd->add_option("--output,-o", output, "Write here instead of standard output");

    std::vector<std::string> reversed_args(args.rbegin(), args.rend());
    try {
        app.parse(reversed_args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_parse;
    }

    std::ostringstream csv;
    std::string target = "-";
    try {
        if (*minimum_cmd) {
            cmd_minimum(parse_ratio(alpha_text), mode_kind_from_string(probe_text), csv, err);
            if (!output.empty())
                target = output;
        } else if (*export_cmd) {
            const Cascade c = build_cascade(cascade_kind_from_string(kind_text), export_n);
            csv << cascade_document(c, points ? points : default_points_per_stage).dump(2) << "\n";
            if (!output.empty())
                target = output;
        } else {
            if (!output.empty())
                overrides.output = output;
            if (precision)
                overrides.precision = precision;
            if (points)
                overrides.points_per_stage = points;
            if (scan_cmd->count("--samples"))
                overrides.samples = samples;
            if (scan_cmd->count("--seed"))
                overrides.seed = seed;
            if (!coupling_text.empty())
                overrides.coupling = parse_coupling_flag(coupling_text);
            const RunDocument doc = apply_overrides(load_run_document(doc_path), overrides);
            target = doc.output.path;
            if (*intensity_cmd)
                cmd_intensity(doc, csv, err);
            else if (*scan_cmd)
                cmd_scan(doc, csv, err);
            else
                cmd_pattern(doc, csv, err);
        }
    } catch (const DocumentError& e) {
        err << "error: " << e.what() << "\n";
        return exit_parse;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_parse;
    } catch (const GeometryError& e) {
        err << "geometry error: " << e.what() << "\n";
        return exit_geometry;
    } catch (const std::domain_error& e) {
        err << "geometry error: " << e.what() << "\n";
        return exit_geometry;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        err << "validation error: " << e.what() << "\n";
        return exit_validation;
    }

    if (target == "-") {
        out << csv.str();
    } else {
        std::ofstream file(target, std::ios::binary);
        file << csv.str();
        if (!file) {
            err << "error: cannot write " << target << "\n";
            return exit_parse;
        }
    }
    return exit_ok;
}

} // namespace qnd::cli
