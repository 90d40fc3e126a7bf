// Command-line front end: verify factor-system spec files, construct and
// persist the associated dynamical systems, and generate gallery examples.
//
// Exit codes: 0 all checks pass, 1 a mathematical check fails, 2 bad
// input or usage.

#include "cleft/gallery.hpp"
#include "cleft/io.hpp"
#include "cleft/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace cleft;

namespace {

struct CommonFlags {
    bool json = false;
    std::optional<double> tolerance;
    std::optional<double> char_tolerance;

    Tolerances apply(Tolerances base) const
    {
        if (tolerance)
            base.algebraic = *tolerance;
        if (char_tolerance)
            base.character = *char_tolerance;
        return base;
    }
};

void add_common(CLI::App* cmd, CommonFlags& flags)
{
    cmd->add_flag("--json", flags.json, "emit the report as JSON on stdout");
    cmd->add_option("--tolerance", flags.tolerance, "override the algebraic residual threshold");
    cmd->add_option("--char-tolerance", flags.char_tolerance, "override the character-sum threshold");
}

void emit(const Report& rep, bool json) { std::cout << (json ? rep.to_json() : rep.to_text()); }

/// Predicates are informational: they never gate the exit code.
void add_predicates(Report& rep, const FactorSystem& system, const Tolerances& tol)
{
    FreenessWitness w = is_free(system, tol);
    rep.add("freeness: all omega unitary", "structure", w.worst_residual, tol.algebraic);
    if (system.algebra.commutative())
        rep.skipped.push_back(std::string("predicate commutativity_criterion = ") +
                              (commutativity_criterion(system, tol) ? "true" : "false"));
    rep.skipped.push_back(std::string("predicate ergodic_tensor_form = ") +
                          (ergodic_tensor_form(system, tol) ? "true" : "false"));
}

int run_verify(const std::string& path, const CommonFlags& flags)
{
    std::string text;
    specio::SystemSpecFile spec;
    try {
        text = specio::read_file(path);
        spec = specio::parse_system_spec(text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    Tolerances tol = flags.apply(spec.effective_tolerance());
    Report rep;
    rep.input_digest = digest(text);
    rep.append(verify_factor_system(spec.system, tol), "axiom");
    add_predicates(rep, spec.system, tol);
    emit(rep, flags.json);
    return rep.pass() ? 0 : 1;
}

int run_construct(const std::string& path, const std::string& outdir, bool skip_roundtrip,
                  const CommonFlags& flags)
{
    std::string text;
    specio::SystemSpecFile spec;
    try {
        text = specio::read_file(path);
        spec = specio::parse_system_spec(text);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    Tolerances tol = flags.apply(spec.effective_tolerance());
    Report rep;
    rep.input_digest = digest(text);
    rep.append(verify_factor_system(spec.system, tol), "axiom");
    if (!rep.pass()) {
        emit(rep, flags.json);
        std::cerr << "error: the factor system fails verification at '" << rep.first_failure()->name
                  << "'; nothing persisted\n";
        return 1;
    }

    ConstructedSystem sys = build_system(spec.system, tol, true);
    rep.append(verify_construction(sys, tol), "construction");
    if (!skip_roundtrip) {
        RecoveryCertificate cert;
        FactorSystem rec = recover_factor_system(sys, &cert, tol);
        rep.add("round trip: recovered factor system", "structure", factor_system_distance(spec.system, rec),
                tol.algebraic);
        rep.add("round trip: non-degeneracy certificate", "structure",
                std::max(std::max(cert.isometry_residual, cert.membership_residual),
                         std::max(cert.nondegeneracy_residual, cert.concentration_residual)),
                tol.algebraic);
    }

    try {
        fs::create_directories(outdir);
        specio::write_file(outdir + "/system.spec", specio::write_system_spec(spec.system, spec.tolerance));
        specio::write_file(outdir + "/constants.dump", specio::write_constants(sys));
        specio::write_file(outdir + "/report.txt", rep.to_text());
        specio::write_file(outdir + "/report.json", rep.to_json());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    emit(rep, flags.json);
    return rep.pass() ? 0 : 1;
}

/// Parses a spin given as "2", "3/2" or "1.5" into twice its value.
int parse_twice_spin(const std::string& s)
{
    if (std::size_t slash = s.find('/'); slash != std::string::npos) {
        int num = std::stoi(s.substr(0, slash));
        int den = std::stoi(s.substr(slash + 1));
        if (den != 2 || num < 0)
            throw spec_error("spins must be of the form k or k/2");
        return num;
    }
    double v = std::stod(s);
    int twice = static_cast<int>(std::lround(2 * v));
    if (twice < 0 || std::abs(2 * v - twice) > 1e-9)
        throw spec_error("spins must be half-integers");
    return twice;
}

struct GalleryArgs {
    std::string group = "S3";
    std::string blocks = "1";
    int n = 2;
    int m = 3;
    int twist = 1;
    int x_size = 2;
    std::string jmax = "2";
    std::string h;
};

int run_gallery(const std::string& name, const GalleryArgs& args, const std::string& outdir,
                const CommonFlags& flags)
{
    Tolerances tol = flags.apply(Tolerances{});
    GalleryEntry entry;
    try {
        if (name == "trivial") {
            BAlgebra algebra;
            std::stringstream ss(args.blocks);
            std::string part;
            while (std::getline(ss, part, ','))
                algebra.blocks.push_back(std::stoi(part));
            entry = trivial_system(args.group, algebra, tol);
        } else if (name == "circle-cover") {
            entry = discrete_circle_cover(args.n, args.m, tol);
        } else if (name == "bicharacter") {
            entry = bicharacter_system(args.n, args.twist, tol);
        } else if (name == "su2-parity") {
            std::vector<int> h;
            if (args.h.empty()) {
                for (int x = 0; x < args.x_size; ++x)
                    h.push_back(args.x_size - 1 - x);
            } else {
                std::stringstream ss(args.h);
                std::string part;
                while (std::getline(ss, part, ','))
                    h.push_back(std::stoi(part));
            }
            entry = su2_parity_entry(args.x_size, h, parse_twice_spin(args.jmax), tol);
        } else {
            std::cerr << "error: unknown gallery entry '" << name << "'; known entries:";
            for (const std::string& n2 : gallery_names())
                std::cerr << " " << n2;
            std::cerr << "\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    Report rep;
    rep.append(entry.claims);
    rep.skipped = entry.skipped;
    std::string exported;
    if (entry.system) {
        exported = specio::write_system_spec(*entry.system);
        rep.input_digest = digest(exported);
    }

    if (!outdir.empty()) {
        try {
            fs::create_directories(outdir);
            if (entry.system)
                specio::write_file(outdir + "/" + entry.name + ".spec", exported);
            specio::write_file(outdir + "/report.txt", rep.to_text());
            specio::write_file(outdir + "/report.json", rep.to_json());
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    emit(rep, flags.json);
    return rep.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"factor systems of finite group actions on finite-dimensional C*-algebras: "
                 "verification, reconstruction, examples"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);

    CommonFlags vflags, cflags, gflags;
    std::string vpath, cpath, coutdir, gname, goutdir;
    bool skip_roundtrip = false;
    GalleryArgs gargs;

    CLI::App* verify = app.add_subcommand("verify", "check the factor-system axioms of a spec file");
    verify->add_option("spec", vpath, "system spec file")->required();
    add_common(verify, vflags);

    CLI::App* construct =
        app.add_subcommand("construct", "rebuild the dynamical system and persist structure constants");
    construct->add_option("spec", cpath, "system spec file")->required();
    construct->add_option("-o,--out", coutdir, "output directory")->required();
    construct->add_flag("--skip-roundtrip", skip_roundtrip, "skip the factor-system recovery round trip");
    add_common(construct, cflags);

    CLI::App* gallery = app.add_subcommand("gallery", "generate a worked example and run its checks");
    gallery->add_option("name", gname, "trivial | circle-cover | bicharacter | su2-parity")->required();
    gallery->add_option("-o,--out", goutdir, "output directory for the exported spec and report");
    gallery->add_option("--group", gargs.group, "catalog group for the trivial entry");
    gallery->add_option("--blocks", gargs.blocks, "comma-separated block sizes of B");
    gallery->add_option("--n", gargs.n, "cover degree / bicharacter order");
    gallery->add_option("--m", gargs.m, "base size of the circle cover");
    gallery->add_option("--twist", gargs.twist, "bicharacter twist exponent");
    gallery->add_option("--x-size", gargs.x_size, "number of points of the su2-parity base space");
    gallery->add_option("--jmax", gargs.jmax, "spin cutoff (integer or half-integer)");
    gallery->add_option("--involution", gargs.h, "involution as a comma-separated permutation (default: reversal)");
    add_common(gallery, gflags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed())
            return run_verify(vpath, vflags);
        if (construct->parsed())
            return run_construct(cpath, coutdir, skip_roundtrip, cflags);
        if (gallery->parsed())
            return run_gallery(gname, gargs, goutdir, gflags);
    } catch (const verification_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
