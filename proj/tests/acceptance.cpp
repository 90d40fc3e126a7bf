// Acceptance suite: one pass/fail line per criterion. Criteria cover the
// representation engine, factor-system axioms with fault injection, the
// construction identity suite, recovery round trips, freeness agreement,
// commutativity/center structure, classical model oracles, the SU(2)
// parity example at finite cutoff, and the CLI contract.
//
// Usage: acceptance <path-to-cleft-cli> <scratch-dir>

#include "cleft/gallery.hpp"
#include "cleft/io.hpp"
#include "cleft/report.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#ifdef _WIN32
#error "the acceptance runner drives the CLI through POSIX exit codes"
#endif
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace cleft;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;
std::string g_scratch;
int g_failures = 0;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const std::string& name, bool pass, const std::string& detail, double elapsed)
{
    std::printf("%s  %-28s %s  (%.2f s)\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(), elapsed);
    if (!pass)
        ++g_failures;
}

int run_cli(const std::string& args)
{
    std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status))
        return -1;
    return WEXITSTATUS(status);
}

struct NamedSystem {
    std::string name;
    FactorSystem fs;
};

std::vector<NamedSystem> finite_gallery()
{
    std::vector<NamedSystem> out;
    out.push_back({"trivial(S3,C)", *trivial_system("S3", scalars()).system});
    out.push_back({"trivial(cyclic(2),M2)", *trivial_system("cyclic(2)", BAlgebra{{2}}).system});
    out.push_back({"circle-cover(2,3)", *discrete_circle_cover(2, 3).system});
    out.push_back({"bicharacter(2)", *bicharacter_system(2).system});
    out.push_back({"bicharacter(3)", *bicharacter_system(3).system});
    return out;
}

// 1. representation engine over the required catalogs
void criterion_1()
{
    auto start = Clock::now();
    double schur = 0.0;
    double inter = 0.0;
    bool burnside_ok = true;
    std::vector<std::string> names = {"S3", "Q8", "dihedral(4)"};
    for (int n = 1; n <= 8; ++n)
        names.push_back("cyclic(" + std::to_string(n) + ")");
    for (const std::string& name : names) {
        GroupData gd = build_group(name);
        long count = 0;
        for (std::size_t a = 0; a < gd.irreps.size(); ++a) {
            count += static_cast<long>(gd.irreps[a].dim) * gd.irreps[a].dim;
            for (std::size_t b = 0; b < gd.irreps.size(); ++b) {
                complexd s = 0.0;
                for (int g = 0; g < gd.group.order; ++g)
                    s += gd.irreps[a].character(g) * std::conj(gd.irreps[b].character(g));
                s /= static_cast<double>(gd.group.order);
                schur = std::max(schur, std::abs(s - (a == b ? 1.0 : 0.0)));
            }
        }
        burnside_ok = burnside_ok && count == gd.group.order;

        for (std::size_t p = 0; p < gd.irreps.size(); ++p)
            for (std::size_t r = 0; r < gd.irreps.size(); ++r) {
                Rep prod = tensor_rep(rep_of(gd.irreps[p]), rep_of(gd.irreps[r]));
                Decomposition dec = decompose(gd, prod);
                for (const IntertwinerBasis& basis : dec.parts)
                    for (int j = 0; j < basis.count(); ++j) {
                        for (int g = 0; g < gd.group.order; ++g)
                            inter = std::max(inter,
                                             frob_diff(prod.matrices[g] * basis.isometries[j],
                                                       basis.isometries[j] * gd.irreps[basis.sigma].matrices[g]));
                        for (int l = 0; l < basis.count(); ++l) {
                            cmat gram = basis.isometries[j].adjoint() * basis.isometries[l];
                            cmat expect = j == l ? cmat(cmat::Identity(gram.rows(), gram.cols()))
                                                 : cmat(cmat::Zero(gram.rows(), gram.cols()));
                            inter = std::max(inter, frob_diff(gram, expect));
                        }
                    }
            }
    }
    double elapsed = seconds_since(start);
    bool pass = schur < 1e-12 && burnside_ok && inter < 1e-9 && elapsed < 5.0;
    char detail[160];
    std::snprintf(detail, sizeof(detail), "schur=%.2e burnside=%s intertwiners=%.2e", schur,
                  burnside_ok ? "exact" : "VIOLATED", inter);
    report("criterion-1 rep-engine", pass, detail, elapsed);
}

// 2. factor-system axioms on the gallery + fault injection
void criterion_2()
{
    auto start = Clock::now();
    double worst = 0.0;
    bool pass = true;

    for (const NamedSystem& g : finite_gallery()) {
        VerificationReport rep = verify_factor_system(g.fs);
        for (const auto& c : rep.checks)
            worst = std::max(worst, c.residual);
        pass = pass && rep.pass;
    }
    {
        GalleryEntry su2 = su2_parity_entry(2, {1, 0}, 4);
        for (const Claim& c : su2.claims) {
            if (c.name.rfind("coaction", 0) == 0 || c.name.find("module relation") != std::string::npos) {
                worst = std::max(worst, c.residual);
                pass = pass && c.pass;
            }
        }
    }

    double weakest_fault = 1e300;
    for (const NamedSystem& g : finite_gallery()) {
        // omega fault: first pair with a nontrivial left label
        FactorSystem fom = g.fs;
        int inj = fom.group.trivial_index == 0 ? 1 : 0;
        fom.omega_at(inj, inj).blocks[0](0, 0) += 1e-3;
        VerificationReport rom = verify_factor_system(fom);
        if (rom.pass)
            pass = false;
        weakest_fault = std::min(weakest_fault, rom.max_failing_residual);

        // gamma fault on the same irrep
        FactorSystem fg = g.fs;
        fg.gamma[inj].mat(0, 0) += 1e-3;
        VerificationReport rg = verify_factor_system(fg);
        if (rg.pass)
            pass = false;
        weakest_fault = std::min(weakest_fault, rg.max_failing_residual);
    }
    pass = pass && weakest_fault >= 1e-4;

    double elapsed = seconds_since(start);
    pass = pass && elapsed < 30.0;
    char detail[160];
    std::snprintf(detail, sizeof(detail), "worst residual=%.2e, weakest injected fault=%.2e", worst,
                  weakest_fault);
    report("criterion-2 axioms", pass, detail, elapsed);
}

// 3. construction identity suite
void criterion_3()
{
    auto start = Clock::now();
    double worst = 0.0;
    bool pass = true;
    for (const NamedSystem& g : finite_gallery()) {
        ConstructedSystem sys = build_system(g.fs, Tolerances{}, true);
        VerificationReport rep = verify_construction(sys, Tolerances{}, 100);
        for (const auto& c : rep.checks)
            worst = std::max(worst, c.residual);
        pass = pass && rep.pass;
    }
    char detail[80];
    std::snprintf(detail, sizeof(detail), "worst residual=%.2e", worst);
    report("criterion-3 construction", pass, detail, seconds_since(start));
}

// 4. factor-system recovery round trips, including conjugates
void criterion_4()
{
    auto start = Clock::now();
    double worst_rt = 0.0, worst_conj = 0.0;
    bool pass = true;
    for (const NamedSystem& g : finite_gallery()) {
        ConstructedSystem sys = build_system(g.fs, Tolerances{}, true);
        worst_rt = std::max(worst_rt, factor_system_distance(g.fs, recover_factor_system(sys)));
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ConjugationFamily v = random_conjugation(g.fs, 1000 + seed);
            FactorSystem conj = conjugate_factor_system(g.fs, v);
            ConjugacyReport crep = check_conjugacy(g.fs, conj, v);
            worst_conj = std::max(worst_conj, std::max(crep.gamma_residual, crep.omega_residual));
            pass = pass && crep.pass;
            ConstructedSystem csys = build_system(conj); // verifies the conjugate too
            worst_rt = std::max(worst_rt, factor_system_distance(conj, recover_factor_system(csys)));
        }
    }
    pass = pass && worst_rt < 1e-9 && worst_conj < 1e-9;
    char detail[120];
    std::snprintf(detail, sizeof(detail), "round trip=%.2e conjugacy=%.2e", worst_rt, worst_conj);
    report("criterion-4 round-trip", pass, detail, seconds_since(start));
}

// 5. freeness equivalence
void criterion_5()
{
    auto start = Clock::now();
    bool pass = true;
    int systems = 0;
    for (const NamedSystem& g : finite_gallery()) {
        std::vector<FactorSystem> variants = {g.fs};
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
            variants.push_back(conjugate_factor_system(g.fs, random_conjugation(g.fs, 1000 + seed)));
        for (const FactorSystem& fs2 : variants) {
            ++systems;
            FreenessWitness w = is_free(fs2);
            ConstructedSystem sys = build_system(fs2, Tolerances{}, true);
            bool all_free = w.free;
            for (int p = 0; p < sys.irrep_count(); ++p)
                if (freeness_rank_test(sys, p) != w.free)
                    pass = false;
            pass = pass && all_free; // expected: everything free in finite dimensions
        }
    }
    char detail[80];
    std::snprintf(detail, sizeof(detail), "%d systems, predicates agree, all free", systems);
    report("criterion-5 freeness", pass, detail, seconds_since(start));
}

// 6. commutativity and center structure
void criterion_6()
{
    auto start = Clock::now();
    bool pass = true;
    double worst_comm = 0.0;
    {
        ConstructedSystem sys = build_system(*trivial_system("S3", scalars()).system, Tolerances{}, true);
        worst_comm = std::max(worst_comm, max_commutator(sys));
        pass = pass && commutativity_criterion(*trivial_system("S3", scalars()).system);
    }
    {
        ConstructedSystem sys = build_system(*discrete_circle_cover(2, 3).system, Tolerances{}, true);
        worst_comm = std::max(worst_comm, max_commutator(sys));
    }
    std::string centers;
    for (int n : {2, 3}) {
        ConstructedSystem sys = build_system(*bicharacter_system(n).system, Tolerances{}, true);
        int c = center_dimension(sys);
        centers += (centers.empty() ? "" : ",") + std::to_string(c);
        pass = pass && c == 1 && sys.total_dim == n * n;
    }
    pass = pass && worst_comm < 1e-9;
    char detail[120];
    std::snprintf(detail, sizeof(detail), "max commutator=%.2e, bicharacter centers={%s}", worst_comm,
                  centers.c_str());
    report("criterion-6 commutativity", pass, detail, seconds_since(start));
}

// 7. classical model oracles
void criterion_7()
{
    auto start = Clock::now();
    bool pass = true;
    double worst = 0.0;

    // circle cover: the gallery claims carry the model isomorphism and the
    // joint spectrum match
    GalleryEntry cover = discrete_circle_cover(2, 3);
    for (const Claim& c : cover.claims)
        if (c.kind == "model") {
            worst = std::max(worst, c.residual);
            pass = pass && c.pass;
        }

    // trivial system on (S3, C) against the function algebra C(S3) under
    // the Peter-Weyl transform T -> (g -> Tr(pi_g^* T))
    {
        GroupData s3 = build_group("S3");
        FactorSystem fsys = *trivial_system("S3", scalars()).system;
        ConstructedSystem sys = build_system(fsys, Tolerances{}, true);
        const int n = sys.total_dim;
        cmat transform = cmat::Zero(6, n);
        for (int a = 0; a < n; ++a) {
            GradedElement ea = sys.basis_element(a);
            for (int g = 0; g < 6; ++g) {
                complexd val = 0.0;
                for (int p = 0; p < sys.irrep_count(); ++p) {
                    const cmat leg = ea.comp[p].blocks[0]; // B = C
                    val += (s3.irreps[p].matrices[g].adjoint() * leg).trace();
                }
                transform(g, a) = val;
            }
        }
        // bijective change of basis
        pass = pass && numerical_rank(transform, 1e-9) == 6;
        // products map to pointwise products: the structure constants agree
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                GradedElement prod = sys.bullet(sys.basis_element(a), sys.basis_element(b));
                cvec lhs = transform * sys.to_vec(prod);
                cvec rhs = cvec(transform.col(a).cwiseProduct(transform.col(b)));
                worst = std::max(worst, (lhs - rhs).norm());
            }
        // involution maps to pointwise conjugation
        for (int a = 0; a < n; ++a) {
            cvec lhs = transform * sys.to_vec(sys.involve(sys.basis_element(a)));
            worst = std::max(worst, (lhs - cvec(transform.col(a).conjugate())).norm());
        }
        // action maps to right translation
        for (int g = 0; g < 6; ++g)
            for (int a = 0; a < n; ++a) {
                cvec lhs = transform * sys.to_vec(sys.act(g, sys.basis_element(a)));
                cvec rhs(6);
                for (int h = 0; h < 6; ++h)
                    rhs(h) = transform(s3.group.mul(h, g), a);
                worst = std::max(worst, (lhs - rhs).norm());
            }
    }
    pass = pass && worst < 1e-9;
    char detail[80];
    std::snprintf(detail, sizeof(detail), "worst model residual=%.2e", worst);
    report("criterion-7 classical models", pass, detail, seconds_since(start));
}

// 8. SU(2) parity example at cutoff jmax = 2
void criterion_8()
{
    auto start = Clock::now();
    GalleryEntry e = su2_parity_entry(2, {1, 0}, 4);
    bool pass = true;
    double coaction = 0.0, module = 0.0, ladder = 0.0;
    for (const Claim& c : e.claims) {
        pass = pass && c.pass;
        if (c.name.rfind("coaction", 0) == 0)
            coaction = std::max(coaction, c.residual);
        else if (c.name.find("module relation") != std::string::npos)
            module = std::max(module, c.residual);
        else if (c.name.find("ladder") != std::string::npos)
            ladder = std::max(ladder, c.residual);
    }
    pass = pass && coaction < 1e-9 && module < 1e-9 && ladder < 1e-10;
    char detail[120];
    std::snprintf(detail, sizeof(detail), "coaction=%.2e module=%.2e ladder=%.2e", coaction, module, ladder);
    report("criterion-8 su2 truncation", pass, detail, seconds_since(start));
}

// 9. CLI contract and byte-identical round trips
void criterion_9()
{
    auto start = Clock::now();
    bool pass = true;
    std::string detail = "exit codes 0/1/2, byte-identical round trip";

    fs::create_directories(g_scratch);
    const std::string pass_spec = g_scratch + "/pass.spec";
    specio::write_file(pass_spec, specio::write_system_spec(*trivial_system("S3", scalars()).system));

    // a cocycle violation that parses cleanly: omega(j,k) = zeta^{j k^2}
    FactorSystem bad = trivial_factor_system(build_group("cyclic(3)"), scalars());
    for (int p = 0; p < 3; ++p)
        for (int r = 0; r < 3; ++r)
            bad.omega_at(p, r) *= root_of_unity(static_cast<long>(p) * r * r, 3);
    const std::string fail_spec = g_scratch + "/cocycle-fail.spec";
    specio::write_file(fail_spec, specio::write_system_spec(bad));

    auto expect = [&](const std::string& args, int want) {
        int got = run_cli(args);
        if (got != want) {
            pass = false;
            detail = "command '" + args + "' exited " + std::to_string(got) + ", expected " +
                     std::to_string(want);
        }
    };
    expect("verify " + pass_spec, 0);
    expect("verify " + pass_spec + " --json", 0);
    expect("verify " + fail_spec, 1);
    expect("verify " + g_scratch + "/no-such-file.spec", 2);
    expect("verify", 2);
    expect("frobnicate " + pass_spec, 2);
    expect("construct " + pass_spec + " -o " + g_scratch + "/out-pass", 0);
    expect("construct " + fail_spec + " -o " + g_scratch + "/out-fail", 1);
    expect("construct " + pass_spec + " -o " + g_scratch + "/out-skip --skip-roundtrip", 0);
    expect("gallery bicharacter --n 3 -o " + g_scratch + "/out-gallery", 0);
    expect("construct " + g_scratch + "/out-gallery/bicharacter.spec -o " + g_scratch + "/out-bic", 0);
    expect("gallery trivial --group S3 -o " + g_scratch + "/out-trivial", 0);
    expect("verify " + g_scratch + "/out-trivial/trivial.spec", 0); // exported specs re-verify
    expect("gallery unknown-entry", 2);
    expect("gallery su2-parity --jmax 2", 0);

    // nothing persisted for the failing construct
    if (fs::exists(g_scratch + "/out-fail/constants.dump")) {
        pass = false;
        detail = "failing construct persisted output";
    }

    // byte-identical round trips through the CLI outputs
    for (const std::string& path : {g_scratch + "/out-gallery/bicharacter.spec", pass_spec}) {
        std::string text = specio::read_file(path);
        specio::SystemSpecFile parsed = specio::parse_system_spec(text);
        if (specio::write_system_spec(parsed.system, parsed.tolerance) != text) {
            pass = false;
            detail = "round trip of " + path + " is not byte-identical";
        }
    }
    {
        std::string text = specio::read_file(g_scratch + "/out-pass/constants.dump");
        specio::ConstantsDump dump = specio::parse_constants(text);
        ConstructedSystem sys = build_system(*trivial_system("S3", scalars()).system, Tolerances{}, true);
        if (specio::write_constants(sys) != text || dump.tensors.empty()) {
            pass = false;
            detail = "constants dump round trip failed";
        }
    }

    report("criterion-9 cli contract", pass, detail, seconds_since(start));
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 3) {
        std::cerr << "usage: acceptance <cleft-cli> <scratch-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_scratch = argv[2];

    auto start = Clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    double total = seconds_since(start);
    bool in_budget = total < 120.0;
    std::printf("%s  total runtime %.2f s (budget 120 s)\n", in_budget ? "PASS" : "FAIL", total);
    if (!in_budget)
        ++g_failures;
    return g_failures == 0 ? 0 : 1;
}
