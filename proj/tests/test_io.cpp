#include "cleft/io.hpp"

#include "cleft/gallery.hpp"
#include "cleft/report.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace cleft;
using namespace cleft::testing;

namespace {

FactorSystem custom_group_fixture()
{
    // S3 presented as an explicit Cayley table with user-supplied irreps
    GroupData s3 = build_group("S3");
    s3.group.name = "custom";
    GroupData custom = make_group_data(s3.group, s3.irreps);
    return trivial_factor_system(std::move(custom), BAlgebra{{1, 1}});
}

} // namespace

TEST_CASE("document parser: tokens, arrays, blocks, comments, errors")
{
    auto items = specio::parse_document("a 1\nb [ 1 2.5 -3e-2 ]\nc { d x # comment\n }\n");
    REQUIRE(items.size() == 3);
    CHECK(items[0].second.scalar == "1");
    CHECK(items[1].second.numbers == std::vector<double>{1.0, 2.5, -3e-2});
    CHECK(items[2].second.items.at(0).second.scalar == "x");

    CHECK_THROWS_WITH_AS(specio::parse_document("a {"), doctest::Contains("unexpected end"), spec_error);
    CHECK_THROWS_WITH_AS(specio::parse_document("a [ x ]"), doctest::Contains("not a number"), spec_error);
    // the error names the line
    try {
        specio::parse_document("a 1\nb [ 2\n  oops ]\n");
        CHECK(false);
    } catch (const spec_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("system specs round-trip byte-identically")
{
    std::vector<FactorSystem> fixtures;
    fixtures.push_back(trivial_factor_system(build_group("S3"), BAlgebra{{2}}));
    fixtures.push_back(bicharacter_fixture(3));
    fixtures.push_back(swap_parity_fixture());
    fixtures.push_back(custom_group_fixture());
    {
        FactorSystem base = trivial_factor_system(build_group("cyclic(3)"), BAlgebra{{2, 1}});
        fixtures.push_back(conjugate_factor_system(base, random_conjugation(base, 5)));
    }

    for (const FactorSystem& fs : fixtures) {
        std::string text = specio::write_system_spec(fs);
        specio::SystemSpecFile parsed = specio::parse_system_spec(text);
        CHECK(factor_system_distance(fs, parsed.system) == 0.0);
        std::string again = specio::write_system_spec(parsed.system);
        CHECK(text == again);
    }
}

TEST_CASE("tolerance override block round-trips")
{
    FactorSystem fs = swap_parity_fixture();
    Tolerances tol{1e-7, 1e-11};
    std::string text = specio::write_system_spec(fs, tol);
    specio::SystemSpecFile parsed = specio::parse_system_spec(text);
    REQUIRE(parsed.tolerance.has_value());
    CHECK(parsed.tolerance->algebraic == 1e-7);
    CHECK(parsed.tolerance->character == 1e-11);
    CHECK(specio::write_system_spec(parsed.system, parsed.tolerance) == text);
}

TEST_CASE("structural validation on parse: normalization and homomorphism failures")
{
    // omega(1,1) != 1 is rejected naming the normalization axiom
    FactorSystem fs = trivial_factor_system(build_group("cyclic(2)"), scalars());
    fs.omega_at(0, 0) *= complexd(0, 1);
    std::string text = specio::write_system_spec(fs);
    CHECK_THROWS_WITH_AS(specio::parse_system_spec(text), doctest::Contains("normalization"), spec_error);

    // a gamma that is an anti-homomorphism is rejected with the basis pair
    FactorSystem fs2 = trivial_factor_system(build_group("cyclic(2)"), BAlgebra{{2}});
    fs2.gamma[1] = BLinearMap::from_function(fs2.algebra, fs2.algebra, {1}, [&](const BElement& b) {
        TensorElement out = amplify(b, 0, 1);
        out.blocks[0] = out.blocks[0].transpose().eval();
        return out;
    });
    std::string text2 = specio::write_system_spec(fs2);
    try {
        specio::parse_system_spec(text2);
        CHECK(false);
    } catch (const spec_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("*-homomorphism") != std::string::npos);
        CHECK(msg.find("basis pair") != std::string::npos);
    }

    // a non-isometric omega is rejected
    FactorSystem fs3 = trivial_factor_system(build_group("cyclic(2)"), scalars());
    fs3.omega_at(1, 1) *= 0.5;
    CHECK_THROWS_WITH_AS(specio::parse_system_spec(specio::write_system_spec(fs3)),
                         doctest::Contains("isometry"), spec_error);
}

TEST_CASE("parse reports missing and duplicate factor system entries")
{
    FactorSystem fs = trivial_factor_system(build_group("cyclic(2)"), scalars());
    std::string text = specio::write_system_spec(fs);

    std::string missing = text;
    std::size_t at = missing.find("gamma");
    missing.replace(at, 5, "gamma_typo");
    CHECK_THROWS_AS(specio::parse_system_spec(missing), spec_error);

    // duplicate gamma: replace the second gamma label with the first
    std::string dup = text;
    std::size_t first = dup.find("irrep chi0");
    std::size_t second = dup.find("irrep chi1");
    REQUIRE(first != std::string::npos);
    REQUIRE(second != std::string::npos);
    dup.replace(second, 10, "irrep chi0");
    CHECK_THROWS_WITH_AS(specio::parse_system_spec(dup), doctest::Contains("duplicate"), spec_error);

    // wrong matrix size
    FactorSystem fat = trivial_factor_system(build_group("cyclic(2)"), scalars());
    std::string fat_text = specio::write_system_spec(fat);
    std::size_t bracket = fat_text.find("matrix [");
    REQUIRE(bracket != std::string::npos);
    fat_text.insert(bracket + 8, "\n    0 0");
    CHECK_THROWS_WITH_AS(specio::parse_system_spec(fat_text), doctest::Contains("expected"), spec_error);
}

TEST_CASE("custom group specs validate the table and the irrep catalog")
{
    FactorSystem fs = custom_group_fixture();
    std::string text = specio::write_system_spec(fs);
    specio::SystemSpecFile parsed = specio::parse_system_spec(text);
    CHECK(parsed.system.group.group.order == 6);
    CHECK(verify_factor_system(parsed.system).pass);

    // dropping an irrep breaks the Burnside count
    std::string broken = text;
    std::size_t at = broken.find("    irrep {");
    REQUIRE(at != std::string::npos);
    std::size_t end = broken.find("    irrep {", at + 1);
    REQUIRE(end != std::string::npos);
    broken.erase(at, end - at);
    CHECK_THROWS_WITH_AS(specio::parse_system_spec(broken), doctest::Contains("incomplete"), spec_error);
}

TEST_CASE("gallery exports re-verify after parsing")
{
    for (GalleryEntry e : {trivial_system("S3", scalars()), discrete_circle_cover(2, 3), bicharacter_system(3)}) {
        REQUIRE(e.system.has_value());
        std::string text = specio::write_system_spec(*e.system);
        specio::SystemSpecFile parsed = specio::parse_system_spec(text);
        CHECK(verify_factor_system(parsed.system).pass);
        CHECK(specio::write_system_spec(parsed.system) == text);
    }
}

TEST_CASE("constants dumps round-trip byte-identically and match the system")
{
    FactorSystem fs = bicharacter_fixture(2);
    ConstructedSystem sys = build_system(fs);
    std::string text = specio::write_constants(sys);
    specio::ConstantsDump dump = specio::parse_constants(text);
    CHECK(dump.component_labels.size() == 4);

    // the parsed tensors agree entrywise with the system's constants
    const int k = sys.irrep_count();
    int found = 0;
    for (const auto& t : dump.tensors) {
        int p = dump.group.index_of(t.pi);
        int r = dump.group.index_of(t.rho);
        int s = dump.group.index_of(t.sigma);
        CHECK(frob_diff(t.data, sys.constants[(p * k + r) * k + s]) == 0.0);
        ++found;
    }
    CHECK(found > 0);

    // byte-identical after reparsing through a rebuilt system
    ConstructedSystem sys2 = build_system(bicharacter_fixture(2));
    CHECK(specio::write_constants(sys2) == text);
}

TEST_CASE("reports are deterministic and digest-covered")
{
    FactorSystem fs = swap_parity_fixture();
    std::string text = specio::write_system_spec(fs);

    Report a;
    a.input_digest = digest(text);
    a.append(verify_factor_system(fs), "axiom");
    Report b;
    b.input_digest = digest(text);
    b.append(verify_factor_system(fs), "axiom");
    CHECK(a.to_text() == b.to_text());
    CHECK(a.to_json() == b.to_json());
    CHECK(a.pass());
    CHECK(digest(text) != digest(text + " "));

    // json is syntactically valid and carries the schema marker
    auto j = nlohmann::json::parse(a.to_json());
    CHECK(j["schema"] == 1);
    CHECK(j["pass"] == true);
}
