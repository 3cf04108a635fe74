#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pwlstl/formula.hpp"
#include "support/random_instances.hpp"

using namespace pwlstl;

TEST_CASE("single atom") {
    auto f = parse_formula("R1");
    CHECK(f->kind() == FormulaKind::Atom);
    CHECK(f->region() == "R1");
    CHECK(format_formula(*f) == "R1");
}

TEST_CASE("nested temporal chain") {
    auto f = parse_formula("F[0,150] G[0,15] R1");
    REQUIRE(f->kind() == FormulaKind::Eventually);
    CHECK(f->interval().a == 0.0);
    CHECK(f->interval().b == 150.0);
    const auto& inner = *f->children()[0];
    REQUIRE(inner.kind() == FormulaKind::Always);
    CHECK(inner.interval().b == 15.0);
    CHECK(inner.children()[0]->kind() == FormulaKind::Atom);
    CHECK(inner.children()[0]->region() == "R1");
}

TEST_CASE("until with negated lhs") {
    auto f = parse_formula("(!G1) U[0,30] C1");
    REQUIRE(f->kind() == FormulaKind::Until);
    CHECK(f->children()[0]->kind() == FormulaKind::NegAtom);
    CHECK(f->children()[0]->region() == "G1");
    CHECK(f->children()[1]->kind() == FormulaKind::Atom);
    CHECK(format_formula(*f) == "(!G1) U[0,30] C1");
}

TEST_CASE("negation on a non-atom is an NNF violation") {
    CHECK_THROWS_AS(parse_formula("!(F[0,1] R1)"), ParseError);
    try {
        parse_formula("!(F[0,1] R1)");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseErrorKind::NnfViolation);
    }
    CHECK_THROWS_AS(parse_formula("!!R1"), ParseError);
}

TEST_CASE("interval validation") {
    try {
        parse_formula("G[5,2] R1");
        FAIL("expected NegativeInterval");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseErrorKind::NegativeInterval);
    }
    try {
        parse_formula("G[-1,2] R1");
        FAIL("expected NegativeInterval");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseErrorKind::NegativeInterval);
    }
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_formula("R1 &");
        FAIL("expected syntax error");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseErrorKind::Syntax);
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_AS(parse_formula(""), ParseError);
    CHECK_THROWS_AS(parse_formula("(R1"), ParseError);
    CHECK_THROWS_AS(parse_formula("R1 R2"), ParseError);
    CHECK_THROWS_AS(parse_formula("U R1"), ParseError);
}

TEST_CASE("missing interval means full horizon, resolved at load") {
    auto f = parse_formula("F G[0,5] R1");
    CHECK(f->interval().full_horizon);
    CHECK(has_unresolved_horizon(*f));
    auto resolved = resolve_horizon(f, 40.0);
    CHECK_FALSE(has_unresolved_horizon(*resolved));
    CHECK(resolved->interval().a == 0.0);
    CHECK(resolved->interval().b == 40.0);
    CHECK(resolved->children()[0]->interval().b == 5.0);
}

TEST_CASE("negated conjunction formatting") {
    auto f = Formula::conj({Formula::neg_atom("A1"), Formula::neg_atom("A2")});
    CHECK(format_formula(*f) == "(!A1) & (!A2)");
}

TEST_CASE("precedence: U tighter than &, & tighter than |") {
    auto f = parse_formula("A U[0,5] B & C | D");
    REQUIRE(f->kind() == FormulaKind::Or);
    const auto& left = *f->children()[0];
    REQUIRE(left.kind() == FormulaKind::And);
    CHECK(left.children()[0]->kind() == FormulaKind::Until);
    CHECK(left.children()[1]->region() == "C");
    CHECK(f->children()[1]->region() == "D");
}

TEST_CASE("and flattening keeps child order") {
    auto f = parse_formula("A & B & C");
    REQUIRE(f->kind() == FormulaKind::And);
    REQUIRE(f->children().size() == 3);
    CHECK(f->children()[0]->region() == "A");
    CHECK(f->children()[2]->region() == "C");
}

TEST_CASE("analyze counts") {
    auto atom = parse_formula("R1");
    auto s1 = analyze(*atom);
    CHECK(s1.num_temporal_ops == 0);
    CHECK(s1.num_atoms == 1);
    CHECK_FALSE(s1.single_temporal_op);

    auto ev = parse_formula("F[0,5] R1");
    auto s2 = analyze(*ev);
    CHECK(s2.num_temporal_ops == 1);
    CHECK(s2.num_atoms == 1);
    CHECK(s2.single_temporal_op);

    // Mission with one until and two nested eventually/always chains.
    auto phi3 = parse_formula("((!G1) U[0,30] C1) & (F[50,80] G[0,5] R1) & (F[0,100] G[0,5] R2)");
    auto s3 = analyze(*phi3);
    CHECK(s3.num_temporal_ops == 5);
    CHECK(s3.num_atoms == 4);
    CHECK(s3.max_nesting == 2);
    CHECK_FALSE(s3.single_temporal_op);

    // Flat conjunction of one-operator conjuncts keeps the reduced path.
    auto flat = parse_formula("(!A1) & (F[0,5] R1) & (G[0,5] R2)");
    CHECK(analyze(*flat).single_temporal_op);

    auto nested = parse_formula("(!A1) & (F[0,5] G[0,1] R1)");
    CHECK_FALSE(analyze(*nested).single_temporal_op);
}

TEST_CASE("analyze is invariant under child reordering") {
    auto a = parse_formula("(F[0,5] R1) & (G[1,2] R2) & R3");
    auto b = parse_formula("R3 & (G[1,2] R2) & (F[0,5] R1)");
    auto sa = analyze(*a);
    auto sb = analyze(*b);
    CHECK(sa.num_temporal_ops == sb.num_temporal_ops);
    CHECK(sa.num_atoms == sb.num_atoms);
    CHECK(sa.max_nesting == sb.max_nesting);
    CHECK(sa.single_temporal_op == sb.single_temporal_op);
}

TEST_CASE("region name census") {
    auto f = parse_formula("(!G1) U[0,30] C1 & F[0,5] C1");
    auto names = region_names(*f);
    REQUIRE(names.size() == 2);
    CHECK(names[0] == "C1");
    CHECK(names[1] == "G1");
}

TEST_CASE("parse/format round trip on random formulas") {
    pwlstl::testing::Rng rng(20240811);
    pwlstl::testing::InstanceOptions opt;
    for (int trial = 0; trial < 500; ++trial) {
        auto f = pwlstl::testing::random_formula(rng, opt);
        auto text = format_formula(*f);
        auto back = parse_formula(text);
        CHECK(structurally_equal(*f, *back));
    }
}

TEST_CASE("mutated inputs never crash, only structured errors") {
    pwlstl::testing::Rng rng(991);
    pwlstl::testing::InstanceOptions opt;
    const std::string alphabet = "GFU!&|()[],0123456789. RAB_";
    int rejected = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text = format_formula(*pwlstl::testing::random_formula(rng, opt));
        std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
        std::uniform_int_distribution<int> edits(1, 3);
        int n = edits(rng);
        for (int e = 0; e < n; ++e) {
            std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
            std::size_t at = pos(rng);
            switch (ch(rng) % 3) {
                case 0:
                    text[at] = alphabet[ch(rng)];
                    break;
                case 1:
                    text.insert(at, 1, alphabet[ch(rng)]);
                    break;
                default:
                    text.erase(at, 1);
                    break;
            }
            if (text.empty()) text = "R";
        }
        try {
            auto f = parse_formula(text);
            CHECK(f != nullptr);
        } catch (const ParseError&) {
            ++rejected;
        }
    }
    CHECK(rejected > 0);
}
