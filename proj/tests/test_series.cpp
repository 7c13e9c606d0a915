#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mono/series.hpp>
#include <mono/error.hpp>

#include <random>

using namespace mono;

namespace {

FieldPtr F() { return CycloField::make(4); }

TruncatedSeries var(std::size_t n, std::size_t i, Rat trunc = 8) {
    return TruncatedSeries::variable(n, F(), trunc, i);
}

TruncatedSeries cst(std::size_t n, long c, Rat trunc = 8) {
    return TruncatedSeries::constant(n, F(), trunc, F()->from_rat(Rat(c)));
}

// independent tiny polynomial evaluator used as an expansion oracle:
// expand (a + b)^2 etc. by repeated naive multiplication over the terms
TruncatedSeries naive_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
    TruncatedSeries out(a.nvars(), a.field(), a.trunc());
    for (const auto& [e1, c1] : a.terms())
        for (const auto& [e2, c2] : b.terms()) {
            QVec e(e1);
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += e2[i];
            out.add_term(e, a.field()->mul(c1, c2));
        }
    return out;
}

} // namespace

TEST_CASE("cyclotomic field arithmetic") {
    auto f4 = CycloField::make(4);
    // i^2 = -1
    FieldElem i = f4->zeta_pow(1);
    CHECK(f4->mul(i, i) == f4->from_rat(Rat(-1)));
    // inverse of 2 + i: (2 + i)(2 - i) = 5
    FieldElem a = f4->add(f4->from_rat(Rat(2)), i);
    FieldElem inv = f4->inv(a);
    CHECK(f4->mul(a, inv) == f4->one());
    // embedding into Q(zeta_8): i = zeta_8^2
    auto f8 = CycloField::make(8);
    CHECK(f8->embed(*f4, i) == f8->zeta_pow(2));
    // unit normal form: -3 = 3 * zeta_4^2
    auto un = f4->unit_normal(f4->from_rat(Rat(-3)));
    REQUIRE(un);
    CHECK(un->first == Rat(3));
    CHECK(un->second == 2);
    // pow_rational: (-4)^(1/2) = 2i in Q(zeta_4)
    FieldElem r = f4->pow_rational(f4->from_rat(Rat(-4)), Rat(1, 2));
    CHECK(r == f4->mul_rat(i, Rat(2)));
    // 2^(1/2) requires an extension
    CHECK_THROWS_AS(f4->pow_rational(f4->from_rat(Rat(2)), Rat(1, 2)),
                    FieldExtensionRequired);
}

TEST_CASE("substitute: monomial composition") {
    // g = x1, x1 -> y1^2 y2
    TruncatedSeries g = var(1, 0);
    Substitution sub(1, 2, F(), 8);
    sub.set(0, Assignment::product({SubstFactor{0, Rat(2), F()->zero()},
                                    SubstFactor{1, Rat(1), F()->zero()}}));
    TruncatedSeries out = substitute(g, sub);
    CHECK(out.equals(naive_mul(naive_mul(var(2, 0), var(2, 0)), var(2, 1))));

    // g = x1 x2, x1 -> y1, x2 -> y1 y2 gives y1^2 y2
    TruncatedSeries g2 = naive_mul(var(2, 0), var(2, 1));
    Substitution sub2(2, 2, F(), 8);
    sub2.set(0, Assignment::product({SubstFactor{0, Rat(1), F()->zero()}}));
    sub2.set(1, Assignment::product({SubstFactor{0, Rat(1), F()->zero()},
                                     SubstFactor{1, Rat(1), F()->zero()}}));
    CHECK(substitute(g2, sub2).equals(out));
}

TEST_CASE("substitute: declared translation expands correctly") {
    // g = x1 + x1^2 with x1 -> (y1 + 1) y2; the undeclared form is rejected
    TruncatedSeries g = var(1, 0) + naive_mul(var(1, 0), var(1, 0));
    {
        // translated factor shape is fine
        Substitution sub(1, 2, F(), 8);
        sub.set(0, Assignment::product({SubstFactor{0, Rat(1), F()->one()},
                                        SubstFactor{1, Rat(1), F()->zero()}}));
        TruncatedSeries out = substitute(g, sub);
        // oracle: u = y2 + y1 y2; expected u + u^2 by naive expansion
        TruncatedSeries u = var(2, 1) + naive_mul(var(2, 0), var(2, 1));
        TruncatedSeries expect = u + naive_mul(u, u);
        CHECK(out.equals(expect));
    }
    {
        // an order-0 series body without a declared translation is rejected
        TruncatedSeries body = var(2, 1) + cst(2, 1);
        CHECK_THROWS_AS(Assignment::series(body), EngineError);
    }
}

TEST_CASE("unit_pow: binomial series") {
    // (1 + y1)^(1/2) at trunc 3 = 1 + y1/2 - y1^2/8
    TruncatedSeries u = cst(1, 1, 3) + var(1, 0, 3);
    TruncatedSeries half = unit_pow(u, Rat(1, 2));
    TruncatedSeries expect(1, F(), 3);
    expect.add_term({Rat(0)}, F()->from_rat(Rat(1)));
    expect.add_term({Rat(1)}, F()->from_rat(Rat(1, 2)));
    expect.add_term({Rat(2)}, F()->from_rat(Rat(-1, 8)));
    CHECK(half.equals(expect));

    // squaring oracle: (1 + y1)^2 via naive multiplication
    TruncatedSeries u8 = cst(1, 1) + var(1, 0);
    CHECK(unit_pow(u8, Rat(2)).equals(naive_mul(u8, u8)));
    // identity
    CHECK(unit_pow(cst(1, 1), Rat(7, 3)).equals(cst(1, 1)));
    // group law on random exponents
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> num(-4, 4), den(1, 4);
    for (int trial = 0; trial < 20; ++trial) {
        Rat a(num(rng), den(rng)), b(num(rng), den(rng));
        TruncatedSeries lhs = unit_pow(u8, a) * unit_pow(u8, b);
        TruncatedSeries rhs = unit_pow(u8, a + b);
        CHECK(lhs.equals(rhs));
    }
    CHECK_THROWS_AS(unit_pow(var(1, 0), Rat(2)), EngineError);
}

TEST_CASE("substitution is functorial on random polynomials") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> coeff(-3, 3), expo(0, 2);
    auto rnd_poly = [&](std::size_t n) {
        TruncatedSeries g(n, F(), 6);
        for (int t = 0; t < 4; ++t) {
            QVec e;
            for (std::size_t i = 0; i < n; ++i) e.push_back(Rat(expo(rng)));
            g.add_term(e, F()->from_rat(Rat(coeff(rng))));
        }
        return g;
    };
    for (int trial = 0; trial < 20; ++trial) {
        TruncatedSeries g = rnd_poly(2);
        // sigma1: x1 -> y1 y2, x2 -> y2; sigma2: y1 -> z1^2, y2 -> z1 z2
        Substitution s1(2, 2, F(), 6);
        s1.set(0, Assignment::product({SubstFactor{0, Rat(1), F()->zero()},
                                       SubstFactor{1, Rat(1), F()->zero()}}));
        s1.set(1, Assignment::product({SubstFactor{1, Rat(1), F()->zero()}}));
        Substitution s2(2, 2, F(), 6);
        s2.set(0, Assignment::product({SubstFactor{0, Rat(2), F()->zero()}}));
        s2.set(1, Assignment::product({SubstFactor{0, Rat(1), F()->zero()},
                                       SubstFactor{1, Rat(1), F()->zero()}}));
        // composite: x1 -> z1^3 z2, x2 -> z1 z2
        Substitution s12(2, 2, F(), 6);
        s12.set(0, Assignment::product({SubstFactor{0, Rat(3), F()->zero()},
                                        SubstFactor{1, Rat(1), F()->zero()}}));
        s12.set(1, Assignment::product({SubstFactor{0, Rat(1), F()->zero()},
                                        SubstFactor{1, Rat(1), F()->zero()}}));
        CHECK(substitute(substitute(g, s1), s2).equals(substitute(g, s12)));
    }
}

TEST_CASE("ring axioms on random series") {
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> coeff(-3, 3), expo(0, 2);
    auto rnd = [&]() {
        TruncatedSeries g(2, F(), 5);
        for (int t = 0; t < 3; ++t) {
            QVec e{Rat(expo(rng)), Rat(expo(rng))};
            g.add_term(e, F()->from_rat(Rat(coeff(rng))));
        }
        return g;
    };
    for (int trial = 0; trial < 30; ++trial) {
        TruncatedSeries a = rnd(), b = rnd(), c = rnd();
        CHECK((a * b).equals(b * a));
        CHECK(((a * b) * c).equals(a * (b * c)));
        CHECK((a * (b + c)).equals(a * b + a * c));
    }
}

TEST_CASE("ord_in_last") {
    // F = x2^2 + x1 x2: t = 2 in variable 2
    TruncatedSeries f = naive_mul(var(2, 1), var(2, 1)) + naive_mul(var(2, 0), var(2, 1));
    auto o = ord_in_last(f, 1);
    REQUIRE(o);
    CHECK(*o == 2);
    CHECK(!ord_in_last(var(2, 0), 1));
    TruncatedSeries f2 =
        naive_mul(naive_mul(var(1, 0), var(1, 0)), var(1, 0));
    TruncatedSeries f5 = f2 * var(1, 0) * var(1, 0);
    auto o2 = ord_in_last(f2 + f5, 0);
    REQUIRE(o2);
    CHECK(*o2 == 3);
}

TEST_CASE("tschirnhaus kills the subleading coefficient") {
    // F = x2^2 + 2 x1 x2, t = 2: phi = -x1, fbar = x2^2 - x1^2
    TruncatedSeries f =
        naive_mul(var(2, 1), var(2, 1)) + naive_mul(var(2, 0), var(2, 1)).scaled_rat(2);
    auto ts = tschirnhaus(f, 1, 2);
    TruncatedSeries expect_phi = -var(2, 0);
    CHECK(ts.phi.equals(expect_phi));
    TruncatedSeries expect_fbar =
        naive_mul(var(2, 1), var(2, 1)) - naive_mul(var(2, 0), var(2, 0));
    CHECK(ts.fbar.equals(expect_fbar));

    // fixed point: F = x2^t stays put
    TruncatedSeries p2 = naive_mul(var(2, 1), var(2, 1));
    auto ts2 = tschirnhaus(p2, 1, 2);
    CHECK(ts2.phi.is_zero());
    CHECK(ts2.fbar.equals(p2));

    // F = x2^3 + 3 x1 x2^2: phi = -x1, fbar = x2^3 - 3 x1^2 x2 + 2 x1^3
    TruncatedSeries x1 = var(2, 0), x2 = var(2, 1);
    TruncatedSeries f3 = naive_mul(naive_mul(x2, x2), x2) +
                         naive_mul(naive_mul(x1, x2), x2).scaled_rat(3);
    auto ts3 = tschirnhaus(f3, 1, 3);
    CHECK(ts3.phi.equals(-x1));
    TruncatedSeries expect3 = naive_mul(naive_mul(x2, x2), x2) -
                              naive_mul(naive_mul(x1, x1), x2).scaled_rat(3) +
                              naive_mul(naive_mul(x1, x1), x1).scaled_rat(2);
    CHECK(ts3.fbar.equals(expect3));

    // back-substitution recovers F
    Substitution back = Substitution::identity(2, F(), 8);
    back.set(1, Assignment::series(x2 - ts3.phi));
    CHECK(substitute(ts3.fbar, back).equals(f3));
    CHECK_THROWS_AS(tschirnhaus(f3, 1, 2), EngineError);
}

TEST_CASE("residue") {
    TruncatedSeries u = cst(1, 3) + var(1, 0);
    CHECK(residue(u) == F()->from_rat(Rat(3)));
    CHECK(residue(cst(1, 1)) == F()->one());
    // via unit_pow: constant term of (1+y)^(1/2) is 1
    TruncatedSeries h = unit_pow(cst(1, 1) + var(1, 0), Rat(1, 2));
    CHECK(residue(h) == F()->one());
    CHECK_THROWS_AS(residue(var(1, 0)), EngineError);
}
