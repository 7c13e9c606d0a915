#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mono/valgroup.hpp>
#include <mono/error.hpp>

#include <random>

using namespace mono;

namespace {

// basis (1, sqrt2, sqrt3)
SquarefreeBasis basis3() { return SquarefreeBasis(std::size_t(3)); }

IrrComb comb(std::initializer_list<int> cs) {
    QVec v;
    for (int c : cs) v.push_back(Rat(c));
    return IrrComb(v);
}

GroupValue val1(std::initializer_list<int> cs) {
    return GroupValue({comb(cs)});
}

} // namespace

TEST_CASE("sign of square-root combinations") {
    auto b = basis3();
    // 2*sqrt2 - sqrt3 > 0 since (2 sqrt2)^2 = 8 > 3
    CHECK(sign(comb({0, 2, -1}), b) == 1);
    CHECK(sign(comb({0, 0, 0}), b) == 0);
    // 1 - sqrt2 < 0
    CHECK(sign(comb({1, -1, 0}), b) == -1);
}

TEST_CASE("sign properties on random combinations") {
    auto b = basis3();
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> coeff(-9, 9), den(1, 9);
    for (int trial = 0; trial < 200; ++trial) {
        QVec v;
        for (int j = 0; j < 3; ++j) v.push_back(Rat(coeff(rng), den(rng)));
        IrrComb a(v);
        if (a.is_zero()) continue;
        CHECK(sign(a, b) * sign(-a, b) == -1);
        CHECK(sign(a + a, b) == sign(a, b));
    }
}

TEST_CASE("lexicographic comparison") {
    auto b = basis3();
    // rank 1: 2*sqrt2 vs sqrt3
    GroupValue x({comb({0, 2, 0})});
    GroupValue y({comb({0, 0, 1})});
    CHECK(compare(x, y, b) == Ordering::Greater);
    // rank 2: (0, sqrt2) < (sqrt3, 0)
    GroupValue a({comb({0, 0, 0}), comb({0, 1, 0})});
    GroupValue c({comb({0, 0, 1}), comb({0, 0, 0})});
    CHECK(compare(a, c, b) == Ordering::Less);
    CHECK(compare(a, a, b) == Ordering::Equal);
}

TEST_CASE("comparison is a total order compatible with addition") {
    auto b = basis3();
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coeff(-5, 5), den(1, 7);
    auto rnd = [&]() {
        std::vector<IrrComb> levels;
        for (int lev = 0; lev < 2; ++lev) {
            QVec v;
            for (int j = 0; j < 3; ++j) v.push_back(Rat(coeff(rng), den(rng)));
            levels.push_back(IrrComb(v));
        }
        return GroupValue(levels);
    };
    for (int trial = 0; trial < 100; ++trial) {
        GroupValue x = rnd(), y = rnd(), z = rnd();
        auto xy = compare(x, y, b);
        auto yx = compare(y, x, b);
        if (xy == Ordering::Less) CHECK(yx == Ordering::Greater);
        if (xy == Ordering::Equal) CHECK(yx == Ordering::Equal);
        // transitivity spot check
        if (xy == Ordering::Less && compare(y, z, b) == Ordering::Less)
            CHECK(compare(x, z, b) == Ordering::Less);
        // translation invariance
        CHECK(compare(x + z, y + z, b) == xy);
    }
}

TEST_CASE("rational relations") {
    auto b = basis3();
    (void)b;
    // {sqrt2, sqrt3}: none
    GroupValue s2 = val1({0, 1, 0});
    GroupValue s3 = val1({0, 0, 1});
    CHECK(!rational_relation({s2, s3}));
    // {sqrt2, 3 sqrt2}: (3, -1)
    GroupValue s23 = val1({0, 3, 0});
    auto rel = rational_relation({s2, s23});
    REQUIRE(rel);
    CHECK((*rel)[0] * Rat(1) + (*rel)[1] * Rat(3) == 0);
    // {sqrt2 + sqrt3, sqrt2, sqrt3}: (1, -1, -1) up to scale
    GroupValue sum = val1({0, 1, 1});
    auto rel2 = rational_relation({sum, s2, s3});
    REQUIRE(rel2);
    // check by substitution: lambda0*(s2+s3) + lambda1*s2 + lambda2*s3 = 0
    GroupValue acc = sum.scaled((*rel2)[0]) + s2.scaled((*rel2)[1]) + s3.scaled((*rel2)[2]);
    CHECK(acc.is_zero());
}

TEST_CASE("monomial values") {
    auto b = basis3();
    GroupValue s2 = val1({0, 1, 0});
    GroupValue s3 = val1({0, 0, 1});
    WeightAssignment w(b, 2, {s2, s3});
    // e = (2, 1) -> 2 sqrt2 + sqrt3
    GroupValue v = monomial_value(w, {Rat(2), Rat(1)});
    CHECK(v == val1({0, 2, 1}));
    CHECK(monomial_value(w, {Rat(0), Rat(0)}).is_zero());

    WeightAssignment w2(b, 1, {s2, val1({0, 3, 0})});
    CHECK(monomial_value(w2, {Rat(1), Rat(1)}) == val1({0, 4, 0}));

    // additivity on random exponents
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> e(0, 6);
    for (int trial = 0; trial < 50; ++trial) {
        QVec e1{Rat(e(rng)), Rat(e(rng))}, e2{Rat(e(rng)), Rat(e(rng))};
        QVec esum{e1[0] + e2[0], e1[1] + e2[1]};
        CHECK(monomial_value(w, esum) == monomial_value(w, e1) + monomial_value(w, e2));
    }
}

TEST_CASE("weight assignment checks dependence structure") {
    auto b = basis3();
    GroupValue s2 = val1({0, 1, 0});
    GroupValue s3 = val1({0, 0, 1});
    WeightAssignment good(b, 1, {s2, val1({0, 3, 0})});
    CHECK_NOTHROW(good.check());
    WeightAssignment bad(b, 1, {s2, s3});
    CHECK_THROWS_AS(bad.check(), EngineError);
}
