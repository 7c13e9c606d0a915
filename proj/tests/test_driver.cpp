#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mono/driver.hpp>
#include <mono/error.hpp>

using namespace mono;

namespace {

FieldPtr F() { return CycloField::make(4); }
SquarefreeBasis B() { return SquarefreeBasis(std::size_t(3)); }

GroupValue rank1(std::initializer_list<Rat> cs) {
    return GroupValue({IrrComb(QVec(cs))});
}

// germ 1: x1 = y1, x2 = y1^3 + y1^3 y2, weights (sqrt2, 5 sqrt2)
PreparedPair germ1(Rat trunc = 8) {
    PreparedPair p;
    p.n = p.m = 2;
    p.s = p.r = 1;
    p.l = 0;
    p.C = {{Int(1)}};
    p.field = F();
    p.trunc = trunc;
    p.weights = WeightAssignment(B(), 1, {rank1({0, 1, 0}), rank1({0, 5, 0})});
    TruncatedSeries s2(2, F(), trunc);
    s2.add_term({Rat(3), Rat(0)}, F()->one());
    s2.add_term({Rat(3), Rat(1)}, F()->one());
    p.xseries.emplace(2, s2);
    return p;
}

// germ 2: x1 = y1^2, x2 = y1^3 (1 + y2), weight sqrt2 (y2 dependent)
PreparedPair germ2(Rat trunc = 8) {
    PreparedPair p;
    p.n = p.m = 2;
    p.s = p.r = 1;
    p.l = 0;
    p.C = {{Int(2)}};
    p.field = F();
    p.trunc = trunc;
    p.weights = WeightAssignment(B(), 1, {rank1({0, 1, 0}), rank1({0, 1, 0})});
    TruncatedSeries s2(2, F(), trunc);
    s2.add_term({Rat(3), Rat(0)}, F()->one());
    s2.add_term({Rat(3), Rat(1)}, F()->one());
    p.xseries.emplace(2, s2);
    return p;
}

TruncatedSeries ymono(const PreparedPair& p, std::initializer_list<Rat> es, long c = 1) {
    return TruncatedSeries::monomial(p.n, p.field, p.trunc, QVec(es),
                                     p.field->from_rat(Rat(c)));
}

TruncatedSeries xmono(const PreparedPair& p, std::initializer_list<Rat> es, long c = 1) {
    return TruncatedSeries::monomial(p.m, p.field, p.trunc, QVec(es),
                                     p.field->from_rat(Rat(c)));
}

} // namespace

TEST_CASE("monomialize x-scope: unit factor reads off") {
    PreparedPair p = germ1();
    TruncatedSeries g = xmono(p, {Rat(2), Rat(0)}) + xmono(p, {Rat(3), Rat(0)});
    auto res = monomialize_series(p, g, XScope{1});
    CHECK(!res.increased);
    CHECK(res.d == QVec{Rat(2), Rat(0)});
    TruncatedSeries expect_u =
        TruncatedSeries::constant(p.m, p.field, p.trunc, p.field->one()) +
        xmono(p, {Rat(1), Rat(0)});
    CHECK(res.unit.equals(expect_u));
    CHECK(res.pair.log.empty());
}

TEST_CASE("monomialize x-scope: principalization kicks in") {
    PreparedPair p;
    p.n = p.m = 2;
    p.s = p.r = 2;
    p.l = 0;
    p.C = {{Int(1), Int(0)}, {Int(0), Int(1)}};
    p.field = F();
    p.trunc = 12;
    p.weights = WeightAssignment(B(), 2, {rank1({0, 1, 0}), rank1({0, 0, 1})});
    TruncatedSeries g = xmono(p, {Rat(2), Rat(1)}) + xmono(p, {Rat(1), Rat(3)});
    auto res = monomialize_series(p, g, XScope{2});
    CHECK(!res.increased);
    CHECK(res.unit.is_unit());
    TruncatedSeries back =
        TruncatedSeries::monomial(p.m, res.pair.field, res.pair.trunc, res.d,
                                  res.pair.field->one()) * res.unit;
    CHECK(back.equals(res.transformed));
    CHECK(!res.pair.log.empty());
}

TEST_CASE("monomialize y-scope: worked example") {
    PreparedPair p;
    p.n = 2;
    p.m = 1;
    p.s = 2;
    p.r = 1;
    p.l = 0;
    p.C = {{Int(1), Int(1)}};
    p.field = F();
    p.trunc = 10;
    p.weights = WeightAssignment(B(), 2, {rank1({0, 1, 0}), rank1({0, 0, 1})});
    TruncatedSeries g = ymono(p, {Rat(2), Rat(1)}) + ymono(p, {Rat(1), Rat(2)});
    auto res = monomialize_series(p, g, YScope{2});
    CHECK(!res.increased);
    CHECK(res.d == QVec{Rat(3), Rat(1)});
    TruncatedSeries expect_u =
        TruncatedSeries::constant(p.n, res.pair.field, res.pair.trunc,
                                  res.pair.field->one()) +
        ymono(res.pair, {Rat(0), Rat(1)});
    CHECK(res.unit.equals(expect_u));
    REQUIRE(res.pair.log.size() == 1);
    CHECK(res.pair.log[0].type == 1);
    TruncatedSeries back =
        TruncatedSeries::monomial(p.n, res.pair.field, res.pair.trunc, res.d,
                                  res.pair.field->one()) * res.unit;
    CHECK(back.equals(res.transformed));
}

TEST_CASE("monomialize y-scope: already monomial times unit") {
    PreparedPair p = germ1();
    TruncatedSeries g = ymono(p, {Rat(3), Rat(0)}) + ymono(p, {Rat(3), Rat(1)});
    auto res = monomialize_series(p, g, YScope{2});
    CHECK(res.d == QVec{Rat(3), Rat(0)});
    CHECK(res.unit.is_unit());
    CHECK(res.pair.log.empty());
}

TEST_CASE("split_algebraic: pure algebraic and mixed inputs") {
    PreparedPair p;
    p.n = 2;
    p.m = 1;
    p.s = 2;
    p.r = 1;
    p.l = 0;
    p.C = {{Int(2), Int(3)}};
    p.field = F();
    p.trunc = 10;
    p.weights = WeightAssignment(B(), 2, {rank1({0, 1, 0}), rank1({0, 0, 1})});

    TruncatedSeries g0 = ymono(p, {Rat(2), Rat(3)});
    auto r0 = split_algebraic(p, g0, 2);
    CHECK(r0.tail == TailKind::Zero);
    CHECK(r0.algebraic_part.equals(g0));

    TruncatedSeries g = ymono(p, {Rat(2), Rat(3)}) + ymono(p, {Rat(1), Rat(1)});
    auto res = split_algebraic(p, g, 2);
    CHECK(!res.increased);
    CHECK(res.tail == TailKind::Monomial);
    CHECK(res.tail_monomial == QVec{Rat(1), Rat(1)});
    CHECK(is_algebraic(res.algebraic_part, res.pair));
    CHECK(res.algebraic_part.equals(ymono(res.pair, {Rat(2), Rat(3)})));
    CHECK(!is_algebraic(ymono(res.pair, {Rat(1), Rat(1)}), res.pair));
}

TEST_CASE("split_algebraic: Lemma 5 shape with order-one direction") {
    PreparedPair p = germ1();
    TruncatedSeries g = ymono(p, {Rat(3), Rat(1)}) + ymono(p, {Rat(3), Rat(2)});
    auto res = split_algebraic(p, g, 2);
    CHECK(!res.increased);
    CHECK(res.tail == TailKind::MonomialTimesVar);
    CHECK(res.tail_var == 2);
    CHECK(res.tail_monomial == QVec{Rat(3), Rat(0)});
    CHECK(res.algebraic_part.is_zero());
    bool has5 = false;
    for (const auto& t : res.pair.log) has5 |= (t.type == 5);
    CHECK(has5);
}

TEST_CASE("step: germ 1 increases the type in two records") {
    PreparedPair p = germ1();
    auto res = step(p);
    CHECK(res.progress == StepProgress::TypeIncreased);
    CHECK(res.pair.r + res.pair.l == 2);
    CHECK(res.pair.log.size() == 2);
    CHECK(res.pair.l == 1);
    CHECK(res.pair.s >= p.s);
    CHECK(res.pair.r >= p.r);
    CHECK(res.pair.r + res.pair.l > p.r + p.l);
}

TEST_CASE("step: germ 2 goes through the dependent-GMT branch") {
    PreparedPair p = germ2();
    auto res = step(p);
    CHECK(res.progress == StepProgress::TypeIncreased);
    bool has9 = false;
    for (const auto& t : res.pair.log) has9 |= (t.type == 9);
    CHECK(has9);
    CHECK(res.pair.r + res.pair.l == 2);
}

TEST_CASE("step: nothing to do at r+l = m") {
    PreparedPair p = germ1();
    p.l = 1;
    p.xseries.clear();
    p.validate();
    CHECK_THROWS_AS(step(p), EngineError);
    try {
        step(p);
    } catch (const EngineError& e) {
        CHECK(e.code() == ErrorCode::NotApplicable);
    }
}

TEST_CASE("run: germ 1 end to end with verification") {
    PreparedPair p = germ1();
    auto res = run(p);
    CHECK(res.pair.r + res.pair.l == 2);
    CHECK(res.form.entries.size() == 2);
    CHECK(res.form.certificate.size() == 2);
    CHECK(verify(p, res.form.certificate));
    CHECK(check_injectivity(res.pair, 4));
}

TEST_CASE("run: germ 2 end to end with verification") {
    PreparedPair p = germ2();
    auto res = run(p);
    CHECK(res.pair.r + res.pair.l == 2);
    CHECK(verify(p, res.form.certificate));
    CHECK(check_injectivity(res.pair, 4));
    bool has9 = false;
    for (const auto& t : res.form.certificate) has9 |= (t.type == 9);
    CHECK(has9);
}

TEST_CASE("run: already monomial pair yields an empty certificate") {
    PreparedPair p = germ1();
    p.l = 1;
    p.xseries.clear();
    auto res = run(p);
    CHECK(res.form.certificate.empty());
    CHECK(res.form.entries.size() == 2);
    CHECK(res.form.entries[1].identified);
}

TEST_CASE("check_injectivity") {
    PreparedPair p;
    p.n = p.m = 2;
    p.s = 2;
    p.r = 2;
    p.l = 0;
    p.C = {{Int(2), Int(1)}, {Int(1), Int(1)}};
    p.field = F();
    p.trunc = 16;
    p.weights = WeightAssignment(B(), 2, {rank1({0, 1, 0}), rank1({0, 0, 1})});
    CHECK(check_injectivity(p, 3));

    PreparedPair q;
    q.n = 1;
    q.m = 2;
    q.s = 1;
    q.r = 1;
    q.l = 0;
    q.C = {{Int(1)}};
    q.field = F();
    q.trunc = 8;
    q.weights = WeightAssignment(B(), 1, {rank1({0, 1, 0})});
    TruncatedSeries s2(1, F(), 8);
    s2.add_term({Rat(1)}, F()->one());
    q.xseries.emplace(2, s2);
    CHECK(!check_injectivity(q, 2));

    PreparedPair single;
    single.n = single.m = 1;
    single.s = single.r = 1;
    single.l = 0;
    single.C = {{Int(1)}};
    single.field = F();
    single.trunc = 8;
    single.weights = WeightAssignment(B(), 1, {rank1({0, 1, 0})});
    CHECK(check_injectivity(single, 3));
}

TEST_CASE("verify: negative controls") {
    PreparedPair p = germ1();
    auto res = run(p);
    REQUIRE(verify(p, res.form.certificate));

    auto corrupted = res.form.certificate;
    bool broke = false;
    for (auto& t : corrupted) {
        if (t.type == 9 && !t.xseq.empty()) {
            TransformSeq longer = t.xseq;
            longer.push({0, 1, 0});
            t.xseq = longer;
            broke = true;
            break;
        }
        if (t.type == 5 && !t.series.is_zero()) {
            t.series = t.series + TruncatedSeries::monomial(
                                      t.series.nvars(), t.series.field(),
                                      t.series.trunc(), QVec{Rat(1), Rat(0)},
                                      t.series.field()->one());
            broke = true;
            break;
        }
    }
    REQUIRE(broke);
    CHECK_THROWS_AS(verify(p, corrupted), VerifyFailed);
    try {
        verify(p, corrupted);
    } catch (const VerifyFailed& vf) {
        CHECK(vf.stage() == 1);
    }

    PreparedPair other = germ2();
    CHECK_THROWS_AS(verify(other, res.form.certificate), VerifyFailed);
}

TEST_CASE("run at trunc 1 reports truncation exhaustion") {
    PreparedPair p = germ1(1);
    CHECK_THROWS_AS(run(p), EngineError);
    try {
        run(p);
    } catch (const EngineError& e) {
        CHECK(e.code() == ErrorCode::TruncationExhausted);
    }
}

TEST_CASE("run: literal unit 1+y1 variant cannot be monomialized honestly") {
    PreparedPair p = germ2();
    TruncatedSeries s2(2, F(), 8);
    s2.add_term({Rat(3), Rat(0)}, F()->one());
    s2.add_term({Rat(4), Rat(0)}, F()->one());
    p.xseries.erase(2);
    p.xseries.emplace(2, s2);
    p.validate();
    CHECK_THROWS_AS(run(p), EngineError);
}
