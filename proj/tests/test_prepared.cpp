#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mono/prepared.hpp>
#include <mono/error.hpp>

#include <random>

using namespace mono;

namespace {

FieldPtr F() { return CycloField::make(4); }
SquarefreeBasis B() { return SquarefreeBasis(std::size_t(3)); }

GroupValue rank1(std::initializer_list<Rat> cs) {
    return GroupValue({IrrComb(QVec(cs))});
}

// n=2, m=2, s=1, r=1, l=1: x1 = y1, x2 = y2, weights (sqrt2, 3 sqrt2)
PreparedPair minimal_pair() {
    PreparedPair p;
    p.n = p.m = 2;
    p.s = p.r = p.l = 1;
    p.C = {{Int(1)}};
    p.field = F();
    p.trunc = 8;
    p.weights = WeightAssignment(B(), 1, {rank1({0, 1, 0}), rank1({0, 3, 0})});
    return p;
}

// s=2, r=1, l=0, C=[[2,3]], weights (sqrt2, sqrt3), m=1
PreparedPair class_pair() {
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
    return p;
}

// the first worked germ: x1 = y1, x2 = y1^3 + y1^3 y2, weights (sqrt2, 5 sqrt2)
PreparedPair germ1() {
    PreparedPair p;
    p.n = p.m = 2;
    p.s = p.r = 1;
    p.l = 0;
    p.C = {{Int(1)}};
    p.field = F();
    p.trunc = 8;
    p.weights = WeightAssignment(B(), 1, {rank1({0, 1, 0}), rank1({0, 5, 0})});
    TruncatedSeries s2(2, F(), 8);
    s2.add_term({Rat(3), Rat(0)}, F()->one());
    s2.add_term({Rat(3), Rat(1)}, F()->one());
    p.xseries.emplace(2, s2);
    return p;
}

TruncatedSeries mono2(const PreparedPair& p, Rat e1, Rat e2, long c = 1) {
    return TruncatedSeries::monomial(p.n, p.field, p.trunc, {e1, e2},
                                     p.field->from_rat(Rat(c)));
}

} // namespace

TEST_CASE("validate: minimal pair and failure clauses") {
    PreparedPair p = minimal_pair();
    auto [s, r, l] = p.validate();
    CHECK(s == 1);
    CHECK(r == 1);
    CHECK(l == 1);

    PreparedPair bad_rank = minimal_pair();
    bad_rank.n = bad_rank.m = 3;
    bad_rank.s = 2;
    bad_rank.r = 2;
    bad_rank.l = 0;
    bad_rank.C = {{Int(1), Int(0)}, {Int(1), Int(0)}};
    bad_rank.weights =
        WeightAssignment(B(), 2, {rank1({0, 1, 0}), rank1({0, 0, 1}), rank1({0, 2, 0})});
    TruncatedSeries s3(3, F(), 8);
    s3.add_term({Rat(1), Rat(0), Rat(0)}, F()->one());
    bad_rank.xseries.emplace(3, s3);
    CHECK_THROWS_WITH_AS(bad_rank.validate(), doctest::Contains("rank"), EngineError);

    PreparedPair bad_dep = minimal_pair();
    bad_dep.weights = WeightAssignment(B(), 1, {rank1({0, 1, 0}), rank1({0, 0, 1})});
    CHECK_THROWS_AS(bad_dep.validate(), EngineError);
}

TEST_CASE("decompose: classes modulo the saturated lattice") {
    PreparedPair p = class_pair();
    p.validate();
    TruncatedSeries g = mono2(p, 2, 3) + mono2(p, 4, 6) + mono2(p, 1, 1);
    auto dec = decompose(g, p);
    REQUIRE(dec.components.size() == 2);
    IVec zero{Int(0), Int(0)};
    const TruncatedSeries* h0 = dec.component(zero);
    REQUIRE(h0);
    CHECK(h0->equals(mono2(p, 2, 3) + mono2(p, 4, 6)));
    IVec k11{Int(1), Int(1)};
    const TruncatedSeries* h11 = dec.component(k11);
    REQUIRE(h11);
    CHECK(h11->equals(mono2(p, 1, 1)));
    TruncatedSeries sum = *h0 + *h11;
    CHECK(sum.equals(g));

    auto empty = decompose(TruncatedSeries::zero(p.n, p.field, p.trunc), p);
    CHECK(empty.components.empty());
    auto single = decompose(mono2(p, 2, 3), p);
    CHECK(single.components.size() == 1);
}

TEST_CASE("is_algebraic") {
    PreparedPair p = class_pair();
    CHECK(is_algebraic(mono2(p, 2, 3), p));
    CHECK(!is_algebraic(mono2(p, 1, 1), p));
    CHECK(is_algebraic(TruncatedSeries::constant(p.n, p.field, p.trunc, p.field->one()), p));
    TruncatedSeries g = mono2(p, 2, 3) + mono2(p, 1, 1);
    auto dec = decompose(g, p);
    CHECK(!is_algebraic(g, p));
    CHECK(is_algebraic(*dec.component(IVec{Int(0), Int(0)}), p));
}

TEST_CASE("apply type 10: subtract an x-polynomial") {
    PreparedPair p = germ1();
    Transformation t;
    t.type = 10;
    t.mbar = 1;
    t.series = TruncatedSeries::monomial(p.m, p.field, p.trunc, {Rat(3), Rat(0)},
                                         p.field->one());
    PreparedPair q = apply(p, t);
    TruncatedSeries expect = mono2(p, 3, 1);
    CHECK(q.xseries.at(2).equals(expect));
    CHECK(q.log.size() == 1);
    CHECK(q.log.back().post_l == 0);
}

TEST_CASE("apply type 1 identity only logs") {
    PreparedPair p = germ1();
    Transformation t;
    t.type = 1;
    t.yseq = TransformSeq(1);
    PreparedPair q = apply(p, t);
    CHECK(q.C == p.C);
    CHECK(q.xseries.at(2).equals(p.xseries.at(2)));
    CHECK(q.log.size() == 1);
}

TEST_CASE("apply type 7 relabels series variables") {
    PreparedPair p;
    p.n = 3;
    p.m = 2;
    p.s = 1;
    p.r = 1;
    p.l = 0;
    p.C = {{Int(1)}};
    p.field = F();
    p.trunc = 8;
    p.weights = WeightAssignment(
        B(), 1, {rank1({0, 1, 0}), rank1({0, 3, 0}), rank1({0, 5, 0})});
    TruncatedSeries s2(3, F(), 8);
    s2.add_term({Rat(0), Rat(1), Rat(0)}, F()->one());
    s2.add_term({Rat(0), Rat(0), Rat(2)}, F()->one());
    p.xseries.emplace(2, s2);
    Transformation t;
    t.type = 7;
    t.swap_i = 2;
    t.swap_j = 3;
    PreparedPair q = apply(p, t);
    TruncatedSeries expect(3, F(), 8);
    expect.add_term({Rat(0), Rat(0), Rat(1)}, F()->one());
    expect.add_term({Rat(0), Rat(2), Rat(0)}, F()->one());
    CHECK(q.xseries.at(2).equals(expect));
    CHECK(q.weights.weight(1) == rank1({0, 5, 0}));
    CHECK(q.weights.weight(2) == rank1({0, 3, 0}));
}

TEST_CASE("apply type 1: genuine blow-up rewrites everything") {
    PreparedPair p;
    p.n = 2;
    p.m = 2;
    p.s = 2;
    p.r = 1;
    p.l = 0;
    p.C = {{Int(1), Int(1)}};
    p.field = F();
    p.trunc = 8;
    p.weights = WeightAssignment(B(), 2, {rank1({0, 1, 0}), rank1({0, 0, 1})});
    TruncatedSeries s2(2, F(), 8);
    s2.add_term({Rat(2), Rat(1)}, F()->one());
    p.xseries.emplace(2, s2);

    Transformation t;
    t.type = 1;
    TransformSeq seq(2);
    seq.push({0, 1, 0});   // chart y1: y2_old = y1 y2
    t.yseq = seq;
    PreparedPair q = apply(p, t);
    CHECK(q.C == IMat{{Int(2), Int(1)}});
    CHECK(q.weights.weight(1) == rank1({0, -1, 1}));
    TruncatedSeries expect(2, F(), 8);
    expect.add_term({Rat(3), Rat(1)}, F()->one());
    CHECK(q.xseries.at(2).equals(expect));
}

TEST_CASE("apply type 8 strips a declared unit") {
    PreparedPair p = class_pair();
    p.trunc = 6;
    TruncatedSeries u =
        TruncatedSeries::constant(p.n, p.field, p.trunc, p.field->one()) + mono2(p, 0, 1);
    Transformation t;
    t.type = 8;
    t.exps = {Rat(-3), Rat(2)};
    t.series = u;
    PreparedPair q = apply(p, t);
    TruncatedSeries tail = mono2(p, 1, 1) * u;
    Substitution sub = y_rewrite(p, q.log.back());
    CHECK(substitute(tail, sub).equals(mono2(p, 1, 1)));
    TruncatedSeries x1 = mono2(p, 2, 3);
    CHECK(substitute(x1, sub).equals(x1));
}

TEST_CASE("lift type 2: identity lift") {
    PreparedPair p = class_pair();
    GmtData gmt;
    gmt.xseq = TransformSeq(1);
    Transformation t = lift_gmt(p, gmt);
    CHECK(t.type == 2);
    CHECK(t.xseq.empty());
    CHECK(t.yseq.empty());
    PreparedPair q = apply(p, t);
    CHECK(q.C == p.C);
}

TEST_CASE("lift type 9 on the dependent-unit germ") {
    PreparedPair p;
    p.n = p.m = 2;
    p.s = p.r = 1;
    p.l = 0;
    p.C = {{Int(2)}};
    p.field = F();
    p.trunc = 8;
    p.weights = WeightAssignment(B(), 1, {rank1({0, 1, 0}), rank1({0, 1, 0})});
    TruncatedSeries s2(2, F(), 8);
    s2.add_term({Rat(3), Rat(0)}, F()->one());
    s2.add_term({Rat(3), Rat(1)}, F()->one());
    p.xseries.emplace(2, s2);
    p.validate();

    std::vector<GroupValue> w{p.x_value(1), rank1({0, 3, 0})};
    auto pr = perron(w, {Rat(3, 2)}, B());
    CHECK(imat_det(pr.seq.matrix()) == 1);
    GmtData gmt;
    gmt.target = 2;
    gmt.xseq = pr.seq;
    Transformation t = lift_gmt(p, gmt);
    CHECK(t.type == 9);
    PreparedPair q = apply(p, t);
    CHECK(q.C == IMat{{Int(1)}});
    TruncatedSeries expect(2, F(), 8);
    expect.add_term({Rat(0), Rat(1)}, F()->one());
    CHECK(q.xseries.at(2).equals(expect));
}

TEST_CASE("lift type 4 on an identified variable") {
    PreparedPair p = minimal_pair();
    std::vector<GroupValue> w{p.x_value(1), p.x_value(2)};
    auto pr = perron(w, {Rat(3)}, B());
    GmtData gmt;
    gmt.target = 2;
    gmt.xseq = pr.seq;
    gmt.alpha = F()->one();
    gmt.has_alpha = true;
    gmt.new_weight = rank1({0, 1, 0});
    gmt.has_new_weight = true;
    Transformation t = lift_gmt(p, gmt);
    CHECK(t.type == 4);
    CHECK(t.yvec == QVec{Rat(3)});
    PreparedPair q = apply(p, t);
    CHECK(q.s == 1);
    CHECK(q.r == 1);
    CHECK(q.l == 1);
    CHECK(q.log.back().weight_flagged);
}

TEST_CASE("normalize_gmt") {
    auto f = F();
    auto b = B();
    {
        RawGmt raw;
        raw.matrix = {{Int(1), Int(0)}, {Int(3), Int(1)}};
        raw.alphas = {f->zero(), f->one()};
        std::vector<GroupValue> values{rank1({0, 1, 0}), rank1({0, 3, 0})};
        auto nf = normalize_gmt(values, raw, f, b);
        CHECK(nf.bmat == QMat{{Rat(1)}});
        CHECK(nf.bvec == QVec{Rat(3)});
        CHECK(nf.lambda == 1);
        CHECK(nf.alpha == f->one());
        CHECK(nf.perm == std::vector<std::size_t>{0, 1});
    }
    {
        // translated column in the middle: x1 = xb1, x2 = (xb2+2) xb3,
        // x3 = (xb2+2); values (sqrt2, sqrt3, 0)
        RawGmt raw;
        raw.matrix = {{Int(1), Int(0), Int(0)},
                      {Int(0), Int(1), Int(1)},
                      {Int(0), Int(1), Int(0)}};
        raw.alphas = {f->zero(), f->from_rat(Rat(2)), f->zero()};
        std::vector<GroupValue> values{rank1({0, 1, 0}), rank1({0, 0, 1}),
                                       rank1({0, 0, 0})};
        auto nf = normalize_gmt(values, raw, f, b);
        CHECK(nf.perm == std::vector<std::size_t>{0, 2, 1});
        CHECK(nf.lambda == 1);
        CHECK(nf.alpha == f->from_rat(Rat(2)));
    }
    {
        // lambda-power adjustment: x1 = xb1^2 (xb2+4), x2 = xb1^3 (xb2+4)^2,
        // values (2 sqrt2, 3 sqrt2); lambda = 1/2 and alpha = 4^(1/2) = 2
        RawGmt raw;
        raw.matrix = {{Int(2), Int(1)}, {Int(3), Int(2)}};
        raw.alphas = {f->zero(), f->from_rat(Rat(4))};
        std::vector<GroupValue> values{rank1({0, 2, 0}), rank1({0, 3, 0})};
        auto nf = normalize_gmt(values, raw, f, b);
        CHECK(nf.lambda == Rat(1, 2));
        CHECK(nf.alpha == f->from_rat(Rat(2)));
        CHECK(nf.bmat == QMat{{Rat(2)}});
        CHECK(nf.bvec == QVec{Rat(3)});
    }
    {
        RawGmt raw;
        raw.matrix = {{Int(1), Int(0)}, {Int(1), Int(1)}};
        raw.alphas = {f->zero(), f->zero()};
        std::vector<GroupValue> values{rank1({0, 1, 0}), rank1({0, 2, 0})};
        CHECK_THROWS_AS(normalize_gmt(values, raw, f, b), EngineError);
    }
}

TEST_CASE("decomposition invariance under type 1 (Lemma 7)") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> coeff(-3, 3), expo(0, 4), pickvar(0, 1);
    for (int trial = 0; trial < 40; ++trial) {
        PreparedPair p = class_pair();
        TruncatedSeries g(p.n, p.field, p.trunc);
        for (int t = 0; t < 5; ++t)
            g.add_term({Rat(expo(rng)), Rat(expo(rng))},
                       p.field->from_rat(Rat(coeff(rng))));
        if (g.is_zero()) continue;
        auto dec = decompose(g, p);

        Transformation t;
        t.type = 1;
        TransformSeq seq(2);
        std::vector<GroupValue> cur = {p.weights.weight(0), p.weights.weight(1)};
        for (int k = 0; k < 3; ++k) {
            std::size_t i = pickvar(rng), j = 1 - i;
            auto ord = compare(cur[i], cur[j], B());
            std::size_t chart = (ord == Ordering::Less) ? i : j;
            seq.push({i, j, chart});
            std::size_t divided = chart == i ? j : i;
            cur[divided] = cur[divided] - cur[chart];
        }
        t.yseq = seq;
        PreparedPair q = apply(p, t);
        Substitution sub = y_rewrite(p, q.log.back());
        TruncatedSeries g2 = substitute(g, sub);
        auto dec2 = decompose(g2, q);

        IMat bmat = seq.matrix();
        for (const auto& [key, comp] : dec.components) {
            IVec moved(p.s, Int(0));
            for (std::size_t c = 0; c < p.s; ++c)
                for (std::size_t k2 = 0; k2 < p.s; ++k2)
                    moved[c] += key[k2] * bmat[k2][c];
            IVec key2 = hnf_reduce(dec2.lattice, moved);
            const TruncatedSeries* comp2 = dec2.component(key2);
            TruncatedSeries image = substitute(comp, sub);
            if (!comp2) {
                // the whole class climbed past the truncation bound
                CHECK(image.is_zero());
                continue;
            }
            CHECK(image.equals(*comp2));
        }
        if (!g2.is_zero())
            CHECK(is_algebraic(g, p) == is_algebraic(g2, q));
    }
}
