#include <mono/io.hpp>
#include <mono/error.hpp>

#include <cstdlib>
#include <sstream>

namespace mono {

Json rat_json(const Rat& r) { return rat_to_string(r); }

Rat rat_from_json(const Json& j) {
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    throw error(ErrorCode::Internal, "expected a rational as \"p/q\" string");
}

Json value_to_json(const GroupValue& v) {
    Json levels = Json::array();
    for (const auto& lev : v.levels()) {
        Json coords = Json::array();
        for (const auto& c : lev.coords()) coords.push_back(rat_json(c));
        levels.push_back(coords);
    }
    return levels;
}

GroupValue value_from_json(const Json& j, const IoContext& ctx) {
    if (!j.is_array())
        throw error(ErrorCode::Internal, "group value must be [level][coordinate] arrays");
    std::vector<IrrComb> levels;
    for (const auto& lev : j) {
        QVec coords;
        for (const auto& c : lev) coords.push_back(rat_from_json(c));
        if (coords.size() != ctx.basis.size())
            throw error(ErrorCode::Internal, "level coordinate count differs from basis size");
        levels.push_back(IrrComb(std::move(coords)));
    }
    if (levels.size() != ctx.rank)
        throw error(ErrorCode::Internal, "level count differs from declared rank");
    return GroupValue(std::move(levels));
}

Json series_to_json(const TruncatedSeries& s) {
    Json terms = Json::array();
    for (const auto& [e, c] : s.terms()) {
        Json term;
        Json expo = Json::array();
        for (const auto& x : e) expo.push_back(rat_json(x));
        Json coeff = Json::array();
        for (const auto& x : c.c) coeff.push_back(rat_json(x));
        term["exponent"] = expo;
        term["coefficient"] = coeff;
        terms.push_back(term);
    }
    return terms;
}

TruncatedSeries series_from_json(const Json& j, std::size_t nvars, const IoContext& ctx) {
    TruncatedSeries s(nvars, ctx.field, ctx.trunc);
    for (const auto& term : j) {
        QVec e;
        for (const auto& x : term.at("exponent")) e.push_back(rat_from_json(x));
        if (e.size() != nvars)
            throw error(ErrorCode::Internal, "term exponent arity mismatch");
        QVec cc;
        for (const auto& x : term.at("coefficient")) cc.push_back(rat_from_json(x));
        if (cc.size() > ctx.field->degree())
            throw error(ErrorCode::Internal, "coefficient vector exceeds field degree");
        cc.resize(ctx.field->degree(), Rat(0));
        s.add_term(e, FieldElem{cc});
    }
    return s;
}

Json seq_to_json(const TransformSeq& s) {
    Json out;
    out["nvars"] = s.nvars();
    Json steps = Json::array();
    for (const auto& b : s.steps()) {
        Json step;
        step["i"] = b.i + 1;
        step["j"] = b.j + 1;
        step["chart"] = b.chart + 1;
        steps.push_back(step);
    }
    out["steps"] = steps;
    return out;
}

TransformSeq seq_from_json(const Json& j) {
    TransformSeq s(j.at("nvars").get<std::size_t>());
    for (const auto& step : j.at("steps")) {
        ElementaryBlowup b;
        b.i = step.at("i").get<std::size_t>() - 1;
        b.j = step.at("j").get<std::size_t>() - 1;
        b.chart = step.at("chart").get<std::size_t>() - 1;
        s.push(b);
    }
    return s;
}

namespace {

Json qvec_json(const QVec& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(rat_json(x));
    return out;
}

QVec qvec_from_json(const Json& j) {
    QVec v;
    for (const auto& x : j) v.push_back(rat_from_json(x));
    return v;
}

Json qmat_json(const QMat& m) {
    Json out = Json::array();
    for (const auto& row : m) out.push_back(qvec_json(row));
    return out;
}

QMat qmat_from_json(const Json& j) {
    QMat m;
    for (const auto& row : j) m.push_back(qvec_from_json(row));
    return m;
}

} // namespace

Json transformation_to_json(const Transformation& t) {
    Json out;
    out["type"] = t.type;
    if (t.mbar) out["mbar"] = t.mbar;
    if (!t.xseq.empty() || t.xseq.nvars()) out["xseq"] = seq_to_json(t.xseq);
    if (!t.yseq.empty() || t.yseq.nvars()) out["yseq"] = seq_to_json(t.yseq);
    if (!t.series.is_zero() || t.series.nvars()) {
        out["series_nvars"] = t.series.nvars();
        out["series"] = series_to_json(t.series);
    }
    if (!t.exps.empty()) out["exps"] = qvec_json(t.exps);
    if (!t.ymat.empty()) out["ymat"] = qmat_json(t.ymat);
    if (!t.yvec.empty()) out["yvec"] = qvec_json(t.yvec);
    if (!t.alpha.c.empty()) out["alpha"] = qvec_json(t.alpha.c);
    if (t.lambda_exp != 1) out["lambda"] = rat_json(t.lambda_exp);
    if (t.type == 7) out["swap"] = Json::array({t.swap_i, t.swap_j});
    if (t.has_new_weight) {
        out["new_weight"] = value_to_json(t.new_weight);
        out["weight_flagged"] = t.weight_flagged;
    }
    if (t.promote_l) out["promote_l"] = true;
    if (t.promote_r) out["promote_r"] = true;
    if (t.post_s >= 0) out["post"] = Json::array({t.post_s, t.post_r, t.post_l});
    return out;
}

Transformation transformation_from_json(const Json& j, const IoContext& ctx) {
    Transformation t;
    t.type = j.at("type").get<int>();
    if (j.contains("mbar")) t.mbar = j.at("mbar").get<std::size_t>();
    if (j.contains("xseq")) t.xseq = seq_from_json(j.at("xseq"));
    if (j.contains("yseq")) t.yseq = seq_from_json(j.at("yseq"));
    if (j.contains("series"))
        t.series = series_from_json(j.at("series"),
                                    j.at("series_nvars").get<std::size_t>(), ctx);
    if (j.contains("exps")) t.exps = qvec_from_json(j.at("exps"));
    if (j.contains("ymat")) t.ymat = qmat_from_json(j.at("ymat"));
    if (j.contains("yvec")) t.yvec = qvec_from_json(j.at("yvec"));
    if (j.contains("alpha")) {
        QVec v = qvec_from_json(j.at("alpha"));
        v.resize(ctx.field->degree(), Rat(0));
        t.alpha = FieldElem{v};
    } else {
        t.alpha = ctx.field->zero();
    }
    if (j.contains("lambda")) t.lambda_exp = rat_from_json(j.at("lambda"));
    if (j.contains("swap")) {
        t.swap_i = j.at("swap")[0].get<std::size_t>();
        t.swap_j = j.at("swap")[1].get<std::size_t>();
    }
    if (j.contains("new_weight")) {
        t.new_weight = value_from_json(j.at("new_weight"), ctx);
        t.has_new_weight = true;
        t.weight_flagged = j.value("weight_flagged", false);
    }
    t.promote_l = j.value("promote_l", false);
    t.promote_r = j.value("promote_r", false);
    if (j.contains("post")) {
        t.post_s = j.at("post")[0].get<long>();
        t.post_r = j.at("post")[1].get<long>();
        t.post_l = j.at("post")[2].get<long>();
    }
    return t;
}

IoContext context_from_json(const Json& doc) {
    IoContext ctx;
    long modulus = 4;
    if (doc.contains("field")) modulus = doc.at("field").value("modulus", 4);
    ctx.field = CycloField::make(modulus);
    ctx.trunc = doc.contains("trunc") ? rat_from_json(doc.at("trunc")) : Rat(8);
    if (doc.contains("basis")) {
        std::vector<long> entries;
        for (const auto& x : doc.at("basis")) entries.push_back(x.get<long>());
        ctx.basis = SquarefreeBasis(std::move(entries));
    } else if (const char* env = std::getenv("MONOMIALIZE_BASIS")) {
        std::vector<long> entries;
        std::stringstream ss(env);
        std::string tok;
        while (std::getline(ss, tok, ',')) entries.push_back(std::stol(tok));
        ctx.basis = SquarefreeBasis(std::move(entries));
    } else {
        ctx.basis = SquarefreeBasis(std::size_t(3));
    }
    ctx.rank = doc.value("rank", 1);
    return ctx;
}

Json pair_to_json(const PreparedPair& p) {
    Json out;
    out["schema"] = 1;
    out["field"] = Json{{"modulus", p.field->modulus()}};
    out["trunc"] = rat_json(p.trunc);
    Json basis = Json::array();
    for (auto e : p.weights.basis().entries()) basis.push_back(e);
    out["basis"] = basis;
    out["rank"] = p.weights.weight(0).rank();
    out["n"] = p.n;
    out["m"] = p.m;
    out["s"] = p.s;
    out["r"] = p.r;
    out["l"] = p.l;
    Json c = Json::array();
    for (const auto& row : p.C) {
        Json jr = Json::array();
        for (const auto& x : row) jr.push_back((long long)x);
        c.push_back(jr);
    }
    out["C"] = c;
    Json w = Json::array();
    for (const auto& wv : p.weights.weights()) w.push_back(value_to_json(wv));
    out["weights"] = w;
    Json xs;
    for (const auto& [i, ser] : p.xseries) xs[std::to_string(i)] = series_to_json(ser);
    out["xseries"] = xs.is_null() ? Json::object() : xs;
    return out;
}

PreparedPair pair_from_json(const Json& j) {
    IoContext ctx = context_from_json(j);
    PreparedPair p;
    p.field = ctx.field;
    p.trunc = ctx.trunc;
    p.n = j.at("n").get<std::size_t>();
    p.m = j.at("m").get<std::size_t>();
    p.s = j.at("s").get<std::size_t>();
    p.r = j.at("r").get<std::size_t>();
    p.l = j.at("l").get<std::size_t>();
    for (const auto& row : j.at("C")) {
        IVec r;
        for (const auto& x : row) r.push_back(Int(x.get<long long>()));
        p.C.push_back(r);
    }
    if (!j.contains("weights"))
        throw error(ErrorCode::InvalidPreparedForm, "schema: missing weights");
    std::vector<GroupValue> ws;
    for (const auto& wv : j.at("weights")) ws.push_back(value_from_json(wv, ctx));
    p.weights = WeightAssignment(ctx.basis, p.s, std::move(ws));
    if (j.contains("xseries"))
        for (const auto& [key, ser] : j.at("xseries").items())
            p.xseries.emplace(std::stoul(key), series_from_json(ser, p.n, ctx));
    return p;
}

Json certificate_to_json(const PreparedPair& p0, const std::vector<Transformation>& cert) {
    Json out;
    out["schema"] = 1;
    out["field"] = Json{{"modulus", p0.field->modulus()}};
    out["trunc"] = rat_json(p0.trunc);
    Json basis = Json::array();
    for (auto e : p0.weights.basis().entries()) basis.push_back(e);
    out["basis"] = basis;
    out["rank"] = p0.weights.weight(0).rank();
    Json ts = Json::array();
    for (const auto& t : cert) ts.push_back(transformation_to_json(t));
    out["transformations"] = ts;
    return out;
}

std::vector<Transformation> certificate_from_json(const Json& j, const IoContext& ctx) {
    std::vector<Transformation> out;
    for (const auto& t : j.at("transformations"))
        out.push_back(transformation_from_json(t, ctx));
    return out;
}

Json form_to_json(const MonomialForm& f) {
    Json out;
    out["type"] = Json::array({f.s, f.r, f.l});
    Json entries = Json::array();
    for (const auto& e : f.entries) {
        Json ent;
        if (e.identified) {
            ent["identified"] = e.yindex;
        } else {
            ent["monomial"] = qvec_json(e.exponents);
            ent["coefficient"] = qvec_json(e.coefficient.c);
        }
        entries.push_back(ent);
    }
    out["entries"] = entries;
    return out;
}

std::string certificate_to_dot(const PreparedPair& p0, const std::vector<Transformation>& cert) {
    std::ostringstream os;
    os << "digraph blowups {\n  rankdir=LR;\n";
    os << "  n0 [label=\"(" << p0.s << "," << p0.r << "," << p0.l << ")\"];\n";
    for (std::size_t k = 0; k < cert.size(); ++k) {
        const Transformation& t = cert[k];
        std::ostringstream lab;
        lab << "type " << t.type;
        auto add_steps = [&lab](const char* side, const TransformSeq& seq) {
            if (seq.empty()) return;
            lab << " " << side << ":";
            for (const auto& b : seq.steps())
                lab << " (" << b.i + 1 << "," << b.j + 1 << ")";
        };
        add_steps("x", t.xseq);
        add_steps("y", t.yseq);
        os << "  n" << (k + 1) << " [label=\"(" << t.post_s << "," << t.post_r << ","
           << t.post_l << ")\"];\n";
        os << "  n" << k << " -> n" << (k + 1) << " [label=\"" << lab.str() << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

std::string seq_to_dot(const TransformSeq& seq, const std::vector<GroupValue>& initial,
                       const SquarefreeBasis& basis) {
    (void)basis;
    std::ostringstream os;
    os << "digraph blowups {\n  rankdir=LR;\n";
    std::vector<GroupValue> w = initial;
    auto label = [&](const std::vector<GroupValue>& vals) {
        std::ostringstream lab;
        lab << "[";
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) lab << "; ";
            bool first = true;
            for (const auto& lev : vals[i].levels()) {
                if (!first) lab << "|";
                first = false;
                bool f2 = true;
                for (const auto& c : lev.coords()) {
                    if (!f2) lab << ",";
                    f2 = false;
                    lab << rat_to_string(c);
                }
            }
        }
        lab << "]";
        return lab.str();
    };
    os << "  n0 [label=\"" << label(w) << "\"];\n";
    std::size_t k = 0;
    for (const auto& b : seq.steps()) {
        std::size_t divided = (b.chart == b.i) ? b.j : b.i;
        w[divided] = w[divided] - w[b.chart];
        ++k;
        os << "  n" << k << " [label=\"" << label(w) << "\"];\n";
        os << "  n" << (k - 1) << " -> n" << k << " [label=\"(" << b.i + 1 << ","
           << b.j + 1 << ") chart " << b.chart + 1 << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace mono
