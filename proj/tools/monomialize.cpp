#include <mono/driver.hpp>
#include <mono/error.hpp>
#include <mono/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace mono;

namespace {

int exit_code_for(const EngineError& e) {
    switch (e.code()) {
    case ErrorCode::InvalidPreparedForm:
    case ErrorCode::NotIndependent:
    case ErrorCode::NotDependent:
    case ErrorCode::RankDeficient:
    case ErrorCode::RankMismatch:
    case ErrorCode::InvalidTransformation:
    case ErrorCode::NotRepresentable:
    case ErrorCode::InvalidOrder:
    case ErrorCode::NotApplicable:
    case ErrorCode::NotAUnit:
        return 2;
    case ErrorCode::TruncationExhausted:
        return 3;
    case ErrorCode::FieldExtensionRequired:
        return 4;
    case ErrorCode::IterationLimit:
    case ErrorCode::InstanceTooLarge:
        return 5;
    case ErrorCode::VerifyFailed:
        return 6;
    default:
        return 1;
    }
}

Json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

std::string describe(const Transformation& t) {
    std::ostringstream os;
    os << "type " << t.type;
    if (t.mbar) os << " mbar=" << t.mbar;
    if (!t.xseq.empty()) os << " |x-blowups|=" << t.xseq.size();
    if (!t.yseq.empty()) os << " |y-blowups|=" << t.yseq.size();
    if (t.promote_l) os << " promote-l";
    if (t.promote_r) os << " promote-r";
    os << " -> (" << t.post_s << "," << t.post_r << "," << t.post_l << ")";
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"local monomialization of prepared analytic germs along a monomial valuation"};
    app.require_subcommand(1);

    std::string path, out_path, emit_format = "json", cert_path;
    std::string trunc_override;
    long max_steps = 0;
    long inj_bound = 4;
    std::size_t op_var = 1;
    long op_t = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("file", path, "problem document")->required();
        cmd->add_option("--out", out_path, "output path (default stdout)");
        cmd->add_option("--emit", emit_format, "output format: json, text or dot");
        cmd->add_option("--trunc", trunc_override, "override the truncation bound");
    };

    auto* c_validate = app.add_subcommand("validate", "check the prepared form");
    add_common(c_validate);

    auto* c_run = app.add_subcommand("run", "monomialize and emit the certificate");
    add_common(c_run);
    c_run->add_option("--max-steps", max_steps, "outer step budget");
    c_run->add_flag("--check-injectivity", "also run the injectivity check");
    c_run->add_option("--injectivity-bound", inj_bound, "degree bound for the check");

    auto* c_verify = app.add_subcommand("verify", "replay a certificate");
    add_common(c_verify);
    c_verify->add_option("certificate", cert_path, "certificate document")->required();

    auto* c_decompose = app.add_subcommand("decompose", "class decomposition of a series");
    add_common(c_decompose);

    auto* c_perron = app.add_subcommand("perron", "Euclidean reduction of a dependent value");
    add_common(c_perron);

    auto* c_principalize = app.add_subcommand("principalize", "principalize a monomial ideal");
    add_common(c_principalize);

    auto* c_tsch = app.add_subcommand("tschirnhaus", "kill the subleading coefficient");
    add_common(c_tsch);
    c_tsch->add_option("--var", op_var, "distinguished variable (1-based)");
    c_tsch->add_option("--t", op_t, "distinguished order");

    CLI11_PARSE(app, argc, argv);

    try {
        Json doc = load(path);
        if (!trunc_override.empty()) doc["trunc"] = trunc_override;

        if (c_validate->parsed()) {
            PreparedPair p = pair_from_json(doc);
            auto [s, r, l] = p.validate();
            std::ostringstream os;
            os << "(" << s << "," << r << "," << l << ")";
            emit(out_path, os.str());
            return 0;
        }

        if (c_run->parsed()) {
            PreparedPair p = pair_from_json(doc);
            p.validate();
            RunResult res = run(p, max_steps);
            if (emit_format == "text") {
                std::ostringstream os;
                for (const auto& t : res.form.certificate) os << describe(t) << "\n";
                os << "final type (" << res.pair.s << "," << res.pair.r << ","
                   << res.pair.l << "), " << res.form.entries.size()
                   << " monomialized coordinates\n";
                emit(out_path, os.str());
            } else if (emit_format == "dot") {
                emit(out_path, certificate_to_dot(p, res.form.certificate));
            } else {
                Json out = certificate_to_json(p, res.form.certificate);
                out["monomial_form"] = form_to_json(res.form);
                if (c_run->count("--check-injectivity"))
                    out["injective"] = check_injectivity(res.pair, inj_bound);
                emit(out_path, out.dump(2));
            }
            return 0;
        }

        if (c_verify->parsed()) {
            PreparedPair p = pair_from_json(doc);
            Json cj = load(cert_path);
            IoContext ctx = context_from_json(cj);
            auto cert = certificate_from_json(cj, ctx);
            try {
                verify(p, cert);
            } catch (const VerifyFailed& vf) {
                std::cerr << "verify failed at stage " << vf.stage() << ": " << vf.what()
                          << "\n";
                return 6;
            }
            emit(out_path, "certificate verified");
            return 0;
        }

        if (c_decompose->parsed()) {
            PreparedPair p = pair_from_json(doc);
            p.validate();
            IoContext ctx = context_from_json(doc);
            TruncatedSeries g = series_from_json(doc.at("series"), p.n, ctx);
            auto dec = decompose(g, p);
            Json out;
            Json comps = Json::array();
            for (const auto& [key, comp] : dec.components) {
                Json entry;
                Json k = Json::array();
                for (const auto& x : key) k.push_back((long long)x);
                entry["class"] = k;
                entry["component"] = series_to_json(comp);
                comps.push_back(entry);
            }
            out["components"] = comps;
            out["algebraic"] = is_algebraic(g, p);
            emit(out_path, out.dump(2));
            return 0;
        }

        if (c_perron->parsed()) {
            IoContext ctx = context_from_json(doc);
            std::vector<GroupValue> values;
            for (const auto& v : doc.at("values")) values.push_back(value_from_json(v, ctx));
            QVec dep;
            for (const auto& x : doc.at("dependence")) dep.push_back(rat_from_json(x));
            auto res = perron(values, dep, ctx.basis);
            if (emit_format == "dot") {
                emit(out_path, seq_to_dot(res.seq, values, ctx.basis));
                return 0;
            }
            Json out;
            out["seq"] = seq_to_json(res.seq);
            Json mat = Json::array();
            for (const auto& row : res.seq.matrix()) {
                Json jr = Json::array();
                for (const auto& x : row) jr.push_back((long long)x);
                mat.push_back(jr);
            }
            out["matrix"] = mat;
            Json finals = Json::array();
            for (const auto& v : res.final_values) finals.push_back(value_to_json(v));
            out["final_values"] = finals;
            emit(out_path, out.dump(2));
            return 0;
        }

        if (c_principalize->parsed()) {
            IoContext ctx = context_from_json(doc);
            std::vector<GroupValue> weights;
            for (const auto& v : doc.at("weights")) weights.push_back(value_from_json(v, ctx));
            std::vector<QVec> gens;
            for (const auto& g : doc.at("generators")) {
                QVec e;
                for (const auto& x : g) e.push_back(rat_from_json(x));
                gens.push_back(e);
            }
            MonomialIdeal ideal(weights.size(), gens);
            auto res = principalize(ideal, weights, ctx.basis);
            if (emit_format == "dot") {
                emit(out_path, seq_to_dot(res.seq, weights, ctx.basis));
                return 0;
            }
            Json out;
            out["seq"] = seq_to_json(res.seq);
            Json g = Json::array();
            for (const auto& x : res.gen) g.push_back(rat_to_string(x));
            out["generator"] = g;
            emit(out_path, out.dump(2));
            return 0;
        }

        if (c_tsch->parsed()) {
            IoContext ctx = context_from_json(doc);
            std::size_t nvars = doc.at("nvars").get<std::size_t>();
            TruncatedSeries f = series_from_json(doc.at("series"), nvars, ctx);
            if (doc.contains("var")) op_var = doc.at("var").get<std::size_t>();
            if (doc.contains("t")) op_t = doc.at("t").get<long>();
            auto res = tschirnhaus(f, op_var - 1, op_t);
            Json out;
            out["phi"] = series_to_json(res.phi);
            out["fbar"] = series_to_json(res.fbar);
            emit(out_path, out.dump(2));
            return 0;
        }

        return 1;
    } catch (const VerifyFailed& vf) {
        std::cerr << "error: " << vf.what() << "\n";
        return 6;
    } catch (const EngineError& e) {
        std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
