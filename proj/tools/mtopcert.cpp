// mtopcert: certify irreducibility-type conditions and eigenvector
// uniqueness for m-topical maps given in the s-expression DSL.
//
// Subcommands: check, signature, eigen, unique, export.
// Exit codes: 0 all requested conditions hold / certified / converged,
// 1 some condition fails / refuted, 2 error or unknown, 3 non-convergence.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtop/checks.hpp"
#include "mtop/parse.hpp"
#include "mtop/spectral.hpp"

namespace {

struct CommonOpts {
    std::string map_path;
    std::string format = "text";
    std::string engine = "auto";
    std::string point;
    double tol = 1e-10;
    double tie_tol = 1e-9;
    int max_iter = 100000;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mtop::Error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

mtop::MapExpr load_map(const std::string& path) { return mtop::parse_map(read_file(path)); }

mtop::Engine parse_engine(const std::string& s) {
    if (s == "sat") return mtop::Engine::Sat;
    if (s == "brute") return mtop::Engine::Brute;
    if (s == "graph") return mtop::Engine::Graph;
    if (s == "auto") return mtop::Engine::Auto;
    throw mtop::Error("unknown engine: " + s);
}

mtop::ExtPoint parse_point(const std::string& s, int n) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            vals.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw mtop::Error("malformed point component: " + item);
        }
    }
    if (static_cast<int>(vals.size()) != n)
        throw mtop::Error("point has " + std::to_string(vals.size()) + " components; map dimension is " +
                          std::to_string(n));
    for (double v : vals)
        if (!(v > 0.0)) throw mtop::Error("point components must be strictly positive");
    return mtop::ExtPoint::from_doubles(vals);
}

struct ConditionFlags {
    bool all = false;
    bool facial = false;
    bool graphical = false;
    bool partial = false;
    bool indecomposable = false;
    bool imperturbable = false;

    std::vector<mtop::Condition> selected() const {
        std::vector<mtop::Condition> out;
        auto add = [&](bool on, mtop::Condition c) {
            if (all || on) out.push_back(c);
        };
        add(facial, mtop::Condition::Facial);
        add(graphical, mtop::Condition::Graphical);
        add(partial, mtop::Condition::Partial);
        add(indecomposable, mtop::Condition::Indecomposable);
        add(imperturbable, mtop::Condition::Imperturbable);
        return out;
    }
};

void add_condition_flags(CLI::App* cmd, ConditionFlags& flags) {
    cmd->add_flag("--all", flags.all, "select every condition");
    cmd->add_flag("--facial", flags.facial, "facial irreducibility");
    cmd->add_flag("--graphical", flags.graphical, "graphical irreducibility (strong connectivity of G(f))");
    cmd->add_flag("--partial", flags.partial, "partial irreducibility");
    cmd->add_flag("--indecomposable", flags.indecomposable, "indecomposability");
    cmd->add_flag("--imperturbable", flags.imperturbable, "imperturbability");
}

int cmd_check(const CommonOpts& opts, const ConditionFlags& flags) {
    mtop::MapExpr f = load_map(opts.map_path);
    auto conditions = flags.selected();
    if (conditions.empty()) {
        std::cerr << "error: no condition selected (use --all or condition flags)\n";
        return 2;
    }
    mtop::Engine engine = parse_engine(opts.engine);
    bool any_fail = false, any_unknown = false;
    for (auto c : conditions) {
        mtop::Engine e = engine;
        if (c == mtop::Condition::Graphical) e = mtop::Engine::Auto; // always the graph engine
        if (c != mtop::Condition::Graphical && e == mtop::Engine::Graph) {
            std::cerr << "error: engine 'graph' applies only to --graphical\n";
            return 2;
        }
        mtop::CheckReport rep = mtop::check(f, c, e);
        std::cout << (opts.format == "structured" ? mtop::to_structured(rep) : mtop::to_text(rep) + "\n");
        any_fail = any_fail || rep.verdict == mtop::Verdict::Fails;
        any_unknown = any_unknown || rep.verdict == mtop::Verdict::Unknown;
    }
    if (any_unknown) return 2;
    return any_fail ? 1 : 0;
}

void print_bool_map(const std::string& label, const mtop::BoolMap& g, const std::string& format) {
    if (format == "structured") {
        std::cout << "record: signature\nkind: " << label << "\n";
        for (int i = 0; i < g.dim(); ++i)
            std::cout << "circuit_" << (i + 1) << ": " << g.outputs()[static_cast<size_t>(i)].to_text() << "\n";
        std::cout << "end: record\n";
    } else {
        for (int i = 0; i < g.dim(); ++i)
            std::cout << label << "[" << (i + 1) << "]: " << g.outputs()[static_cast<size_t>(i)].to_text() << "\n";
    }
}

int cmd_signature(const CommonOpts& opts) {
    mtop::MapExpr f = load_map(opts.map_path);
    print_bool_map("upper", mtop::upper_signature(f), opts.format);
    print_bool_map("lower", mtop::lower_signature(f), opts.format);
    if (!opts.point.empty()) {
        mtop::ExtPoint u = parse_point(opts.point, f.dimension());
        mtop::LocalSignatures sig = mtop::local_signatures(f, u, opts.tie_tol);
        print_bool_map("upper_local", sig.upper, opts.format);
        print_bool_map("lower_local", sig.lower, opts.format);
    }
    return 0;
}

int cmd_eigen(const CommonOpts& opts) {
    mtop::MapExpr f = load_map(opts.map_path);
    const int n = mtop::validate(f);
    mtop::ExtPoint x0 = opts.point.empty() ? mtop::ExtPoint::all_ones(n) : parse_point(opts.point, n);
    mtop::EigenResult res = mtop::power_iteration(f, x0, opts.tol, opts.max_iter);
    std::cout << (opts.format == "structured" ? mtop::to_structured(res) : mtop::to_text(res) + "\n");
    return res.converged ? 0 : 3;
}

int cmd_unique(const CommonOpts& opts, bool run_m, bool run_n) {
    mtop::MapExpr f = load_map(opts.map_path);
    const int n = mtop::validate(f);
    if (!run_m && !run_n) run_m = run_n = true;
    mtop::ExtPoint u(std::vector<mtop::XVal>{});
    if (opts.point.empty()) {
        mtop::EigenResult eig = mtop::power_iteration(f, mtop::ExtPoint::all_ones(n), opts.tol, opts.max_iter);
        if (!eig.converged) {
            std::cerr << "error: eigenvector iteration did not converge; supply --point\n";
            return 2;
        }
        u = eig.vector;
    } else {
        u = parse_point(opts.point, n);
    }
    mtop::Engine engine = parse_engine(opts.engine);
    if (engine == mtop::Engine::Graph) {
        std::cerr << "error: engine 'graph' does not apply to uniqueness conditions\n";
        return 2;
    }
    bool any_refuted = false, any_unknown = false;
    auto emit = [&](const mtop::UniquenessReport& rep) {
        std::cout << (opts.format == "structured" ? mtop::to_structured(rep) : mtop::to_text(rep) + "\n");
        any_refuted = any_refuted || rep.verdict == mtop::UniquenessVerdict::Refuted;
        any_unknown = any_unknown || rep.verdict == mtop::UniquenessVerdict::Unknown;
    };
    if (run_m) emit(mtop::condition_M(f, u, engine, opts.tie_tol));
    if (run_n) emit(mtop::condition_N(f, u, engine, opts.tie_tol));
    if (any_unknown) return 2;
    return any_refuted ? 1 : 0;
}

int cmd_export(const CommonOpts& opts, const ConditionFlags& flags, const std::string& dimacs_path,
               const std::string& dot_path) {
    mtop::MapExpr f = load_map(opts.map_path);
    if (!dimacs_path.empty()) {
        auto conditions = flags.selected();
        if (conditions.size() != 1) {
            std::cerr << "error: --dimacs needs exactly one encodable condition flag\n";
            return 2;
        }
        if (conditions[0] == mtop::Condition::Graphical) {
            std::cerr << "error: graphical irreducibility has no CNF encoding\n";
            return 2;
        }
        mtop::CnfFormula cnf = mtop::encode(conditions[0], mtop::lower_signature(f), mtop::upper_signature(f));
        std::ofstream out(dimacs_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << dimacs_path << "\n";
            return 2;
        }
        out << mtop::to_dimacs(cnf);
        std::cout << "wrote " << dimacs_path << " (" << cnf.nvars << " vars, " << cnf.clauses.size()
                  << " clauses)\n";
    }
    if (!dot_path.empty()) {
        mtop::Digraph g = mtop::adjacency_graph(f);
        std::ofstream out(dot_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << dot_path << "\n";
            return 2;
        }
        out << g.to_dot();
        std::cout << "wrote " << dot_path << " (" << g.size() << " nodes)\n";
    }
    if (dimacs_path.empty() && dot_path.empty()) {
        std::cerr << "error: nothing to export (use --dimacs and/or --dot)\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certification toolkit for m-topical maps built from power averages"};
    app.require_subcommand(1);

    CommonOpts opts;
    ConditionFlags flags;
    bool run_m = false, run_n = false;
    std::string dimacs_path, dot_path;

    auto add_common = [&](CLI::App* cmd, bool needs_map = true) {
        if (needs_map) cmd->add_option("map", opts.map_path, "map description file")->required();
        cmd->add_option("--format", opts.format, "output format")->check(CLI::IsMember({"text", "structured"}));
        cmd->add_option("--engine", opts.engine, "decision engine")
            ->check(CLI::IsMember({"sat", "brute", "graph", "auto"}));
        cmd->add_option("--point", opts.point, "interior point \"v1,v2,...\"");
        cmd->add_option("--tol", opts.tol, "eigen iteration tolerance");
        cmd->add_option("--tie-tol", opts.tie_tol, "relative tie tolerance for local signatures");
        cmd->add_option("--max-iter", opts.max_iter, "eigen iteration cap");
    };

    CLI::App* check = app.add_subcommand("check", "decide irreducibility-type conditions");
    add_common(check);
    add_condition_flags(check, flags);

    CLI::App* signature = app.add_subcommand("signature", "print signature circuits");
    add_common(signature);

    CLI::App* eigen = app.add_subcommand("eigen", "compute a positive eigenpair by power iteration");
    add_common(eigen);

    CLI::App* unique = app.add_subcommand("unique", "certify uniqueness of the positive eigenvector");
    add_common(unique);
    unique->add_flag("--m", run_m, "check condition (M)");
    unique->add_flag("--n", run_n, "check condition (N)");

    CLI::App* exp = app.add_subcommand("export", "write DIMACS and DOT artifacts");
    add_common(exp);
    add_condition_flags(exp, flags);
    exp->add_option("--dimacs", dimacs_path, "write the condition encoding as DIMACS CNF");
    exp->add_option("--dot", dot_path, "write G(f) with SCC clusters as DOT");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(check)) return cmd_check(opts, flags);
        if (app.got_subcommand(signature)) return cmd_signature(opts);
        if (app.got_subcommand(eigen)) return cmd_eigen(opts);
        if (app.got_subcommand(unique)) return cmd_unique(opts, run_m, run_n);
        if (app.got_subcommand(exp)) return cmd_export(opts, flags, dimacs_path, dot_path);
    } catch (const mtop::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
