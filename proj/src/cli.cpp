#include "gwpt/cli.hpp"

#include "gwpt/acceptance.hpp"
#include "gwpt/capmatrix.hpp"
#include "gwpt/parser.hpp"
#include "gwpt/rewrite.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace gwpt {

namespace {

Degeneration parse_split_descriptor(const std::string& text, const Bracket& b) {
    if (text == "trivial")
        return TrivialSplit{};
    if (text == "nonsep")
        return NodeNonseparating{};
    if (text == "k3")
        return K3SurfaceSplit{};
    if (text.rfind("cone:", 0) == 0)
        return NormalCone{std::stoi(text.substr(5)) - 1};
    if (text.rfind("node:", 0) == 0) {
        // node:g1,g2[:sides] with sides a comma list of 1/2 per component.
        std::string rest = text.substr(5);
        NodeSeparating d;
        size_t comma = rest.find(',');
        if (comma == std::string::npos)
            throw RewriteError("node descriptor needs g1,g2");
        d.g1 = std::stoi(rest.substr(0, comma));
        std::string tail = rest.substr(comma + 1);
        size_t colon = tail.find(':');
        d.g2 = std::stoi(tail.substr(0, colon));
        d.side_of_component.assign(b.geom.n_div, 1);
        if (colon != std::string::npos) {
            std::string sides = tail.substr(colon + 1);
            d.side_of_component.clear();
            std::stringstream ss(sides);
            std::string item;
            while (std::getline(ss, item, ','))
                d.side_of_component.push_back(std::stoi(item));
        }
        return d;
    }
    throw RewriteError("unknown degeneration descriptor '" + text + "'");
}

int run_derivation_command(const Derivation& d, const std::string& replay_path,
                           std::ostream& out, std::ostream& err,
                           const std::function<Derivation()>& rerun) {
    if (!replay_path.empty()) {
        std::ifstream in(replay_path);
        if (!in) {
            err << "cannot open replay file '" << replay_path << "'\n";
            return 2;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        Derivation fresh = rerun();
        if (buf.str() == fresh.to_records()) {
            out << "replay ok: " << fresh.steps.size() << " steps reproduced bit-exactly\n";
            return 0;
        }
        err << "replay mismatch\n";
        return 1;
    }
    out << d.to_records();
    return 0;
}

} // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"gwpt - symbolic GW/PT partition-function calculus"};
    app.require_subcommand(1);

    std::string preset = "toy";
    std::string monomial_text, bracket_text, split_text, in_file, replay_file, theory_text;
    std::string format = "human";
    int n = 1, order = 8, max_deg = 6, div = 1, samples = 1000, jobs = 1;
    bool general = false;

    auto* validate = app.add_subcommand("validate-algebra", "check the Frobenius invariants");
    validate->add_option("--preset", preset, "preset name")->required();

    auto* hilb = app.add_subcommand("hilb-diagonal", "Kunneth diagonal of Hilb^n");
    hilb->add_option("--n", n)->required();
    hilb->add_option("--preset", preset)->required();

    auto* projector = app.add_subcommand("verify-projector", "diagonal acts as the identity");
    projector->add_option("--n", n)->required();
    projector->add_option("--preset", preset)->required();

    auto* transform_cmd = app.add_subcommand("transform", "descendent correspondence");
    transform_cmd->add_option("--preset", preset);
    transform_cmd->add_option("--monomial", monomial_text)->required();
    transform_cmd->add_flag("--general", general);

    auto* invert_cmd = app.add_subcommand("invert", "triangular inversion");
    invert_cmd->add_option("--preset", preset);
    invert_cmd->add_option("--monomial", monomial_text)->required();

    auto* degenerate_cmd = app.add_subcommand("degenerate", "degeneration formula");
    degenerate_cmd->add_option("--bracket", bracket_text)->required();
    degenerate_cmd->add_option("--split", split_text)->required();

    auto* splitd = app.add_subcommand("split-diagonal", "relative diagonal splitting");
    splitd->add_option("--bracket", bracket_text)->required();

    auto* reduce = app.add_subcommand("reduce-to-cap", "reduction scheme with trace");
    reduce->add_option("--bracket", bracket_text)->required();
    reduce->add_option("--replay", replay_file);

    auto* mcf = app.add_subcommand("mcf", "multiple cover formula");
    mcf->add_option("--theory", theory_text)->required()->check(CLI::IsMember({"gw", "pt"}));
    mcf->add_option("--div", div)->required();
    mcf->add_option("--bracket", bracket_text);

    auto* detect = app.add_subcommand("detect-rational", "rational reconstruction");
    detect->add_option("--in", in_file)->required();
    detect->add_option("--max-deg", max_deg);

    auto* ptoz = app.add_subcommand("p-to-z", "variable change p = e^z");
    ptoz->add_option("--in", in_file)->required();
    ptoz->add_option("--order", order)->required();

    auto* prefactors = app.add_subcommand("check-prefactors", "prefactor identities");
    prefactors->add_option("--samples", samples);

    auto* suite = app.add_subcommand("suite", "verification suites");
    std::string suite_name;
    suite->add_option("name", suite_name, "suite to run")->required();
    suite->add_option("--jobs", jobs);
    suite->add_option("--format", format)->check(CLI::IsMember({"human", "records"}));

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) {
            err << e.what() << "\n";
            return 2;
        }
        out << app.help();
        return 0;
    }

    try {
        if (validate->parsed()) {
            auto alg = resolve_algebra(preset);
            auto report = alg->validate();
            out << alg->to_string() << "\n" << report.to_string() << "\n";
            return report.ok() ? 0 : 1;
        }
        if (hilb->parsed()) {
            auto alg = resolve_algebra(preset);
            for (const auto& term : hilb_diagonal(n, alg)) {
                out << term.coefficient << "  "
                    << print_state(basis_state(alg, term.mu)) << "  (x)  ";
                BasisPartition dual = term.mu_dual;
                out << print_state(basis_state(alg, dual)) << "^\n";
            }
            return 0;
        }
        if (projector->parsed()) {
            auto alg = resolve_algebra(preset);
            auto report = verify_projector(n, alg);
            out << "checked " << report.checked << " classes, " << report.failures.size()
                << " failures\n";
            for (const auto& f : report.failures)
                out << "  " << f.detail << "\n";
            return report.ok() ? 0 : 1;
        }
        if (transform_cmd->parsed() || invert_cmd->parsed()) {
            auto alg = resolve_algebra(preset.empty() ? "toy" : preset);
            DescExpr e = parse_monomial(alg, monomial_text);
            KMatrix K;
            DescExpr result(alg);
            if (invert_cmd->parsed()) {
                result = invert(e, K);
            } else if (general) {
                result = transform_general(e, K);
            } else {
                for (const auto& [m, c] : e.terms())
                    result = result + c * transform(alg, m, K);
            }
            out << print_expr(result) << "\n";
            return 0;
        }
        if (degenerate_cmd->parsed()) {
            Bracket b = parse_bracket(bracket_text);
            Expression e = degenerate(b, parse_split_descriptor(split_text, b));
            out << e.to_string() << "\n";
            return 0;
        }
        if (splitd->parsed()) {
            Bracket b = parse_bracket(bracket_text);
            out << split_diagonal(b).to_string() << "\n";
            return 0;
        }
        if (reduce->parsed()) {
            Bracket b = parse_bracket(bracket_text);
            ReduceResult r = reduce_to_cap(b);
            return run_derivation_command(r.derivation, replay_file, out, err,
                                          [&] { return reduce_to_cap(b).derivation; });
        }
        if (mcf->parsed()) {
            Bracket b;
            if (!bracket_text.empty()) {
                b = parse_bracket(bracket_text);
            } else {
                b.theory = theory_text == "pt" ? Theory::PT : Theory::GW;
                b.mode = ClassMode::Red;
                b.geom = make_geometry("K3xC", 0, 1);
                b.cls = {{1, 1}, 1, 1};
                BasisPartition bp;
                bp.pairs = {{1, b.geom.surface->unit_index()}};
                b.rel = {RelSlot::make(bp)};
            }
            Expression e = theory_text == "pt" ? mcf_pt(b, div) : mcf_gw(b, div);
            out << e.to_string() << "\n";
            return 0;
        }
        if (detect->parsed()) {
            LaurentSeries s = read_series_file(in_file);
            auto rf = detect_rational(s, max_deg);
            if (!rf) {
                out << "undetermined\n";
                return 0;
            }
            out << rf->to_string() << "\n";
            return 0;
        }
        if (ptoz->parsed()) {
            LaurentSeries s = read_series_file(in_file);
            LaurentSeries zs = p_to_z(s, order);
            write_series(out, zs);
            return 0;
        }
        if (prefactors->parsed()) {
            PrefactorReport report = check_prefactors(samples);
            out << report.samples << " tuples, " << report.mismatches << " mismatches\n";
            for (const auto& d : report.details)
                out << "  " << d << "\n";
            return report.ok() ? 0 : 1;
        }
        if (suite->parsed()) {
            if (suite_name != "acceptance") {
                err << "unknown suite '" << suite_name << "'\n";
                return 2;
            }
            CliRunner self = [](const std::vector<std::string>& a) {
                std::ostringstream o, e2;
                return cli_run(a, o, e2);
            };
            auto results = run_acceptance(out, jobs, self, format == "records");
            return all_passed(results) ? 0 : 1;
        }
    } catch (const ParseError& e) {
        err << e.caret_diagnostic() << "\n";
        return 2;
    } catch (const AlgebraError& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
    err << "no subcommand\n";
    return 2;
}

} // namespace gwpt
