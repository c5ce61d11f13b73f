// Command-line front end.
//
//   madelung run <config> [-o DIR]          execute a scenario, write report + dumps
//   madelung verify [--filter S] [--refine] run the built-in verification suite
//   madelung export <config> --fields a,b,c [-o DIR]
//                                           dump the named field tables
//
// Exit codes: 0 success (all checks pass), 1 a declared check failed,
// 2 parse/config error (bad command line, malformed config, unknown field),
// 3 domain-constraint violation (grid too small, non-SPD stiffness, ...),
// 4 internal-consistency failure (two routes that must agree do not).

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "madelung/csvio.hpp"
#include "madelung/error.hpp"
#include "madelung/runner.hpp"
#include "madelung/scenario.hpp"
#include "madelung/verify.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code_for(madelung::ErrorKind k) {
    using madelung::ErrorKind;
    switch (k) {
        case ErrorKind::parse:
        case ErrorKind::config:
            return 2;
        case ErrorKind::constraint:
        case ErrorKind::stencil_domain:
        case ErrorKind::degeneracy:
        case ErrorKind::empty_support:
            return 3;
        case ErrorKind::internal_consistency:
            return 4;
    }
    return 4;
}

/// A config argument is a path to a JSON file; as a convenience, the name of
/// a bundled scenario (e.g. "gaussian3d") is accepted when no such file
/// exists.
madelung::Scenario load_config(const std::string& arg) {
    if (fs::exists(arg)) return madelung::load_scenario_file(arg);
    const auto& names = madelung::bundled_scenario_names();
    for (const auto& n : names) {
        if (n == arg) return madelung::load_bundled_scenario(arg);
    }
    std::string msg = "config " + arg + ": no such file or bundled scenario; bundled names:";
    for (const auto& n : names) msg += " " + n;
    madelung::fail(madelung::ErrorKind::config, msg);
}

void write_dumps_and_manifest(const madelung::RunResult& rr, const fs::path& outdir,
                              bool with_report) {
    fs::create_directories(outdir);
    nlohmann::ordered_json manifest;
    manifest["scenario"] = rr.report.at("scenario").at("name");
    if (with_report) {
        madelung::write_text_file((outdir / "report.json").string(),
                                  madelung::report_to_string(rr.report));
        manifest["report"] = "report.json";
    }
    auto dumps = nlohmann::ordered_json::array();
    for (const auto& d : rr.dumps) {
        const std::string file = d.name + ".csv";
        madelung::write_text_file((outdir / file).string(), madelung::to_csv(d.table));
        nlohmann::ordered_json e;
        e["name"] = d.name;
        e["file"] = file;
        e["columns"] = d.table.columns;
        e["valid_points"] = d.table.valid_points;
        e["total_points"] = d.table.total_points;
        dumps.push_back(std::move(e));
    }
    manifest["dumps"] = std::move(dumps);
    madelung::write_text_file((outdir / "manifest.json").string(), manifest.dump(2) + "\n");
}

int cmd_run(const std::string& config, const std::string& outdir) {
    madelung::Scenario sc = load_config(config);
    madelung::RunResult rr = madelung::run_scenario(sc);
    write_dumps_and_manifest(rr, outdir, /*with_report=*/true);
    std::cout << madelung::report_to_string(rr.report);
    return rr.pass ? 0 : 1;
}

int cmd_verify(const std::string& filter, bool refine) {
    madelung::VerifyOptions opt;
    opt.filter = filter;
    opt.refine = refine;
    madelung::VerifyResult vr = madelung::verify_suite(opt);
    std::cout << madelung::report_to_string(vr.report);
    return vr.pass ? 0 : 1;
}

int cmd_export(const std::string& config, const std::vector<std::string>& fields,
               const std::string& outdir) {
    madelung::Scenario sc = load_config(config);
    sc.dumps = fields;  // the runner rejects unknown names, listing the valid ones
    madelung::RunResult rr = madelung::run_scenario(sc);
    write_dumps_and_manifest(rr, outdir, /*with_report=*/false);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"madelung: quantum-hydrodynamic and strain-geometry field toolkit"};
    app.require_subcommand(1);

    std::string run_config, run_outdir = ".";
    CLI::App* run = app.add_subcommand("run", "Execute one scenario and write its report");
    run->add_option("config", run_config, "Scenario config file (or bundled scenario name)")
        ->required();
    run->add_option("-o,--output", run_outdir, "Output directory (default: current)");

    std::string verify_filter;
    bool verify_refine = false;
    CLI::App* verify = app.add_subcommand("verify", "Run the built-in verification suite");
    verify->add_option("--filter", verify_filter,
                       "Only rows whose group, scenario, or id contains this substring");
    verify->add_flag("--refine", verify_refine,
                     "Add h -> h/2 convergence-order rows for second-order checks");

    std::string export_config, export_outdir = ".";
    std::vector<std::string> export_fields;
    CLI::App* exp = app.add_subcommand("export", "Dump named field tables as CSV");
    exp->add_option("config", export_config, "Scenario config file (or bundled scenario name)")
        ->required();
    exp->add_option("--fields", export_fields, "Comma-separated field names")
        ->required()
        ->delimiter(',');
    exp->add_option("-o,--output", export_outdir, "Output directory (default: current)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_config, run_outdir);
        if (verify->parsed()) return cmd_verify(verify_filter, verify_refine);
        if (exp->parsed()) return cmd_export(export_config, export_fields, export_outdir);
    } catch (const madelung::Error& e) {
        std::cerr << "error (" << madelung::to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error (internal): " << e.what() << "\n";
        return 4;
    }
    return 0;
}
