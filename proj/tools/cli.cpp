#include "cli.hpp"

#include "hibarrier/catalog.hpp"
#include "hibarrier/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace hibarrier::cli {

using nlohmann::json;

namespace {

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> split_numbers(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    return out;
}

Horizon parse_horizon(const std::string& text, double step) {
    const auto v = split_numbers(text, "--horizon");
    if (v.size() != 2 || v[1] < 0 || v[1] != std::floor(v[1])) throw std::invalid_argument("--horizon expects T,J");
    Horizon h;
    h.T = v[0];
    h.J = static_cast<int>(v[1]);
    h.step = step;
    h.validate();
    return h;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

void print_run(std::ostream& out, const CheckRun& r) {
    const auto& v = r.verdict;
    out << v.check << ": " << to_string(v.status) << "  samples=" << v.samples << " worst_margin=" << fmt(v.worst_margin);
    if (v.vacuous) out << " (vacuous)";
    out << "\n";
    for (const auto& w : v.witnesses) {
        out << "  witness " << w.condition << " x=" << format_vec(w.x);
        if (w.eta) out << " eta=" << format_vec(*w.eta);
        out << " value=" << fmt(w.value) << " bound=" << fmt(w.bound) << "\n";
    }
    if (!v.flags.empty()) {
        out << "  flags:";
        for (const auto& f : v.flags) out << " " << f;
        out << "\n";
    }
    for (const auto& n : v.notes) out << "  note: " << n << "\n";
}

void write_report(const std::string& path, const json& report) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << report.dump(2) << "\n";
}

void write_csv(const std::string& path, const HybridArc& arc, const BarrierCandidate& b) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    write_arc_csv(f, arc, b);
}

}  // namespace

std::uint64_t default_seed() {
    if (const char* env = std::getenv("HIBARRIER_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

CheckSettings default_settings(const config::Model& m, std::uint64_t seed) {
    CheckSettings s;
    s.cfg.box = m.box;
    s.cfg.seed = seed;
    return s;
}

void apply_settings(CheckSettings& s, const json& o) {
    if (!o.is_object()) throw std::invalid_argument("settings must be an object");
    for (const auto& [key, value] : o.items()) {
        if (key == "samples") s.cfg.samples = value.get<int>();
        else if (key == "radius") s.cfg.radius = value.get<double>();
        else if (key == "band") s.cfg.band = value.get<double>();
        else if (key == "tol") s.cfg.tol_eq = value.get<double>();
        else if (key == "margin") s.cfg.margin_strict = value.get<double>();
        else if (key == "seed") s.cfg.seed = value.get<std::uint64_t>();
        else if (key == "workers") s.cfg.workers = value.get<int>();
        else if (key == "rho") s.rho = value.get<std::string>();
        else if (key == "option") s.option = value.get<std::string>();
        else throw std::invalid_argument("unknown setting '" + key + "'");
    }
}

json to_json(const CheckSettings& s) {
    json out = report::to_json(s.cfg);
    out["rho"] = s.rho;
    out["option"] = s.option;
    return out;
}

std::vector<CheckRun> run_theorem(const config::Model& m, const std::string& theorem, const CheckSettings& s) {
    const auto& h = m.system;
    const auto& b = m.barrier;
    const auto& cfg = s.cfg;
    auto timed = [&](auto&& fn) {
        Stopwatch sw;
        Verdict v = fn();
        return CheckRun{theorem, std::move(v), sw.seconds()};
    };
    if (theorem == "thm1") return {timed([&] { return check_thm1(h, b, cfg); })};
    if (theorem == "boundary") {
        BoundaryOption opt;
        if (s.option == "a") opt = BoundaryOption::A;
        else if (s.option == "b") opt = BoundaryOption::B;
        else if (s.option == "c") opt = BoundaryOption::C;
        else throw std::invalid_argument("--option must be a, b or c");
        const auto rho = UniquenessFunction::parse(s.rho);
        return {timed([&] { return check_thm_boundary(h, b, cfg, rho, opt); })};
    }
    if (theorem == "external") return {timed([&] { return check_thm_external(h, b, cfg); })};
    if (theorem == "lipschitz") return {timed([&] { return check_thm_lipschitz(h, b, cfg); })};
    if (theorem == "relaxed") {
        const auto rho = UniquenessFunction::parse(s.rho);
        return {timed([&] { return check_relaxed(h, b, cfg, rho); })};
    }
    if (theorem == "invariance") return {timed([&] { return check_invariance_completion(h, b, cfg, CompletionMode::NeighborhoodFlow); })};
    if (theorem == "contract-c1") return {timed([&] { return check_contractive_c1(h, b, cfg); })};
    if (theorem == "contract-lip") return {timed([&] { return check_contractive_lip(h, b, cfg); })};
    if (theorem == "contract-complete") return {timed([&] { return check_contractivity_completion(h, b, cfg); })};
    if (theorem == "cset") {
        return {timed([&] { return check_cset(h, b, cfg, CsetDirection::MinkowskiDefinition); }),
                timed([&] { return check_cset(h, b, cfg, CsetDirection::BarrierSufficient); })};
    }
    throw std::invalid_argument("unknown theorem '" + theorem + "'");
}

int exit_code(const std::vector<CheckRun>& runs) {
    bool inconclusive = false;
    for (const auto& r : runs) {
        if (r.verdict.status == CheckStatus::Violated) return kViolated;
        if (r.verdict.status == CheckStatus::Inconclusive) inconclusive = true;
    }
    return inconclusive ? kInconclusive : kOk;
}

bool FalsifyRun::found() const {
    if (invariance) return invariance->found();
    return contractivity && contractivity->kind == ProbeResult::Kind::BoundaryLingering;
}

const HybridArc* FalsifyRun::witness_arc() const {
    if (invariance && invariance->counterexample) return &invariance->counterexample->arc;
    if (contractivity && contractivity->witness) return &contractivity->witness->arc;
    return nullptr;
}

FalsifyRun run_falsify(const config::Model& m, const FalsifyRequest& req) {
    Stopwatch sw;
    const KComplex k = build_k_complex(m.system, m.barrier);
    FalsifyBudget budget;
    budget.starts = req.budget;
    budget.horizon = req.horizon;
    budget.seed = req.seed;
    budget.box = m.box;
    budget.workers = req.workers;
    FalsifyRun run;
    run.request = req;
    if (req.mode == "invariance") {
        run.invariance = falsify_invariance(m.system, k, budget);
    } else if (req.mode == "contractivity") {
        ProbeOptions opt;
        opt.tau = req.horizon.T;
        run.contractivity = probe_contractivity(m.system, k, budget, opt);
    } else {
        throw std::invalid_argument("--mode must be invariance or contractivity");
    }
    run.seconds = sw.seconds();
    return run;
}

json to_json(const FalsifyRequest& r) {
    return {{"mode", r.mode}, {"budget", r.budget}, {"horizon", report::to_json(r.horizon)}, {"seed", r.seed}, {"workers", r.workers}};
}

ExampleOutcome run_example(const config::SystemConfig& cfg, std::uint64_t seed, int workers) {
    ExampleOutcome out;
    const auto model = config::build_model(cfg);
    if (!cfg.expected) {
        out.lines.push_back(cfg.name + ": no expected block");
        return out;
    }
    const auto& e = *cfg.expected;
    for (const auto& n : e.notes) out.lines.push_back("note: " + n);
    for (const auto& c : e.checks) {
        CheckSettings s = default_settings(model, seed);
        s.cfg.workers = workers;
        apply_settings(s, e.settings);
        if (c.option) s.option = *c.option;
        if (c.rho) s.rho = *c.rho;
        for (const auto& r : run_theorem(model, c.theorem, s)) {
            const std::string got = to_string(r.verdict.status);
            const bool ok = got == c.status;
            out.pass = out.pass && ok;
            std::string label = r.verdict.check;
            if (c.theorem == "boundary") label += " option " + s.option;
            out.lines.push_back(std::string(ok ? "ok   " : "FAIL ") + label + ": " + got + " (expected " + c.status + ")");
        }
    }
    for (const auto& f : e.falsify) {
        FalsifyRequest req;
        req.mode = f.mode;
        req.budget = f.budget;
        req.horizon.T = f.T;
        req.horizon.J = f.J;
        req.horizon.step = f.step;
        req.seed = seed;
        req.workers = workers;
        const auto run = run_falsify(model, req);
        const bool ok = run.found() == f.counterexample;
        out.pass = out.pass && ok;
        const std::string got = run.found() ? "counterexample" : "none";
        out.lines.push_back(std::string(ok ? "ok   " : "FAIL ") + "falsify " + f.mode + ": " + got + " (expected " +
                            (f.counterexample ? "counterexample" : "none") + ")");
    }
    return out;
}

ParameterRule parse_policy(const std::string& text) {
    if (text == "random") return ParameterRule::random();
    if (text.rfind("const:", 0) == 0) {
        const auto v = split_numbers(text.substr(6), "--policy");
        Vec l(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0 || v[i] > 1) throw std::invalid_argument("--policy: λ must lie in [0,1]");
            l[static_cast<Eigen::Index>(i)] = v[i];
        }
        return ParameterRule::constant(l);
    }
    if (text.rfind("adversarial:", 0) == 0) {
        const int d = std::stoi(text.substr(12));
        if (d < 2) throw std::invalid_argument("--policy: adversarial grid needs d ≥ 2");
        return ParameterRule::adversarial(d);
    }
    throw std::invalid_argument("--policy must be const:λ1,..,λk, random or adversarial:d");
}

OverlapRule parse_overlap(const std::string& text) {
    if (text == "flow") return {OverlapRule::Kind::PreferFlow, 0.5};
    if (text == "jump") return {OverlapRule::Kind::PreferJump, 0.5};
    if (text.rfind("bernoulli:", 0) == 0) {
        const auto v = split_numbers(text.substr(10), "--overlap");
        if (v.size() != 1 || v[0] < 0 || v[0] > 1) throw std::invalid_argument("--overlap: p must lie in [0,1]");
        return {OverlapRule::Kind::Bernoulli, v[0]};
    }
    throw std::invalid_argument("--overlap must be flow, jump or bernoulli:p");
}

namespace {

int cmd_check(const std::string& path, const std::vector<std::string>& theorems, const json& overrides,
              const std::string& report_path, std::ostream& out) {
    const auto cfg = config::load_config(path);
    const auto model = config::build_model(cfg);
    CheckSettings s = default_settings(model, default_seed());
    apply_settings(s, overrides);
    s.cfg.validate(model.system.n);
    std::vector<CheckRun> runs;
    for (const auto& t : theorems) {
        for (auto& r : run_theorem(model, t, s)) {
            print_run(out, r);
            runs.push_back(std::move(r));
        }
    }
    if (!report_path.empty()) {
        json results = json::array();
        json timing = json::object();
        for (const auto& r : runs) {
            results.push_back(report::to_json(r.verdict));
            timing[r.verdict.check] = r.seconds;
        }
        json echo{{"system", cfg.source}, {"theorems", theorems}, {"settings", to_json(s)}};
        write_report(report_path, report::make("check", std::move(echo), std::move(results), std::move(timing)));
    }
    return exit_code(runs);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Barrier-function certificates and simulation for hybrid inclusions", "hibarrier"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "Run sampled certificate checks on a system file");
    std::string check_path;
    std::vector<std::string> theorems;
    int samples = 0;
    double radius = 0, band = 0, tol = 0, margin = 0;
    std::uint64_t check_seed = 0;
    int check_workers = 1;
    std::string rho, option, report_path;
    check->add_option("config", check_path, "System file (JSON)")->required();
    check->add_option("--theorem", theorems, "Check to run (repeatable)")->required()->check(CLI::IsMember(kTheorems));
    check->add_option("--samples", samples, "Samples per region");
    check->add_option("--radius", radius, "Neighborhood radius");
    check->add_option("--band", band, "Boundary band");
    check->add_option("--tol", tol, "Slack for non-strict conditions");
    check->add_option("--margin", margin, "Required room for strict conditions");
    check->add_option("--seed", check_seed, "Seed (default $HIBARRIER_SEED or 1)");
    check->add_option("--rho", rho, "Uniqueness function: linear:k or osgood");
    check->add_option("--option", option, "Extra condition for the boundary check")->check(CLI::IsMember({"a", "b", "c"}));
    check->add_option("--workers", check_workers, "Worker threads")->check(CLI::PositiveNumber);
    check->add_option("--report", report_path, "Write a JSON report");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Integrate one hybrid solution and write it as CSV");
    std::string sim_path, x0_text, policy_text = "const:0", overlap_text = "flow", horizon_text = "10,10", sim_out;
    double sim_step = 1e-3;
    std::uint64_t sim_seed = default_seed();
    simulate->add_option("config", sim_path, "System file (JSON)")->required();
    simulate->add_option("--x0", x0_text, "Initial state v1,...,vn")->required();
    simulate->add_option("--policy", policy_text, "const:λcsv | random | adversarial:d");
    simulate->add_option("--overlap", overlap_text, "flow | jump | bernoulli:p");
    simulate->add_option("--horizon", horizon_text, "T,J");
    simulate->add_option("--step", sim_step, "Integration step");
    simulate->add_option("--seed", sim_seed, "Seed for random selections");
    simulate->add_option("--out", sim_out, "CSV output (default standard output)");

    // falsify
    auto* falsify = app.add_subcommand("falsify", "Search for solutions that leave K or linger on its boundary");
    std::string fal_path, fal_horizon = "5,10", mode = "invariance", fal_report, fal_out;
    int budget = 50;
    double fal_step = 1e-2;
    std::uint64_t fal_seed = default_seed();
    int fal_workers = 1;
    falsify->add_option("config", fal_path, "System file (JSON)")->required();
    falsify->add_option("--budget", budget, "Number of starts")->check(CLI::PositiveNumber);
    falsify->add_option("--horizon", fal_horizon, "T,J");
    falsify->add_option("--step", fal_step, "Integration step");
    falsify->add_option("--seed", fal_seed, "Seed");
    falsify->add_option("--mode", mode, "invariance | contractivity")->check(CLI::IsMember({"invariance", "contractivity"}));
    falsify->add_option("--workers", fal_workers, "Worker threads")->check(CLI::PositiveNumber);
    falsify->add_option("--report", fal_report, "Write a JSON report");
    falsify->add_option("--out", fal_out, "Write the witness arc as CSV");

    // examples
    auto* examples = app.add_subcommand("examples", "Built-in example systems");
    examples->require_subcommand(1);
    auto* list = examples->add_subcommand("list", "List example ids");
    auto* ex_run = examples->add_subcommand("run", "Run an example's expected checks");
    std::string run_name;
    std::uint64_t ex_seed = default_seed();
    ex_run->add_option("name", run_name, "Example id (all when omitted)");
    ex_run->add_option("--seed", ex_seed, "Seed");
    auto* emit = examples->add_subcommand("emit", "Write an example's system file");
    std::string emit_name, emit_out;
    emit->add_option("name", emit_name, "Example id")->required();
    emit->add_option("--out", emit_out, "Output path (default standard output)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*check) {
            json overrides = json::object();
            if (check->count("--samples")) overrides["samples"] = samples;
            if (check->count("--radius")) overrides["radius"] = radius;
            if (check->count("--band")) overrides["band"] = band;
            if (check->count("--tol")) overrides["tol"] = tol;
            if (check->count("--margin")) overrides["margin"] = margin;
            overrides["seed"] = check->count("--seed") ? check_seed : default_seed();
            overrides["workers"] = check_workers;
            if (!rho.empty()) overrides["rho"] = rho;
            if (!option.empty()) overrides["option"] = option;
            return cmd_check(check_path, theorems, overrides, report_path, out);
        }
        if (*simulate) {
            const auto cfg = config::load_config(sim_path);
            const auto model = config::build_model(cfg);
            const auto v = split_numbers(x0_text, "--x0");
            if (static_cast<int>(v.size()) != model.system.n) throw std::invalid_argument("--x0 needs " + std::to_string(model.system.n) + " entries");
            const Vec x0 = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
            SelectionPolicy policy;
            policy.flow = parse_policy(policy_text);
            policy.jump = policy.flow;
            policy.overlap = parse_overlap(overlap_text);
            policy.seed = sim_seed;
            policy.objective = model.barrier.scalar();
            const Horizon horizon = parse_horizon(horizon_text, sim_step);
            const HybridArc arc = solve(model.system, x0, policy, horizon);
            std::ostringstream summary;
            summary << "cause: " << to_string(arc.cause) << " final_time=" << fmt(arc.final_time()) << " jumps=" << arc.jumps();
            if (arc.zeno) summary << " zeno";
            if (arc.dies_sampled) summary << " dies_sampled";
            if (sim_out.empty()) {
                write_arc_csv(out, arc, model.barrier);
                err << summary.str() << "\n";
            } else {
                write_csv(sim_out, arc, model.barrier);
                out << summary.str() << "\n";
            }
            return kOk;
        }
        if (*falsify) {
            const auto cfg = config::load_config(fal_path);
            const auto model = config::build_model(cfg);
            FalsifyRequest req;
            req.mode = mode;
            req.budget = budget;
            req.horizon = parse_horizon(fal_horizon, fal_step);
            req.seed = fal_seed;
            req.workers = fal_workers;
            const auto result = run_falsify(model, req);
            const json body = result.invariance ? report::to_json(*result.invariance) : report::to_json(*result.contractivity);
            out << mode << ": " << body["result"].get<std::string>() << "\n";
            if (result.invariance && result.invariance->counterexample) {
                const auto& c = *result.invariance->counterexample;
                out << "  start " << c.start_index << " " << format_vec(c.arc.initial()) << " policy " << c.policy << "\n";
                out << "  " << to_string(c.exit.kind) << " at t=" << fmt(c.exit.t) << " j=" << c.exit.j << " x=" << format_vec(c.exit.x)
                    << " B=" << format_vec(c.barrier_at_exit) << "\n";
            }
            if (result.contractivity && result.contractivity->witness) {
                const auto& w = *result.contractivity->witness;
                out << "  start " << format_vec(w.start) << " policy " << w.policy << " worst max B=" << fmt(w.worst_barrier) << "\n";
            }
            if (!fal_out.empty()) {
                if (const HybridArc* arc = result.witness_arc()) write_csv(fal_out, *arc, model.barrier);
            }
            if (!fal_report.empty()) {
                json echo{{"system", cfg.source}, {"falsify", to_json(req)}};
                write_report(fal_report, report::make("falsify", std::move(echo), body, json{{"seconds", result.seconds}}));
            }
            return result.found() ? kViolated : kOk;
        }
        if (*list) {
            for (const auto& f : catalog::fixtures()) out << f.id << "  " << f.summary << "\n";
            return kOk;
        }
        if (*ex_run) {
            std::vector<std::string> names = run_name.empty() ? catalog::ids() : std::vector<std::string>{run_name};
            bool all = true;
            for (const auto& name : names) {
                if (!catalog::find(name)) throw std::invalid_argument("unknown example '" + name + "'");
                const auto outcome = run_example(catalog::load(name), ex_seed);
                for (const auto& l : outcome.lines) out << "  " << l << "\n";
                out << name << ": " << (outcome.pass ? "PASS" : "FAIL") << "\n";
                all = all && outcome.pass;
            }
            return all ? kOk : kViolated;
        }
        if (*emit) {
            const auto* f = catalog::find(emit_name);
            if (!f) throw std::invalid_argument("unknown example '" + emit_name + "'");
            if (emit_out.empty()) {
                out << f->json;
            } else {
                std::ofstream file(emit_out);
                if (!file) throw std::runtime_error("cannot write " + emit_out);
                file << f->json;
            }
            return kOk;
        }
    } catch (const config::ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace hibarrier::cli
