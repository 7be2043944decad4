#include "hibarrier/report.hpp"

#include <cmath>

namespace hibarrier::report {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json arc_summary(const HybridArc& arc) {
    return {{"initial", to_json(arc.initial())},
            {"final", to_json(arc.final_state())},
            {"final_time", arc.final_time()},
            {"jumps", arc.jumps()},
            {"cause", to_string(arc.cause)},
            {"zeno", arc.zeno},
            {"dies_sampled", arc.dies_sampled}};
}

}  // namespace

json to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
    return out;
}

json to_json(const CheckConfig& c) {
    return {{"radius", c.radius},
            {"band", c.band},
            {"samples", c.samples},
            {"scheme", c.scheme.to_string()},
            {"tol_eq", c.tol_eq},
            {"margin_strict", c.margin_strict},
            {"seed", c.seed},
            {"box", {{"lo", to_json(c.box.lo)}, {"hi", to_json(c.box.hi)}}},
            {"cone", {{"active_tol", c.cone.active_tol}, {"tol", c.cone.tol}, {"h0", c.cone.h.h0}, {"decay", c.cone.h.decay}, {"count", c.cone.h.count}}},
            {"clarke_radius", c.clarke_radius},
            {"clarke_samples", c.clarke_samples},
            {"full_pair_sampling", c.full_pair_sampling},
            {"flow_bound", c.flow_bound},
            {"max_witnesses", c.max_witnesses}};
}

json to_json(const Verdict& v, bool with_evaluations) {
    json witnesses = json::array();
    for (const auto& w : v.witnesses) {
        json item{{"condition", w.condition}, {"x", to_json(w.x)}, {"value", number(w.value)}, {"bound", number(w.bound)}};
        if (w.eta) item["eta"] = to_json(*w.eta);
        witnesses.push_back(std::move(item));
    }
    json conditions = json::object();
    for (const auto& [name, s] : v.conditions) {
        conditions[name] = {{"evaluations", s.evaluations}, {"violations", s.violations}, {"worst_margin", number(s.worst_margin)}};
    }
    json out{{"check", v.check},
             {"status", to_string(v.status)},
             {"samples", v.samples},
             {"worst_margin", number(v.worst_margin)},
             {"vacuous", v.vacuous},
             {"flags", v.flags},
             {"notes", v.notes},
             {"conditions", conditions},
             {"witnesses", witnesses}};
    if (with_evaluations) {
        json evals = json::array();
        for (const auto& e : v.evaluations) {
            json item{{"condition", e.condition}, {"x", to_json(e.x)}, {"value", number(e.value)}, {"bound", number(e.bound)}, {"violated", e.violated}};
            if (e.eta) item["eta"] = to_json(*e.eta);
            evals.push_back(std::move(item));
        }
        out["evaluations"] = std::move(evals);
    }
    return out;
}

json to_json(const Horizon& h) {
    return {{"T", h.T}, {"J", h.J}, {"step", h.step}, {"guard_tol", h.guard_tol}, {"member_tol", h.member_tol}, {"zeno_jumps", h.zeno_jumps}};
}

json to_json(const FalsifyResult& r) {
    json out{{"result", r.found() ? "counterexample" : "none"},
             {"stats",
              {{"starts", r.stats.starts},
               {"runs", r.stats.runs},
               {"horizon_reached", r.stats.horizon_reached},
               {"solution_dies", r.stats.solution_dies},
               {"left_c_union_d", r.stats.left_cud},
               {"numerical_failure", r.stats.numerical_failure},
               {"zeno", r.stats.zeno}}}};
    if (r.counterexample) {
        const auto& c = *r.counterexample;
        out["counterexample"] = {{"start_index", c.start_index},
                                 {"policy", c.policy},
                                 {"exit", {{"kind", to_string(c.exit.kind)}, {"t", c.exit.t}, {"j", c.exit.j}, {"x", to_json(c.exit.x)}}},
                                 {"barrier_at_exit", to_json(c.barrier_at_exit)},
                                 {"arc", arc_summary(c.arc)}};
    }
    return out;
}

json to_json(const ProbeResult& r) {
    json out{{"result", to_string(r.kind)}, {"starts", r.starts}, {"runs", r.runs}, {"entered", r.entered}, {"stalled", r.stalled}};
    if (r.witness) {
        const auto& w = *r.witness;
        out["witness"] = {{"start", to_json(w.start)},
                          {"policy", w.policy},
                          {"left_k", w.left_k},
                          {"worst_barrier", number(w.worst_barrier)},
                          {"arc", arc_summary(w.arc)}};
    }
    return out;
}

json make(const std::string& command, json config, json results, json timing) {
    return {{"tool", "hibarrier"},
            {"version", kToolVersion},
            {"command", command},
            {"config", std::move(config)},
            {"results", std::move(results)},
            {"timing", std::move(timing)}};
}

json without_timing(json report) {
    report.erase("timing");
    return report;
}

}  // namespace hibarrier::report
