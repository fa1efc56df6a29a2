#include "tpdareach/cli.hpp"

#include "tpdareach/dsl.hpp"
#include "tpdareach/errors.hpp"
#include "tpdareach/regions.hpp"
#include "tpdareach/report.hpp"
#include "tpdareach/translation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>

namespace tpdareach::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ms(Clock::time_point since) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count());
}

void emit(const report::Report &r, bool json, std::ostream &out) {
    if (json)
        out << report::to_json(r).dump(2) << "\n";
    else
        out << report::to_text(r);
}

int check(const std::string &path, const std::string &target, bool json, bool witness, std::ostream &out) {
    const auto start = Clock::now();
    const auto model = dsl::load_model(path);
    report::Report r;
    r.target = target;

    if (const auto *p = std::get_if<dsl::PdaModel>(&model)) {
        const auto automaton = dsl::compile(*p);
        const auto id = dsl::state_id(*p, target);
        if (!id)
            throw ModelError("target state '" + target + "' is not declared");
        const auto verdict = pda::is_state_reachable(automaton, *id);
        r.reachable = std::holds_alternative<pda::Reachable>(verdict);
        if (witness && *r.reachable) {
            r.witness.emplace();
            for (const auto &step : std::get<pda::Reachable>(verdict).witness.steps)
                r.witness->push_back(dsl::render_rule(*p, step));
        }
        r.stats = {0, p->rules.size(), elapsed_ms(start)};
        emit(r, json, out);
        return kOk;
    }

    const auto &t = std::get<tpda::Tpda>(model);
    const translation::Analysis analysis(t);
    const auto verdict = analysis.verdict(target);
    r.reachable = std::holds_alternative<pda::Reachable>(verdict);
    if (witness && *r.reachable)
        r.witness = translation::render_witness(analysis.symbolic(), std::get<pda::Reachable>(verdict).witness,
                                                !json);
    const auto st = analysis.stats();
    r.stats = {st.regions, st.rules, elapsed_ms(start)};
    emit(r, json, out);
    return kOk;
}

int simulate(const std::string &path, std::size_t max_steps, std::uint32_t denominator, bool json,
             std::ostream &out) {
    const auto start = Clock::now();
    const auto model = dsl::load_model(path);
    report::Report r;
    r.oracle_states.emplace();

    if (const auto *p = std::get_if<dsl::PdaModel>(&model)) {
        std::set<std::uint32_t> seen;
        for (const auto &c : pda::bounded_bfs(dsl::compile(*p), max_steps))
            seen.insert(c.state.value);
        for (auto s : seen)
            r.oracle_states->push_back(p->states[s]);
    } else {
        const tpda::IndexedTpda t(std::get<tpda::Tpda>(model));
        for (auto s : tpda::grid_oracle(t, max_steps, denominator))
            r.oracle_states->push_back(t.state_name(s));
    }
    std::sort(r.oracle_states->begin(), r.oracle_states->end());
    r.stats.ms = elapsed_ms(start);
    emit(r, json, out);
    return kOk;
}

int translate_stats(const std::string &path, const std::string &target, bool json, std::ostream &out) {
    const auto start = Clock::now();
    const auto model = dsl::load_model(path);
    const auto *t = std::get_if<tpda::Tpda>(&model);
    if (!t)
        throw ModelError("translate-stats needs a tpda model");
    const translation::Analysis analysis(*t);
    const auto verdict = analysis.verdict(target);
    const auto st = analysis.stats();
    report::Report r;
    r.target = target;
    r.reachable = std::holds_alternative<pda::Reachable>(verdict);
    r.stats = {st.regions, st.rules, elapsed_ms(start)};
    if (json) {
        auto j = report::to_json(r);
        j["stats"]["mid_states"] = st.mid_states;
        out << j.dump(2) << "\n";
        return kOk;
    }
    out << "target: " << target << " (" << (*r.reachable ? "reachable" : "unreachable") << ")\n";
    out << "c_max: " << analysis.symbolic().tpda().cmax() << "\n";
    out << "regions: " << st.regions << "\n";
    out << "mid states: " << st.mid_states << "\n";
    out << "rules generated: " << st.rules << "\n";
    out << "time: " << r.stats.ms << " ms\n";
    return kOk;
}

int rotate_trace(const std::string &text, std::size_t steps, bool pin_ref, std::optional<std::uint32_t> cmax,
                 std::ostream &out) {
    auto parsed = regions::parse_region(text, cmax);
    regions::Region r = parsed.region;
    out << "0: " << regions::render(r, parsed.names) << "\n";
    for (std::size_t k = 1; k <= steps; ++k) {
        r = regions::rotate(r, !pin_ref);
        out << k << ": " << regions::render(r, parsed.names) << "\n";
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Reachability checker for timed pushdown automata"};
    app.require_subcommand(1);

    std::string model, target, items;
    bool json = false, witness = false, pin_ref = false;
    std::size_t max_steps = 0, rotations = 0;
    std::uint32_t denominator = 1;
    std::optional<std::uint32_t> cmax;

    auto *check_cmd = app.add_subcommand("check", "Decide whether a state is reachable");
    check_cmd->add_option("model", model, "Model file")->required();
    check_cmd->add_option("--target", target, "Target state")->required();
    check_cmd->add_flag("--json", json, "JSON report");
    check_cmd->add_flag("--witness", witness, "Include a witness when reachable");

    auto *sim_cmd = app.add_subcommand("simulate", "Bounded concrete exploration on a rational grid");
    sim_cmd->add_option("model", model, "Model file")->required();
    sim_cmd->add_option("--max-steps", max_steps, "Number of delay+transition steps")->required();
    sim_cmd->add_option("--denominator", denominator, "Grid denominator")->check(CLI::PositiveNumber);
    sim_cmd->add_flag("--json", json, "JSON report");

    auto *stats_cmd = app.add_subcommand("translate-stats", "Size of the generated symbolic automaton");
    stats_cmd->add_option("model", model, "Model file")->required();
    stats_cmd->add_option("--target", target, "Target state")->required();
    stats_cmd->add_flag("--json", json, "JSON report");

    auto *regions_cmd = app.add_subcommand("regions", "Trace region rotations");
    regions_cmd->add_option("--items", items, "Region text, e.g. \"{R:0, x:0} < {y:1}\"")->required();
    regions_cmd->add_option("--rotate", rotations, "Number of rotations")->required();
    regions_cmd->add_flag("--pin-ref", pin_ref, "Keep R in set 0");
    regions_cmd->add_option("--cmax", cmax, "Largest constant (default: largest value in --items)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kModelError;
    }

    try {
        if (check_cmd->parsed())
            return check(model, target, json, witness, out);
        if (sim_cmd->parsed())
            return simulate(model, max_steps, denominator, json, out);
        if (stats_cmd->parsed())
            return translate_stats(model, target, json, out);
        return rotate_trace(items, rotations, pin_ref, cmax, out);
    } catch (const ModelError &e) {
        err << "error: " << e.what() << "\n";
        for (std::size_t i = 1; i < e.details().size(); ++i)
            err << "error: " << e.details()[i] << "\n";
        return kModelError;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return kModelError;
    } catch (const InvariantViolation &e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

} // namespace tpdareach::cli
