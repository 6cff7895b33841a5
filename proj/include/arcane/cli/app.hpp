#pragma once

// Subcommands: sim, ballsbins, evs, lemmas, compare.
// Exit codes: 0 ok, 1 check failure, 2 usage or config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "arcane/config/config.hpp"
#include "arcane/models/balls_into_bins.hpp"
#include "arcane/models/evs_imbalance.hpp"
#include "arcane/models/lemma_grid.hpp"
#include "arcane/sim/compare.hpp"
#include "arcane/sim/output.hpp"
#include "arcane/util/csv.hpp"

namespace arcane::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "N" -> 1..N, "a-b" -> a..b, "a,b,c" -> list.
inline std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    auto num = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError("--seeds: '" + spec + "' is not N, a-b or a,b,c");
        return std::stoull(s);
    };
    std::vector<std::uint64_t> out;
    if (spec.find(',') != std::string::npos) {
        std::size_t start = 0;
        for (;;) {
            const auto comma = spec.find(',', start);
            out.push_back(num(spec.substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    } else if (const auto dash = spec.find('-'); dash != std::string::npos) {
        const auto a = num(spec.substr(0, dash)), b = num(spec.substr(dash + 1));
        if (b < a) throw UsageError("--seeds: empty range '" + spec + "'");
        for (auto s = a; s <= b; ++s) out.push_back(s);
    } else {
        const auto n = num(spec);
        if (n == 0) throw UsageError("--seeds: need at least one seed");
        for (std::uint64_t s = 1; s <= n; ++s) out.push_back(s);
    }
    return out;
}

inline std::vector<std::uint64_t> resolve_seeds(const std::string& cli_spec, const std::vector<std::uint64_t>& from_config,
                                                std::ostream& err) {
    if (!cli_spec.empty()) return parse_seeds(cli_spec);
    if (!from_config.empty()) return from_config;
    err << "warning: no seeds given, using seed 1\n";
    return {1};
}

inline std::filesystem::path resolve_out_dir(const std::string& cli_out, const std::string& config_out) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("ARCANE_OUT_DIR"); env && *env) return env;
    return config_out.empty() ? std::filesystem::path("out") : std::filesystem::path(config_out);
}

/// Runs `work(i)` for i in [0, count) on `jobs` threads. Work items share
/// nothing; results are stored by index so output order never depends on
/// scheduling.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& work) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (;;) {
                const auto i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct Context {
    std::ostream& out;
    std::ostream& err;
};

// ---------------------------------------------------------------------------
// sim

struct SimArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::string seeds;
    std::string out;
    unsigned jobs = 1;
};

inline int cmd_sim(const SimArgs& a, Context& ctx) {
    const auto cfg = config::load(a.config, a.overrides);
    const auto seeds = resolve_seeds(a.seeds, cfg.seeds, ctx.err);
    const auto dir = resolve_out_dir(a.out, cfg.out_dir) / cfg.run_name;
    std::vector<sim::RunResult> runs(seeds.size());
    parallel_for(seeds.size(), a.jobs, [&](std::size_t i) {
        runs[i] = sim::run(cfg.sim, seeds[i]);
        runs[i].run_id = sim::run_id(cfg.run_name, seeds[i]);
    });
    sim::write_outputs(dir, cfg.sim, runs);
    int rc = exit_ok;
    for (const auto& r : runs) {
        const auto ct = r.completion_time();
        ctx.out << r.run_id << ": " << (r.all_complete ? "complete" : "incomplete") << " completion_us="
                << (ct ? format_double(static_cast<double>(*ct) / 1000.0) : std::string("-"))
                << " drops=" << r.drops.total() << " events=" << r.events << "\n";
        if (!r.conserved) {
            ctx.err << r.run_id << ": packet conservation check failed\n";
            rc = exit_check_failed;
        }
    }
    ctx.out << "wrote " << dir.string() << "\n";
    return rc;
}

// ---------------------------------------------------------------------------
// ballsbins

struct BallsArgs {
    std::string model;
    std::string config;
    std::vector<std::string> overrides;
    std::optional<std::size_t> n;
    std::optional<double> lambda;
    std::optional<std::uint64_t> tau, b, rounds, recycle_every;
    std::string measure, schedule;
    std::string seeds;
    std::string out;
    unsigned jobs = 1;
    bool per_bin = false;
};

struct BallsRun {
    std::vector<models::PotentialRecord> records;
    std::vector<bool> converged;
    std::vector<std::vector<models::Count>> bin_loads;
};

inline int cmd_ballsbins(const BallsArgs& a, Context& ctx) {
    auto cfg = config::load(a.config, a.overrides);
    auto& bb = cfg.ballsbins;
    if (!a.model.empty()) bb.model = a.model;
    if (bb.model != "batched" && bb.model != "recycled") throw UsageError("model must be batched or recycled");
    const bool batched = bb.model == "batched";
    if (batched && (a.tau || a.b || a.recycle_every || !a.measure.empty() || !a.schedule.empty()))
        throw UsageError("batched model takes --lambda, not --tau/--b/--recycle-every/--measure/--schedule");
    if (!batched && a.lambda) throw UsageError("recycled model takes --tau/--b, not --lambda");
    if (a.n) bb.n = *a.n;
    if (a.lambda) bb.lambda = *a.lambda;
    if (a.tau) bb.tau = *a.tau;
    if (a.b) bb.b = *a.b;
    if (a.rounds) bb.rounds = *a.rounds;
    if (a.recycle_every) bb.recycle_every = *a.recycle_every;
    if (a.measure == "after") bb.measure = models::LoadMeasure::after_removal;
    else if (a.measure == "before") bb.measure = models::LoadMeasure::before_removal;
    else if (!a.measure.empty()) throw UsageError("--measure must be before or after");
    if (a.schedule == "round_robin") bb.schedule = models::ThrowSchedule::round_robin;
    else if (a.schedule == "immediate") bb.schedule = models::ThrowSchedule::immediate;
    else if (!a.schedule.empty()) throw UsageError("--schedule must be immediate or round_robin");
    if (bb.n < 1) throw UsageError("--n must be >= 1");
    if (bb.rounds < 1) throw UsageError("--rounds must be >= 1");
    if (batched && !(bb.lambda > 0 && bb.lambda <= 1)) throw UsageError("--lambda must be in (0, 1]");
    if (bb.recycle_every < 1) throw UsageError("--recycle-every must be >= 1");

    models::RecycledConfig rc;
    rc.n = bb.n;
    rc.tau = bb.tau ? bb.tau : std::max<std::uint64_t>(1, config::default_tau(bb.n));
    rc.b = bb.b ? bb.b : std::max<std::uint64_t>(1, config::default_b(bb.n));
    rc.recycle_every = bb.recycle_every;
    rc.measure = bb.measure;
    rc.schedule = bb.schedule;

    const auto seeds = resolve_seeds(a.seeds, cfg.seeds, ctx.err);
    std::vector<BallsRun> runs(seeds.size());
    parallel_for(seeds.size(), a.jobs, [&](std::size_t i) {
        auto rng = derive_rng(seeds[i], "ballsbins");
        auto& run = runs[i];
        auto keep_bins = [&](std::span<const models::Count> loads) {
            if (a.per_bin) run.bin_loads.emplace_back(loads.begin(), loads.end());
        };
        if (batched) {
            models::BatchedChain chain(bb.n, bb.lambda);
            for (std::uint64_t r = 0; r < bb.rounds; ++r) {
                run.records.push_back(chain.step(rng));
                keep_bins(chain.loads());
            }
        } else {
            models::RecycledChain chain(rc);
            for (std::uint64_t r = 0; r < bb.rounds; ++r) {
                run.records.push_back(chain.step(rng));
                run.converged.push_back(chain.is_converged());
                keep_bins(chain.loads());
            }
        }
    });

    const auto dir = resolve_out_dir(a.out, cfg.out_dir) / "ballsbins";
    const std::string stem = bb.model + "_n" + std::to_string(bb.n);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto& run = runs[i];
        std::string csv = batched ? "round,max_load,total_balls\n" : "round,max_load,Y_t,K_t,total_balls,converged\n";
        for (std::size_t r = 0; r < run.records.size(); ++r) {
            const auto& rec = run.records[r];
            CsvRow row;
            if (batched)
                row << rec.round << rec.max_load << rec.total_balls;
            else
                row << rec.round << rec.max_load << rec.potential << rec.overfull_bins << rec.total_balls
                    << static_cast<bool>(run.converged[r]);
            csv += row.str() + '\n';
        }
        atomic_write(dir / (stem + "_s" + std::to_string(seeds[i]) + ".csv"), csv);
        if (a.per_bin) {
            std::string bins = "round,bin,load\n";
            for (std::size_t r = 0; r < run.bin_loads.size(); ++r)
                for (std::size_t j = 0; j < run.bin_loads[r].size(); ++j)
                    bins += (CsvRow{} << r + 1 << j << run.bin_loads[r][j]).str() + '\n';
            atomic_write(dir / (stem + "_s" + std::to_string(seeds[i]) + "_bins.csv"), bins);
        }
    }

    std::string agg = batched ? "round,mean_max_load,max_max_load,mean_total_balls\n"
                              : "round,mean_max_load,max_max_load,mean_total_balls,mean_Y_t,converged_fraction\n";
    for (std::uint64_t r = 0; r < bb.rounds; ++r) {
        double sum_max = 0, sum_total = 0, sum_y = 0, conv = 0;
        models::Count max_max = 0;
        for (const auto& run : runs) {
            const auto& rec = run.records[r];
            sum_max += static_cast<double>(rec.max_load);
            sum_total += static_cast<double>(rec.total_balls);
            sum_y += static_cast<double>(rec.potential);
            max_max = std::max(max_max, rec.max_load);
            if (!batched && run.converged[r]) conv += 1;
        }
        const double k = static_cast<double>(runs.size());
        CsvRow row;
        row << r + 1 << sum_max / k << max_max << sum_total / k;
        if (!batched) row << sum_y / k << conv / k;
        agg += row.str() + '\n';
    }
    atomic_write(dir / (stem + "_aggregate.csv"), agg);

    double final_max = 0;
    for (const auto& run : runs) final_max += static_cast<double>(run.records.back().max_load);
    ctx.out << bb.model << " n=" << bb.n;
    if (batched)
        ctx.out << " lambda=" << format_double(bb.lambda);
    else
        ctx.out << " tau=" << rc.tau << " b=" << rc.b << " recycle_every=" << rc.recycle_every;
    ctx.out << " rounds=" << bb.rounds << " seeds=" << seeds.size()
            << " mean_final_max_load=" << format_double(final_max / static_cast<double>(runs.size())) << "\n";
    ctx.out << "wrote " << dir.string() << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------
// evs

struct EvsArgs {
    std::string config;
    std::vector<std::string> overrides;
    std::optional<std::uint32_t> flows, uplinks;
    std::vector<std::uint32_t> sizes;
    std::optional<std::size_t> trials;
    std::string seeds;
    std::string out;
    unsigned jobs = 1;
};

inline int cmd_evs(const EvsArgs& a, Context& ctx) {
    auto cfg = config::load(a.config, a.overrides);
    auto& e = cfg.evs;
    if (a.flows) e.flows = *a.flows;
    if (a.uplinks) e.uplinks = *a.uplinks;
    if (!a.sizes.empty()) e.sizes = a.sizes;
    if (a.trials) e.trials = *a.trials;
    if (e.flows < 1 || e.uplinks < 1 || e.trials < 1) throw UsageError("--flows, --uplinks and --trials must be >= 1");
    for (auto s : e.sizes)
        if (s < 1) throw UsageError("--sizes entries must be >= 1");
    const auto seeds = resolve_seeds(a.seeds, cfg.seeds, ctx.err);

    struct Cell {
        std::uint64_t seed;
        std::uint32_t size;
        models::ImbalanceSummary s;
    };
    std::vector<Cell> cells;
    for (auto seed : seeds)
        for (auto size : e.sizes) cells.push_back({seed, size, {}});
    parallel_for(cells.size(), a.jobs, [&](std::size_t i) {
        auto rng = derive_rng(cells[i].seed, "evs", cells[i].size);
        cells[i].s = models::evs_load_imbalance(e.flows, cells[i].size, e.uplinks, e.trials, rng);
    });
    std::string csv = "seed,flows,uplinks,evs_size,trials,mean,p50,p90,p99,max\n";
    for (const auto& c : cells) {
        csv += (CsvRow{} << c.seed << e.flows << e.uplinks << c.size << e.trials << c.s.mean << c.s.p50 << c.s.p90
                         << c.s.p99 << c.s.max)
                   .str() +
               '\n';
        ctx.out << "seed=" << c.seed << " evs=" << c.size << " mean_imbalance=" << format_double(c.s.mean) << "\n";
    }
    const auto dir = resolve_out_dir(a.out, cfg.out_dir) / "evs";
    const auto file = dir / ("evs_f" + std::to_string(e.flows) + "_u" + std::to_string(e.uplinks) + ".csv");
    atomic_write(file, csv);
    ctx.out << "wrote " << file.string() << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------
// lemmas

struct LemmaArgs {
    std::optional<std::uint64_t> n, k;
    std::optional<double> x;
    std::vector<std::uint64_t> ns;
    double x_step = 0.25;
    double bound_scale = 1.0;
    bool full = false;
    std::string out;
};

inline int cmd_lemmas(const LemmaArgs& a, Context& ctx) {
    if (a.bound_scale <= 0) throw UsageError("--bound-scale must be positive");
    if (a.n || a.k || a.x) {
        if (!(a.n && a.k && a.x)) throw UsageError("single-point check needs --n, --k and --x");
        if (*a.n < 1 || *a.k > *a.n) throw UsageError("need 1 <= n and k <= n");
        bool any = false, ok = true;
        auto show = [&](std::string_view name, const models::LemmaValue& v) {
            any = true;
            ok = ok && v.holds();
            ctx.out << name << ": n=" << *a.n << " k=" << *a.k << " x=" << format_double(*a.x)
                    << " exact=" << format_double(v.exact) << " bound=" << format_double(v.bound)
                    << " log_exact=" << format_double(v.log_exact) << " log_bound=" << format_double(v.log_bound)
                    << " ok=" << (v.holds() ? 1 : 0) << "\n";
        };
        if (*a.x >= 16) show("tail", models::lemma_tail_check(*a.n, *a.k, *a.x, a.bound_scale));
        if (*a.x >= 3.5 && 2 * *a.k <= *a.n)
            show("conditional", models::lemma_conditional_check(*a.n, *a.k, *a.x, a.bound_scale));
        if (!any) throw UsageError("point outside both lemma domains (tail: x >= 16; conditional: x >= 3.5, k <= n/2)");
        return ok ? exit_ok : exit_check_failed;
    }

    models::LemmaGrid grid;
    if (!a.ns.empty()) grid.ns = a.ns;
    for (auto n : grid.ns)
        if (n < 1) throw UsageError("--grid-n entries must be >= 1");
    if (!(a.x_step > 0)) throw UsageError("--x-step must be positive");
    grid.x_step = a.x_step;
    grid.bound_scale = a.bound_scale;
    const auto dir = resolve_out_dir(a.out, "out") / "lemmas";
    std::size_t total_violations = 0;
    for (auto lemma : {models::Lemma::tail, models::Lemma::conditional}) {
        std::string csv = "n,k,x,exact,bound,ok\n";
        std::size_t points = 0, violations = 0;
        // Without --full, keep the tightest x per (n, k) plus every violation.
        std::optional<models::LemmaPoint> tightest;
        auto flush = [&] {
            if (tightest) {
                const auto& p = *tightest;
                csv += (CsvRow{} << p.n << p.k << p.x << p.value.exact << p.value.bound << p.value.holds()).str() + '\n';
            }
            tightest.reset();
        };
        auto emit = [&](const models::LemmaPoint& p) {
            csv += (CsvRow{} << p.n << p.k << p.x << p.value.exact << p.value.bound << p.value.holds()).str() + '\n';
        };
        std::uint64_t cur_n = 0, cur_k = 0;
        models::sweep_lemma(lemma, grid, [&](const models::LemmaPoint& p) {
            ++points;
            const bool ok = p.value.holds();
            if (!ok) ++violations;
            if (a.full) {
                emit(p);
                return;
            }
            if (p.n != cur_n || p.k != cur_k) {
                flush();
                cur_n = p.n;
                cur_k = p.k;
            }
            if (!ok) {
                emit(p);
                return;
            }
            const double margin = p.value.log_exact - p.value.log_bound;
            if (!tightest || margin > tightest->value.log_exact - tightest->value.log_bound) tightest = p;
        });
        if (!a.full) flush();
        atomic_write(dir / ("lemma_" + std::string(models::to_string(lemma)) + ".csv"), csv);
        ctx.out << models::to_string(lemma) << ": " << points << " points, " << violations << " violations\n";
        total_violations += violations;
    }
    ctx.out << "wrote " << dir.string() << "\n";
    return total_violations == 0 ? exit_ok : exit_check_failed;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
    std::string config, config_b;
    std::vector<std::string> overrides, overrides_a, overrides_b;
    std::string seeds;
    std::string out;
    unsigned jobs = 1;
};

inline int cmd_compare(const CompareArgs& a, Context& ctx) {
    auto ov_a = a.overrides, ov_b = a.overrides;
    ov_a.insert(ov_a.end(), a.overrides_a.begin(), a.overrides_a.end());
    ov_b.insert(ov_b.end(), a.overrides_b.begin(), a.overrides_b.end());
    const auto ca = config::load(a.config, ov_a);
    const auto cb = config::load(a.config_b.empty() ? a.config : a.config_b, ov_b);
    sim::check_comparable(ca.sim, cb.sim);
    const auto seeds = resolve_seeds(a.seeds, ca.seeds, ctx.err);

    std::vector<sim::RunResult> ra(seeds.size()), rb(seeds.size());
    parallel_for(2 * seeds.size(), a.jobs, [&](std::size_t i) {
        const auto s = i / 2;
        if (i % 2 == 0)
            ra[s] = sim::run(ca.sim, seeds[s]);
        else
            rb[s] = sim::run(cb.sim, seeds[s]);
    });
    std::vector<sim::PairedRun> pairs;
    bool complete = true;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto ta = ra[s].completion_time(), tb = rb[s].completion_time();
        complete = complete && ta && tb;
        pairs.push_back({seeds[s], static_cast<double>(ta ? *ta : ra[s].end_time),
                         static_cast<double>(tb ? *tb : rb[s].end_time), ra[s].drops.total(), rb[s].drops.total()});
    }
    auto cmp = sim::summarize(pairs);
    cmp.all_complete = complete;

    std::string csv = "seed,completion_a_ns,completion_b_ns,ratio,drops_a,drops_b\n";
    for (const auto& p : cmp.pairs)
        csv += (CsvRow{} << p.seed << p.completion_a << p.completion_b << p.completion_a / p.completion_b << p.drops_a
                         << p.drops_b)
                   .str() +
               '\n';
    nlohmann::ordered_json j;
    j["a"] = sim::config_json(ca.sim);
    j["b"] = sim::config_json(cb.sim);
    j["seeds"] = seeds;
    j["completion_ratio"] = {{"mean", cmp.completion_ratio.mean},
                             {"ci95_lo", cmp.completion_ratio.lo},
                             {"ci95_hi", cmp.completion_ratio.hi}};
    j["drop_ratio"] = std::isfinite(cmp.drop_ratio) ? nlohmann::ordered_json(cmp.drop_ratio) : nlohmann::ordered_json("inf");
    j["b_faster"] = cmp.b_faster;
    j["ties"] = cmp.ties;
    j["sign_test_p"] = cmp.sign_test_p;
    j["all_complete"] = cmp.all_complete;
    const auto dir = resolve_out_dir(a.out, ca.out_dir) / (ca.run_name + "_compare");
    atomic_write(dir / "compare.csv", csv);
    atomic_write(dir / "compare.json", j.dump(2) + "\n");

    ctx.out << "completion ratio A/B: mean=" << format_double(cmp.completion_ratio.mean) << " ci95=["
            << format_double(cmp.completion_ratio.lo) << ", " << format_double(cmp.completion_ratio.hi) << "]\n"
            << "drop ratio A/B: " << format_double(cmp.drop_ratio) << "\n"
            << "B faster in " << cmp.b_faster << "/" << seeds.size() << " seeds (sign test p="
            << format_double(cmp.sign_test_p) << ")\n"
            << "wrote " << dir.string() << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"ARCANE load-balancing simulator and stochastic models"};
    app.require_subcommand(1);
    Context ctx{out, err};

    SimArgs sim_args;
    auto* sim = app.add_subcommand("sim", "Run the packet simulator for each seed");
    sim->add_option("--config", sim_args.config, "YAML experiment config")->required();
    sim->add_option("--set", sim_args.overrides, "Override a config key (key=value), repeatable");
    sim->add_option("--seeds", sim_args.seeds, "N (1..N), a-b, or a,b,c; overrides config seeds");
    sim->add_option("--out", sim_args.out, "Output directory (default: ARCANE_OUT_DIR or output.dir)");
    sim->add_option("--jobs", sim_args.jobs, "Parallel runs")->check(CLI::PositiveNumber);

    BallsArgs balls;
    auto* bb = app.add_subcommand("ballsbins", "Simulate batched or recycled balls-into-bins");
    bb->add_option("model", balls.model, "batched | recycled");
    bb->add_option("--config", balls.config, "YAML config (ballsbins and seeds sections)");
    bb->add_option("--set", balls.overrides, "Override a config key (key=value)");
    bb->add_option("--n", balls.n, "Bins");
    bb->add_option("--lambda", balls.lambda, "Arrival rate (batched)");
    bb->add_option("--tau", balls.tau, "Threshold (recycled; default ceil(4 ln n))");
    bb->add_option("--b", balls.b, "Colors per bin (recycled; default ceil(2.4 ln n))");
    bb->add_option("--rounds", balls.rounds, "Rounds");
    bb->add_option("--recycle-every", balls.recycle_every, "Memory update period (recycled)");
    bb->add_option("--measure", balls.measure, "Load seen by a removed ball: before | after");
    bb->add_option("--schedule", balls.schedule, "Which colors throw: immediate | round_robin");
    bb->add_option("--seeds", balls.seeds, "N (1..N), a-b, or a,b,c");
    bb->add_option("--out", balls.out, "Output directory");
    bb->add_option("--jobs", balls.jobs, "Parallel seeds")->check(CLI::PositiveNumber);
    bb->add_flag("--per-bin", balls.per_bin, "Also write per-bin loads every round");

    EvsArgs evs;
    auto* ev = app.add_subcommand("evs", "Load imbalance of hashing EVs onto uplinks");
    ev->add_option("--config", evs.config, "YAML config (evs and seeds sections)");
    ev->add_option("--set", evs.overrides, "Override a config key (key=value)");
    ev->add_option("--flows", evs.flows, "Active flows");
    ev->add_option("--uplinks", evs.uplinks, "Uplinks");
    ev->add_option("--sizes", evs.sizes, "EVS sizes")->delimiter(',');
    ev->add_option("--trials", evs.trials, "Trials per size");
    ev->add_option("--seeds", evs.seeds, "N (1..N), a-b, or a,b,c");
    ev->add_option("--out", evs.out, "Output directory");
    ev->add_option("--jobs", evs.jobs, "Parallel cells")->check(CLI::PositiveNumber);

    LemmaArgs lem;
    auto* lm = app.add_subcommand("lemmas", "Check the binomial tail lemmas exactly");
    lm->add_option("--n", lem.n, "Single point: bins");
    lm->add_option("--k", lem.k, "Single point: trials");
    lm->add_option("--x", lem.x, "Single point: threshold");
    lm->add_option("--grid-n", lem.ns, "Grid bin counts")->delimiter(',');
    lm->add_option("--x-step", lem.x_step, "Grid step in x");
    lm->add_option("--bound-scale", lem.bound_scale, "Multiply both bounds (negative control)");
    lm->add_flag("--full", lem.full, "Write every grid point instead of the tightest per (n, k)");
    lm->add_option("--out", lem.out, "Output directory");

    CompareArgs cmp;
    auto* cp = app.add_subcommand("compare", "Paired-seed comparison of two configurations (A vs B)");
    cp->add_option("--config", cmp.config, "Config for A (and B unless --config-b)")->required();
    cp->add_option("--config-b", cmp.config_b, "Config for B");
    cp->add_option("--set", cmp.overrides, "Override for both sides");
    cp->add_option("--a", cmp.overrides_a, "Override for A only (key=value)");
    cp->add_option("--b", cmp.overrides_b, "Override for B only (key=value)");
    cp->add_option("--seeds", cmp.seeds, "N (1..N), a-b, or a,b,c");
    cp->add_option("--out", cmp.out, "Output directory");
    cp->add_option("--jobs", cmp.jobs, "Parallel runs")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (sim->parsed()) return cmd_sim(sim_args, ctx);
        if (bb->parsed()) return cmd_ballsbins(balls, ctx);
        if (ev->parsed()) return cmd_evs(evs, ctx);
        if (lm->parsed()) return cmd_lemmas(lem, ctx);
        if (cp->parsed()) return cmd_compare(cmp, ctx);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const config::ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const sim::SimError& e) {
        err << "simulation aborted: " << e.what() << "\n";
        return exit_check_failed;
    }
    return exit_usage;
}

}  // namespace arcane::cli
