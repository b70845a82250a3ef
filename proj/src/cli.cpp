#include "pslab/cli.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pslab/admissible.hpp"
#include "pslab/bigutil.hpp"
#include "pslab/construction.hpp"
#include "pslab/cramer.hpp"
#include "pslab/discrepancy.hpp"
#include "pslab/emit.hpp"
#include "pslab/errors.hpp"
#include "pslab/kernels.hpp"
#include "pslab/rng.hpp"
#include "pslab/stats.hpp"
#include "pslab/walk.hpp"

namespace pslab::cli {

namespace {

using nlohmann::json;

struct CommonOpts {
    std::string format = "json";
    std::string out_path;
    std::string manifest_path;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    uint64_t segment_cap = uint64_t{1} << 26;

    SieveConfig sieve_cfg() const {
        SieveConfig cfg;
        cfg.segment_cap = segment_cap;
        cfg.threads = std::max(1, threads);
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", c.out_path, "Output file (stdout when omitted)");
    cmd->add_option("--manifest", c.manifest_path, "Manifest path (default: <out>.manifest.json)");
    cmd->add_option("--threads", c.threads, "Worker threads");
    cmd->add_option("--segment-cap", c.segment_cap, "Sieve segment size in integers");
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    uint64_t ms() const {
        return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                         std::chrono::steady_clock::now() - t0)
                                         .count());
    }
};

// Emits data (+ manifest when any file path is involved) and returns 0.
int finish(const CommonOpts& c, const std::vector<std::string>& argv,
           const std::string& command, const std::map<std::string, std::string>& params,
           std::optional<uint64_t> seed, const Timer& timer, const json& data,
           const Table* table = nullptr) {
    std::string text = (c.format == "csv" && table) ? to_csv(*table) : to_json_text(data);
    auto outputs = emit_text(text, c.out_path);

    if (!c.out_path.empty() || !c.manifest_path.empty()) {
        RunManifest m;
        m.command = command;
        m.parameters = params;
        m.seed = seed;
        m.wall_time_ms = timer.ms();
        m.outputs = outputs;
        m.argv = argv;
        std::string mpath =
            c.manifest_path.empty() ? c.out_path + ".manifest.json" : c.manifest_path;
        write_file(mpath, m.to_json());
    }
    return 0;
}

uint64_t ensure_seed(std::optional<uint64_t> given) {
    if (given) return *given;
    std::random_device rd;
    uint64_t s = (uint64_t{rd()} << 32) ^ rd();
    std::cerr << "seed: " << s << "\n";
    return s;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        size_t pos = 0;
        try {
            out.push_back(std::stod(item, &pos));
        } catch (const std::exception&) {
            throw ArgumentError(std::string(what) + ": bad number " + item);
        }
        if (pos != item.size()) throw ArgumentError(std::string(what) + ": bad number " + item);
    }
    if (out.empty()) throw ArgumentError(std::string(what) + ": empty list");
    return out;
}

LinearForm parse_form_string(const std::string& s) {
    std::istringstream in(s);
    std::string gs, hs;
    if (!(in >> gs >> hs)) throw ArgumentError("form: expected \"g h\"");
    LinearForm f;
    if (f.g.set_str(gs, 10) != 0 || f.h.set_str(hs, 10) != 0)
        throw ArgumentError("form: bad integer in \"" + s + "\"");
    if (f.g < 1) throw ArgumentError("form: g must be >= 1");
    return f;
}

LinearSystem system_from_options(const std::string& offsets_csv, const std::string& forms_file,
                                 const std::string& form_str) {
    if (!offsets_csv.empty()) {
        OffsetTuple t = parse_offsets(offsets_csv);
        std::vector<mpz_class> hs(t.offsets.begin(), t.offsets.end());
        return LinearSystem::from_offsets(hs);
    }
    if (!forms_file.empty()) return parse_system_text(read_file(forms_file));
    if (!form_str.empty()) {
        LinearSystem sys;
        sys.forms.push_back(parse_form_string(form_str));
        return sys;
    }
    throw ArgumentError("need --offsets, --forms, or --form");
}

json histogram_rows(const WindowHistogram& hist, double lambda) {
    json rows = json::array();
    uint32_t m_top = hist.counts.empty() ? 0 : hist.counts.rbegin()->first;
    for (uint32_t m = 0; m <= m_top; ++m) {
        auto it = hist.counts.find(m);
        uint64_t cnt = it == hist.counts.end() ? 0 : it->second;
        double freq = static_cast<double>(cnt) / hist.n_total;
        double pmf = poisson_pmf(lambda, m);
        rows.push_back({{"m", m},
                        {"count", cnt},
                        {"frequency", round12(freq)},
                        {"poisson_pmf", round12(pmf)},
                        {"abs_error", round12(std::abs(freq - pmf))}});
    }
    return rows;
}

Table histogram_table(const WindowHistogram& hist, double lambda) {
    Table t;
    t.columns = {"m", "count", "frequency", "poisson_pmf", "abs_error"};
    uint32_t m_top = hist.counts.empty() ? 0 : hist.counts.rbegin()->first;
    for (uint32_t m = 0; m <= m_top; ++m) {
        auto it = hist.counts.find(m);
        uint64_t cnt = it == hist.counts.end() ? 0 : it->second;
        double freq = static_cast<double>(cnt) / hist.n_total;
        double pmf = poisson_pmf(lambda, m);
        t.rows.push_back({std::to_string(m), std::to_string(cnt), fmt_double(freq),
                          fmt_double(pmf), fmt_double(std::abs(freq - pmf))});
    }
    return t;
}

// ---- subcommand bodies ----

int cmd_sieve(const std::vector<std::string>& argv, const CommonOpts& c, uint64_t lo,
              uint64_t hi, bool list, const std::string& cache_dir) {
    Timer timer;
    json data;
    Table table;
    uint64_t count = 0;

    std::string cache_file;
    if (!cache_dir.empty())
        cache_file = cache_dir + "/pslab_" + std::to_string(lo) + "_" + std::to_string(hi) +
                     ".seg";

    std::vector<PrimeSegment> segs;
    bool cache_hit = false;
    if (!cache_file.empty()) {
        try {
            segs = read_segment_cache(cache_file);
            cache_hit = !segs.empty();
        } catch (const ResourceError&) {
            cache_hit = false;
        }
    }
    if (!cache_hit && !cache_file.empty()) {
        segs = sieve_collect(lo, hi + 1, c.sieve_cfg());
        write_segment_cache(cache_file, segs);
    }

    if (list) {
        json primes = json::array();
        table.columns = {"p"};
        auto take = [&](uint64_t p) {
            if (p > lo && p <= hi) {
                primes.push_back(p);
                table.rows.push_back({std::to_string(p)});
                ++count;
            }
        };
        if (!segs.empty()) {
            if (lo < 2 && hi >= 2) take(2);
            for (const auto& s : segs) s.for_each_odd_prime(take);
        } else {
            primes_in(lo, hi, take, c.sieve_cfg());
        }
        data["primes"] = primes;
    } else {
        if (!segs.empty()) {
            count = (lo < 2 && hi >= 2) ? 1 : 0;
            for (const auto& s : segs) count += s.count_odd_in(lo, hi);
        } else {
            count = count_primes(lo, hi, c.sieve_cfg());
        }
        table.columns = {"lo", "hi", "count"};
        table.rows.push_back({std::to_string(lo), std::to_string(hi), std::to_string(count)});
    }
    data["command"] = "sieve";
    data["lo"] = lo;
    data["hi"] = hi;
    data["count"] = count;
    data["cache_hit"] = cache_hit;
    data["kernel"] = kernels::active_impl_name();
    return finish(c, argv, "sieve",
                  {{"lo", std::to_string(lo)},
                   {"hi", std::to_string(hi)},
                   {"list", list ? "1" : "0"},
                   {"cache_dir", cache_dir}},
                  std::nullopt, timer, data, &table);
}

int cmd_stats(const std::vector<std::string>& argv, const CommonOpts& c, uint64_t x,
              double lambda, uint32_t m_max) {
    Timer timer;
    auto hist = window_histogram(x, lambda, c.sieve_cfg(), m_max);
    json data;
    data["command"] = "stats";
    data["x"] = x;
    data["lambda"] = round12(lambda);
    data["tie_tolerance"] = kTieTol;
    data["n_start"] = 1;
    data["m_max"] = hist.m_max;
    data["overflow"] = hist.overflow;
    data["n_total"] = hist.n_total;
    data["mean"] = round12(hist.mean());
    data["tv_distance"] = round12(tv_distance(hist, lambda));
    data["chi_square_m0_8"] = round12(poisson_chi_square(hist, lambda, 8));
    data["rows"] = histogram_rows(hist, lambda);
    Table table = histogram_table(hist, lambda);
    return finish(c, argv, "stats",
                  {{"x", std::to_string(x)}, {"lambda", fmt_double(lambda)},
                   {"m_max", std::to_string(m_max)}},
                  std::nullopt, timer, data, &table);
}

int cmd_gaps(const std::vector<std::string>& argv, const CommonOpts& c, uint64_t x,
             const std::string& edges_csv, bool log_p) {
    Timer timer;
    auto edges = parse_double_list(edges_csv, "edges");
    auto gh = gap_histogram(x, edges, log_p, c.sieve_cfg());
    json data, rows = json::array();
    Table table;
    table.columns = {"bin_lo", "bin_hi", "count", "frequency", "exponential_mass"};
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        double freq = static_cast<double>(gh.bin_counts[i]) / gh.n_total;
        double mass = exponential_mass(edges[i], edges[i + 1]);
        rows.push_back({{"bin_lo", round12(edges[i])},
                        {"bin_hi", round12(edges[i + 1])},
                        {"count", gh.bin_counts[i]},
                        {"frequency", round12(freq)},
                        {"exponential_mass", round12(mass)}});
        table.rows.push_back({fmt_double(edges[i]), fmt_double(edges[i + 1]),
                              std::to_string(gh.bin_counts[i]), fmt_double(freq),
                              fmt_double(mass)});
    }
    data["command"] = "gaps";
    data["x"] = x;
    data["normalization"] = log_p ? "log_p_n" : "log_n";
    data["n_total"] = gh.n_total;
    data["out_of_range"] = gh.out_of_range();
    data["rows"] = rows;
    return finish(c, argv, "gaps",
                  {{"x", std::to_string(x)}, {"edges", edges_csv},
                   {"normalization", log_p ? "log_p_n" : "log_n"}},
                  std::nullopt, timer, data, &table);
}

int cmd_cramer(const std::vector<std::string>& argv, const CommonOpts& c, uint64_t x,
               double lambda, std::optional<uint64_t> seed_opt, bool compare, bool per_n) {
    Timer timer;
    uint64_t seed = ensure_seed(seed_opt);
    json data;
    data["command"] = "cramer";
    data["model"] = "cramer";
    data["x"] = x;
    data["lambda"] = round12(lambda);
    data["seed"] = seed;
    data["per_n"] = per_n;
    data["kernel"] = kernels::active_impl_name();
    Table table;
    if (compare) {
        auto cmp = compare_model_vs_primes(x, lambda, seed, c.sieve_cfg());
        data["model_tv"] = round12(cmp.model_tv);
        data["primes_tv"] = round12(cmp.primes_tv);
        data["chi_square"] = round12(cmp.chi_square);
        data["model_rows"] = histogram_rows(cmp.model.histogram, lambda);
        data["prime_rows"] = histogram_rows(cmp.primes, lambda);
        table = histogram_table(cmp.model.histogram, lambda);
    } else {
        auto run = simulate(x, lambda, seed, per_n, std::max(1, c.threads));
        data["p"] = round12(run.p);
        data["window_len"] = run.window_len;
        data["mean"] = round12(run.histogram.mean());
        data["tv_distance"] = round12(tv_distance(run.histogram, lambda));
        data["rows"] = histogram_rows(run.histogram, lambda);
        table = histogram_table(run.histogram, lambda);
    }
    return finish(c, argv, "cramer",
                  {{"x", std::to_string(x)},
                   {"lambda", fmt_double(lambda)},
                   {"compare", compare ? "1" : "0"},
                   {"per_n", per_n ? "1" : "0"}},
                  seed, timer, data, &table);
}

int cmd_admissible(const std::vector<std::string>& argv, const CommonOpts& c,
                   const std::string& offsets_csv, const std::string& forms_file) {
    Timer timer;
    LinearSystem sys = system_from_options(offsets_csv, forms_file, "");
    auto obstruction = admissibility_obstruction(sys);
    if (obstruction)
        std::cout << "not admissible (p=" << *obstruction << ")\n";
    else
        std::cout << "admissible\n";
    json data;
    data["command"] = "admissible";
    data["k"] = sys.forms.size();
    data["admissible"] = !obstruction;
    if (obstruction) data["obstruction_p"] = *obstruction;
    if (c.out_path.empty()) return 0;  // verdict already on stdout
    return finish(c, argv, "admissible",
                  {{"offsets", offsets_csv}, {"forms", forms_file}}, std::nullopt, timer,
                  data);
}

int cmd_construct(const std::vector<std::string>& argv, const CommonOpts& c, int k, double y,
                  double z, uint64_t B, double lambda, int m, double C,
                  std::optional<uint64_t> seed_opt, const std::string& targets_csv,
                  std::optional<double> derive_x) {
    Timer timer;
    uint64_t seed = ensure_seed(seed_opt);
    ConstructionParams params;
    if (derive_x) {
        auto check = derive_params(*derive_x, lambda, m, C);
        if (!check.ok) {
            json diag;
            diag["command"] = "construct";
            diag["ok"] = false;
            diag["violated"] = check.violated;
            diag["v"] = round12(check.params.v);
            diag["y"] = round12(check.params.y);
            diag["z"] = round12(check.params.z);
            diag["k"] = check.params.k;
            std::cerr << "parameter formulas infeasible at x=" << *derive_x << ": "
                      << check.violated << "\n";
            emit_text(to_json_text(diag), c.out_path);
            return 3;
        }
        params = check.params;
    } else {
        params = override_params(k, y, z, B, lambda, m, C);
    }
    std::vector<double> targets;
    if (!targets_csv.empty()) targets = parse_double_list(targets_csv, "targets");
    Construction cons = make_construction(params, targets, seed);

    std::string text = cons.to_json() + "\n";
    auto outputs = emit_text(text, c.out_path);
    if (!c.out_path.empty() || !c.manifest_path.empty()) {
        RunManifest man;
        man.command = "construct";
        man.parameters = {{"k", std::to_string(params.k)},   {"y", fmt_double(params.y)},
                          {"z", fmt_double(params.z)},       {"B", std::to_string(params.B)},
                          {"lambda", fmt_double(params.lambda)}, {"targets", targets_csv}};
        man.seed = seed;
        man.wall_time_ms = timer.ms();
        man.outputs = outputs;
        man.argv = argv;
        std::string mpath =
            c.manifest_path.empty() ? c.out_path + ".manifest.json" : c.manifest_path;
        write_file(mpath, man.to_json());
    }
    return 0;
}

int cmd_verify(const std::vector<std::string>& argv, const CommonOpts& c,
               const std::string& construction_path, int samples, uint64_t max_n,
               std::optional<uint64_t> seed_opt, int rounds) {
    Timer timer;
    Construction cons = Construction::from_json(read_file(construction_path));
    uint64_t seed = ensure_seed(seed_opt);

    bool survivors_ok = verify_survivors(cons.residues, cons.params.z, cons.offsets);

    rng::Stream stream(rng::substream(seed, 0xA11D17));
    std::vector<mpz_class> ns;
    for (int i = 0; i < samples; ++i)
        ns.emplace_back(static_cast<unsigned long>(1 + stream.next_below(max_n)));
    auto report = verify_window_identity(cons, ns, rounds);

    uint64_t offset_primes = 0, offset_values = 0;
    for (const auto& rec : report.samples) {
        offset_values += rec.offset_primality.size();
        for (auto [t, prime] : rec.offset_primality) offset_primes += prime ? 1 : 0;
    }
    json data;
    data["command"] = "verify";
    data["construction"] = construction_path;
    data["survivor_identity"] = survivors_ok;
    data["samples"] = samples;
    data["max_n"] = max_n;
    data["all_certified"] = report.all_ok;
    data["offset_values_tested"] = offset_values;
    data["offset_values_prime"] = offset_primes;
    return finish(c, argv, "verify",
                  {{"construction", construction_path},
                   {"samples", std::to_string(samples)},
                   {"max_n", std::to_string(max_n)},
                   {"rounds", std::to_string(rounds)}},
                  seed, timer, data);
}

int cmd_walk(const std::vector<std::string>& argv, const CommonOpts& c,
             const std::string& construction_path, const std::string& n_str, uint64_t m,
             double x, std::optional<int64_t> walk_end, int rounds) {
    Timer timer;
    Construction cons = Construction::from_json(read_file(construction_path));
    mpz_class n;
    if (n.set_str(n_str, 10) != 0) throw ArgumentError("walk: bad --n value");
    auto res = locate(cons, n, m, x, walk_end, rounds);

    json data;
    data["command"] = "walk";
    data["n"] = n.get_str();
    data["m"] = m;
    data["j"] = res.j;
    data["N_j"] = res.N_j.get_str();
    json primes = json::array();
    for (const auto& p : res.primes_in_window) primes.push_back(p.get_str());
    data["primes_in_window"] = primes;
    data["counts"] = res.trace.counts;
    data["j_start"] = res.trace.j_start;
    data["walk_end_used"] = res.walk_end_used;
    data["step_property"] = check_step_property(res.trace);
    data["endpoint_full_checked"] = res.endpoint_full_checked;
    data["endpoint_empty_checked"] = res.endpoint_empty_checked;
    data["offsets_span_ok"] = res.offsets_span_ok;
    data["offsets_range_ok"] = res.offsets_range_ok;
    return finish(c, argv, "walk",
                  {{"construction", construction_path},
                   {"n", n_str},
                   {"m", std::to_string(m)},
                   {"x", fmt_double(x)},
                   {"rounds", std::to_string(rounds)}},
                  std::nullopt, timer, data);
}

int cmd_rich(const std::vector<std::string>& argv, const CommonOpts& c,
             const std::string& offsets_csv, const std::string& forms_file,
             const std::string& form_str, uint64_t x, uint64_t m, int rounds) {
    Timer timer;
    LinearSystem sys = system_from_options(offsets_csv, forms_file, form_str);
    uint64_t count = count_prime_rich(sys, mpz_class(static_cast<unsigned long>(x)), m, rounds);
    json data;
    data["command"] = "rich";
    data["x"] = x;
    data["m"] = m;
    data["k"] = sys.forms.size();
    data["count"] = count;
    return finish(c, argv, "rich",
                  {{"offsets", offsets_csv},
                   {"forms", forms_file},
                   {"x", std::to_string(x)},
                   {"m", std::to_string(m)}},
                  std::nullopt, timer, data);
}

int cmd_discrepancy(const std::vector<std::string>& argv, const CommonOpts& c,
                    const std::string& form_str, uint64_t x, uint64_t Q, uint64_t B, double E,
                    bool lower_bound) {
    Timer timer;
    LinearForm form = parse_form_string(form_str);
    json data;
    data["command"] = "discrepancy";
    data["form_g"] = form.g.get_str();
    data["form_h"] = form.h.get_str();
    data["x"] = x;
    Table table;
    if (lower_bound) {
        auto rep = lower_bound_check(form, x, B, c.sieve_cfg());
        data["B"] = B;
        data["main_count"] = rep.main_count;
        data["left"] = round12(rep.left);
        data["right"] = round12(rep.right);
        data["holds"] = rep.holds;
        table.columns = {"left", "right", "holds"};
        table.rows.push_back({fmt_double(rep.left), fmt_double(rep.right),
                              rep.holds ? "1" : "0"});
    } else {
        auto rep = discrepancy_sum(form, x, Q, B, E, c.sieve_cfg());
        data["Q"] = Q;
        data["B"] = B;
        data["reference_exponent"] = round12(E);
        data["main_count"] = rep.main_count;
        data["total"] = round12(rep.total);
        data["reference_ratio"] = round12(rep.reference_ratio);
        json rows = json::array();
        table.columns = {"q", "a_star", "max_abs_delta"};
        for (const auto& row : rep.rows) {
            json r;
            r["q"] = row.q;
            if (row.a_star) r["a_star"] = *row.a_star;
            r["max_abs_delta"] = round12(row.max_abs_delta);
            rows.push_back(r);
            table.rows.push_back({std::to_string(row.q),
                                  row.a_star ? std::to_string(*row.a_star) : "",
                                  fmt_double(row.max_abs_delta)});
        }
        data["rows"] = rows;
    }
    return finish(c, argv, "discrepancy",
                  {{"form", form_str},
                   {"x", std::to_string(x)},
                   {"Q", std::to_string(Q)},
                   {"B", std::to_string(B)},
                   {"E", fmt_double(E)},
                   {"lower_bound", lower_bound ? "1" : "0"}},
                  std::nullopt, timer, data, &table);
}

int cmd_report(const std::vector<std::string>& argv, const CommonOpts& c,
               const std::string& construction_path, double x) {
    Timer timer;
    Construction cons = Construction::from_json(read_file(construction_path));
    auto rep = theorem_report(cons, x);
    json data;
    data["command"] = "report";
    data["x"] = round12(x);
    data["X"] = rep.X.get_str();
    data["log_X"] = round12(rep.log_X);
    data["epsilon_X"] = round12(rep.epsilon_X);
    data["log_X_power"] = round12(rep.log_X_power);
    data["log_claimed_count"] = round12(rep.log_claimed_count);
    data["log_g"] = round12(rep.log_g);
    data["y"] = round12(rep.y);
    data["C"] = round12(cons.params.C);
    data["k"] = cons.params.k;
    return finish(c, argv, "report",
                  {{"construction", construction_path}, {"x", fmt_double(x)}}, std::nullopt,
                  timer, data);
}

int dispatch(const std::vector<std::string>& argv);

int cmd_replay(const std::string& manifest_path) {
    auto man = RunManifest::from_json_text(read_file(manifest_path));
    if (man.argv.empty()) throw ArgumentError("replay: manifest has no argv record");
    return dispatch(man.argv);
}

int dispatch(const std::vector<std::string>& argv) {
    CLI::App app{"prime statistics laboratory"};
    app.require_subcommand(1);

    // sieve
    auto* sieve_cmd = app.add_subcommand("sieve", "Count or list primes in (lo, hi]");
    CommonOpts sieve_c;
    uint64_t lo = 0, hi = 0;
    bool list = false;
    std::string cache_dir;
    sieve_cmd->add_option("--lo", lo, "Interval left end (exclusive)");
    sieve_cmd->add_option("--hi", hi, "Interval right end (inclusive)")->required();
    sieve_cmd->add_flag("--list", list, "List primes instead of counting");
    sieve_cmd->add_option("--cache-dir", cache_dir, "Segment cache directory");
    add_common(sieve_cmd, sieve_c);

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Window-count histogram vs Poisson");
    CommonOpts stats_c;
    uint64_t stats_x = 0;
    double stats_lambda = 1.0;
    uint32_t m_max = 64;
    stats_cmd->add_option("--x", stats_x, "Count windows for n <= x")->required();
    stats_cmd->add_option("--lambda", stats_lambda, "Window length factor")->required();
    stats_cmd->add_option("--mmax", m_max, "Histogram clamp");
    add_common(stats_cmd, stats_c);

    // gaps
    auto* gaps_cmd = app.add_subcommand("gaps", "Normalized prime gap histogram");
    CommonOpts gaps_c;
    uint64_t gaps_x = 0;
    std::string edges_csv = "0,0.25,0.5,0.75,1,1.5,2,3,4,6";
    bool log_p = false;
    gaps_cmd->add_option("--x", gaps_x, "Use primes <= x")->required();
    gaps_cmd->add_option("--edges", edges_csv, "Bin edges, ascending");
    gaps_cmd->add_flag("--log-p", log_p, "Normalize by log p_n instead of log n");
    add_common(gaps_cmd, gaps_c);

    // cramer
    auto* cramer_cmd = app.add_subcommand("cramer", "Bernoulli model simulation");
    CommonOpts cramer_c;
    uint64_t cramer_x = 0;
    double cramer_lambda = 1.0;
    std::optional<uint64_t> cramer_seed;
    bool compare = false, per_n = false;
    cramer_cmd->add_option("--x", cramer_x, "Model size")->required();
    cramer_cmd->add_option("--lambda", cramer_lambda, "Window length factor")->required();
    cramer_cmd->add_option("--seed", cramer_seed, "RNG seed");
    cramer_cmd->add_flag("--compare", compare, "Also run the prime histogram and compare");
    cramer_cmd->add_flag("--per-n", per_n, "Per-index probability 1/log n");
    add_common(cramer_cmd, cramer_c);

    // admissible
    auto* adm_cmd = app.add_subcommand("admissible", "Admissibility check");
    CommonOpts adm_c;
    std::string adm_offsets, adm_forms;
    adm_cmd->add_option("--offsets", adm_offsets, "Offsets h_1,...,h_k (forms n + h_i)");
    adm_cmd->add_option("--forms", adm_forms, "File with one \"g h\" per line");
    add_common(adm_cmd, adm_c);

    // construct
    auto* con_cmd = app.add_subcommand("construct", "Residue-class construction");
    CommonOpts con_c;
    int con_k = 3;
    double con_y = 29, con_z = 60, con_lambda = 1.0, con_C = 1.0;
    int con_m = 0;
    uint64_t con_B = 1;
    std::optional<uint64_t> con_seed;
    std::string targets_csv;
    std::optional<double> derive_x;
    con_cmd->add_option("--k", con_k, "Survivor count");
    con_cmd->add_option("--y", con_y, "Sieve primes p <= y");
    con_cmd->add_option("--z", con_z, "Survivors live in [1, z]");
    con_cmd->add_option("--B", con_B, "Excluded modulus (primes dividing B are skipped)");
    con_cmd->add_option("--lambda", con_lambda, "Window length factor (for betas)");
    con_cmd->add_option("--m", con_m, "Target prime count");
    con_cmd->add_option("--C", con_C, "Sieve-theorem constant");
    con_cmd->add_option("--seed", con_seed, "RNG seed for restarts");
    con_cmd->add_option("--targets", targets_csv, "Preferred survivor positions");
    con_cmd->add_option("--x", derive_x, "Derive (v,y,z) from x instead of overrides");
    add_common(con_cmd, con_c);

    // verify
    auto* ver_cmd = app.add_subcommand("verify", "Window identity certificates");
    CommonOpts ver_c;
    std::string ver_path;
    int ver_samples = 100, ver_rounds = 40;
    uint64_t ver_max_n = 1000000;
    std::optional<uint64_t> ver_seed;
    ver_cmd->add_option("--construction", ver_path, "Construction JSON")->required();
    ver_cmd->add_option("--samples", ver_samples, "Random n to audit");
    ver_cmd->add_option("--max-n", ver_max_n, "Sample n uniformly from [1, max-n]");
    ver_cmd->add_option("--seed", ver_seed, "Sampling seed");
    ver_cmd->add_option("--rounds", ver_rounds, "Probabilistic primality rounds");
    add_common(ver_cmd, ver_c);

    // walk
    auto* walk_cmd = app.add_subcommand("walk", "Intermediate-value interval walk");
    CommonOpts walk_c;
    std::string walk_path, walk_n;
    uint64_t walk_m = 0;
    double walk_x = 0;
    std::optional<int64_t> walk_end;
    int walk_rounds = 40;
    walk_cmd->add_option("--construction", walk_path, "Construction JSON")->required();
    walk_cmd->add_option("--n", walk_n, "Sample n (decimal)")->required();
    walk_cmd->add_option("--m", walk_m, "Target window prime count")->required();
    walk_cmd->add_option("--x", walk_x, "Reference x for offset inequalities");
    walk_cmd->add_option("--walk-end", walk_end, "Override the walk end index");
    walk_cmd->add_option("--rounds", walk_rounds, "Probabilistic primality rounds");
    add_common(walk_cmd, walk_c);

    // rich
    auto* rich_cmd = app.add_subcommand("rich", "Count n in [x, 2x) with >= m prime forms");
    CommonOpts rich_c;
    std::string rich_offsets, rich_forms, rich_form;
    uint64_t rich_x = 0, rich_m = 0;
    int rich_rounds = 40;
    rich_cmd->add_option("--offsets", rich_offsets, "Offsets shorthand");
    rich_cmd->add_option("--forms", rich_forms, "Forms file");
    rich_cmd->add_option("--form", rich_form, "Single form \"g h\"");
    rich_cmd->add_option("--x", rich_x, "Dyadic range start")->required();
    rich_cmd->add_option("--m", rich_m, "Prime form threshold")->required();
    rich_cmd->add_option("--rounds", rich_rounds, "Probabilistic primality rounds");
    add_common(rich_cmd, rich_c);

    // discrepancy
    auto* disc_cmd = app.add_subcommand("discrepancy", "Progression discrepancy sums");
    CommonOpts disc_c;
    std::string disc_form = "1 1";
    uint64_t disc_x = 0, disc_Q = 1, disc_B = 1;
    double disc_E = 1.0;
    bool disc_lower = false;
    disc_cmd->add_option("--form", disc_form, "Form \"g h\"");
    disc_cmd->add_option("--x", disc_x, "Dyadic range start")->required();
    disc_cmd->add_option("--Q", disc_Q, "Sum max delta over q <= Q");
    disc_cmd->add_option("--B", disc_B, "Skip q with gcd(q, B) > 1");
    disc_cmd->add_option("--E", disc_E, "Reference exponent in (log x)^E");
    disc_cmd->add_flag("--lower-bound", disc_lower, "Run the density lower-bound check");
    add_common(disc_cmd, disc_c);

    // report
    auto* rep_cmd = app.add_subcommand("report", "Headline-count bookkeeping");
    CommonOpts rep_c;
    std::string rep_path;
    double rep_x = 0;
    rep_cmd->add_option("--construction", rep_path, "Construction JSON")->required();
    rep_cmd->add_option("--x", rep_x, "Reference x")->required();
    add_common(rep_cmd, rep_c);

    // replay
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
    std::string replay_path;
    replay_cmd->add_option("--manifest", replay_path, "Manifest JSON")->required();

    std::vector<std::string> cli_args(argv.rbegin(), argv.rend());
    try {
        app.parse(cli_args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    if (sieve_cmd->parsed()) return cmd_sieve(argv, sieve_c, lo, hi, list, cache_dir);
    if (stats_cmd->parsed()) return cmd_stats(argv, stats_c, stats_x, stats_lambda, m_max);
    if (gaps_cmd->parsed()) return cmd_gaps(argv, gaps_c, gaps_x, edges_csv, log_p);
    if (cramer_cmd->parsed())
        return cmd_cramer(argv, cramer_c, cramer_x, cramer_lambda, cramer_seed, compare, per_n);
    if (adm_cmd->parsed()) return cmd_admissible(argv, adm_c, adm_offsets, adm_forms);
    if (con_cmd->parsed())
        return cmd_construct(argv, con_c, con_k, con_y, con_z, con_B, con_lambda, con_m, con_C,
                             con_seed, targets_csv, derive_x);
    if (ver_cmd->parsed())
        return cmd_verify(argv, ver_c, ver_path, ver_samples, ver_max_n, ver_seed, ver_rounds);
    if (walk_cmd->parsed())
        return cmd_walk(argv, walk_c, walk_path, walk_n, walk_m, walk_x, walk_end, walk_rounds);
    if (rich_cmd->parsed())
        return cmd_rich(argv, rich_c, rich_offsets, rich_forms, rich_form, rich_x, rich_m,
                        rich_rounds);
    if (disc_cmd->parsed())
        return cmd_discrepancy(argv, disc_c, disc_form, disc_x, disc_Q, disc_B, disc_E,
                               disc_lower);
    if (rep_cmd->parsed()) return cmd_report(argv, rep_c, rep_path, rep_x);
    if (replay_cmd->parsed()) return cmd_replay(replay_path);
    return 2;
}

}  // namespace

int run(const std::vector<std::string>& argv) {
    try {
        return dispatch(argv);
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const ConstructionError& e) {
        std::cerr << "construction failed: " << e.what() << "\n";
        if (!e.best_partial.empty()) std::cerr << "best partial: " << e.best_partial << "\n";
        return 3;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace pslab::cli
