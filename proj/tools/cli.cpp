#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "coupdoob/chain_ops.hpp"
#include "coupdoob/errors.hpp"
#include "coupdoob/exact.hpp"
#include "coupdoob/gallery.hpp"
#include "coupdoob/io.hpp"
#include "coupdoob/monte_carlo.hpp"
#include "coupdoob/report.hpp"

namespace coupdoob::cli {

namespace {

using json = nlohmann::ordered_json;

struct CommonOptions {
    std::string file;
    std::string gallery_spec;
    std::size_t n_max = 64;
    std::size_t horizon = 10000;
    std::size_t replicas = 100000;
    std::uint64_t seed = 1;
    std::string format = "table";
    std::string out_path;
    std::string expect;
    std::string pair;
    std::string kernel = "maximal";
    std::string x0;
    std::string target = "0";
};

void add_chain_source(CLI::App *cmd, CommonOptions &opt) {
    auto *file = cmd->add_option("--file", opt.file, "chain file (JSON document)");
    auto *gallery = cmd->add_option("--gallery", opt.gallery_spec,
                                    "gallery entry, e.g. two-state:0.5,0.2");
    file->excludes(gallery);
    gallery->excludes(file);
}

std::vector<double> parse_params(const std::string &text) {
    std::vector<double> params;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find(',', begin);
        if (end == std::string::npos)
            end = text.size();
        std::string token = text.substr(begin, end - begin);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw InputError("bad gallery parameter '" + token + "'");
        params.push_back(value);
        begin = end + 1;
        if (end == text.size())
            break;
    }
    return params;
}

ChainVariant load_source(const CommonOptions &opt) {
    if (!opt.file.empty())
        return load_chain_file(opt.file);
    if (!opt.gallery_spec.empty()) {
        std::size_t colon = opt.gallery_spec.find(':');
        std::string name = opt.gallery_spec.substr(0, colon);
        std::vector<double> params;
        if (colon != std::string::npos)
            params = parse_params(opt.gallery_spec.substr(colon + 1));
        return build_gallery(name, params);
    }
    throw InputError("no chain given; use --file or --gallery");
}

const FiniteChain &require_finite(const ChainVariant &chain) {
    if (const auto *finite = std::get_if<FiniteChain>(&chain))
        return *finite;
    throw InputError("this command needs a finite chain; the selected chain is countable "
                     "(use 'simulate')");
}

void check_format(const std::string &format) {
    if (format != "table" && format != "csv" && format != "json")
        throw InputError("unknown format '" + format + "' (expected table, csv or json)");
}

// Reports are assembled in memory and written once at the end.
void deliver(const std::string &text, const CommonOptions &opt, std::ostream &out) {
    if (opt.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(opt.out_path, std::ios::binary);
    if (!file)
        throw InputError("cannot write output file '" + opt.out_path + "'");
    file << text;
}

std::pair<std::size_t, std::size_t> parse_pair(const FiniteChain &chain,
                                               const std::string &text) {
    std::size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw InputError("--pair expects two comma-separated state labels");
    return {chain.index_of(text.substr(0, comma)), chain.index_of(text.substr(comma + 1))};
}

// Default coupled pair for curve/simulate: the off-diagonal pair with the
// largest one-step TV (slowest to couple), smallest indices on ties.
std::pair<std::size_t, std::size_t> default_pair(const FiniteChain &chain) {
    if (chain.size() < 2)
        throw InputError("coupled analysis needs at least two states");
    std::pair<std::size_t, std::size_t> best{0, 1};
    double best_tv = -1.0;
    for (std::size_t x = 0; x < chain.size(); ++x)
        for (std::size_t y = x + 1; y < chain.size(); ++y) {
            double tv = total_variation(chain.row_dist(x), chain.row_dist(y));
            if (tv > best_tv + 1e-15) {
                best_tv = tv;
                best = {x, y};
            }
        }
    return best;
}

CouplingKernel make_kernel(const FiniteChain &chain, const std::string &kind,
                           std::size_t select_n_max) {
    if (kind == "maximal")
        return maximal_kernel(chain);
    if (kind == "independent")
        return independent_kernel(chain);
    if (kind == "hybrid") {
        std::vector<Dist> ipms = invariant_measures(chain);
        if (ipms.size() != 1)
            throw InputError("hybrid kernel needs a unique invariant measure; found " +
                             std::to_string(ipms.size()));
        auto c = select_doeblin(chain, ipms.front(), select_n_max);
        if (!c)
            throw InputError("assumptions fail: no pair of N-step laws overlaps for N <= " +
                             std::to_string(select_n_max));
        return hybrid_kernel(chain, *c);
    }
    throw InputError("unknown kernel '" + kind + "' (expected maximal, independent or hybrid)");
}

// ----- verify ---------------------------------------------------------

std::string verdict_table(const DoobVerdict &v, const FiniteChain &chain) {
    std::ostringstream os;
    os << "states: " << chain.size() << "\n";
    os << "invariant measures (extreme): " << v.ipm_count << "\n";
    auto show = [&](const char *name, bool holds) {
        os << name << ": " << (holds ? "holds" : "fails") << "\n";
    };
    show("assumption of theorem 1 (pairwise equivalence)", v.thm1_assumption_holds);
    show("assumption of corollary 1 (pairwise non-singularity)", v.cor1_assumption_holds);
    for (std::size_t i = 0; i < v.per_ipm.size(); ++i) {
        const IpmVerdict &iv = v.per_ipm[i];
        os << "ipm #" << i << ": theorem-2 assumption on its support "
           << (iv.thm2_assumption_holds ? "holds" : "fails") << ", convergence on support "
           << (iv.conclusion_holds ? "verified" : "not observed") << "\n";
    }
    os << "conclusion for every start state: " << (v.conclusion_allx ? "verified" : "no")
       << "\n";
    os << "conclusion mu-a.e.: " << (v.conclusion_mu_ae ? "verified" : "no") << "\n";
    os << "classification: " << v.classification << "\n";
    return os.str();
}

std::string verdict_csv(const DoobVerdict &v) {
    std::ostringstream os;
    os << "field,value\n";
    os << "classification," << v.classification << "\n";
    os << "ipm_count," << v.ipm_count << "\n";
    os << "thm1_assumption_holds," << (v.thm1_assumption_holds ? 1 : 0) << "\n";
    os << "cor1_assumption_holds," << (v.cor1_assumption_holds ? 1 : 0) << "\n";
    os << "conclusion_allx," << (v.conclusion_allx ? 1 : 0) << "\n";
    os << "conclusion_mu_ae," << (v.conclusion_mu_ae ? 1 : 0) << "\n";
    return os.str();
}

int cmd_verify(const CommonOptions &opt, std::ostream &out, std::ostream &err) {
    check_format(opt.format);
    ChainVariant source = load_source(opt);
    const FiniteChain &chain = require_finite(source);
    if (chain.size() * chain.size() > kExactPairCap)
        throw InputError("chain exceeds the exact-mode cap; use 'simulate'");
    DoobVerdict verdict = verify_doob(chain, opt.n_max, opt.horizon);

    std::string text;
    if (opt.format == "json")
        text = verdict_to_json(verdict, *chain.space());
    else if (opt.format == "csv")
        text = verdict_csv(verdict);
    else
        text = verdict_table(verdict, chain);
    deliver(text, opt, out);

    if (!opt.expect.empty() && opt.expect != verdict.classification) {
        err << "expected classification '" << opt.expect << "', got '"
            << verdict.classification << "'\n";
        return 2;
    }
    return 0;
}

// ----- curve ----------------------------------------------------------

int cmd_curve(const CommonOptions &opt, std::ostream &out, std::ostream &) {
    check_format(opt.format);
    ChainVariant source = load_source(opt);
    const FiniteChain &chain = require_finite(source);
    if (chain.size() * chain.size() > kExactPairCap)
        throw InputError("chain exceeds the exact-mode cap; use 'simulate'");

    std::vector<Dist> ipms = invariant_measures(chain);
    if (ipms.size() != 1)
        throw InputError("curve needs a unique invariant measure; found " +
                         std::to_string(ipms.size()) + " (see 'verify')");
    const Dist &mu = ipms.front();

    std::vector<std::vector<double>> tv_curves;
    for (std::size_t x = 0; x < chain.size(); ++x)
        tv_curves.push_back(convergence_curve(chain, x, mu, opt.n_max));

    auto pair = opt.pair.empty() ? default_pair(chain) : parse_pair(chain, opt.pair);
    CouplingKernel kernel = make_kernel(chain, opt.kernel, 5);
    const std::size_t multiplier = kernel.step_multiplier();
    CouplingAnalysis analysis =
        evolve_coupled(kernel, PairKey{pair.first, pair.second}, opt.n_max / multiplier);

    // Base-step view of the kernel-step tail: tail(n) = tail_kernel(n / N).
    // The pair TV column is exact at every base step, so the slack column
    // stays valid between kernel steps because TV is non-increasing.
    auto tail_at = [&](std::size_t n) { return analysis.uncoupled_tail[n / multiplier]; };
    std::vector<double> pair_tv;
    {
        Dist d1 = n_step(chain, pair.first, 0), d2 = n_step(chain, pair.second, 0);
        for (std::size_t n = 0; n <= opt.n_max; ++n) {
            if (n > 0) {
                d1 = n_step(chain, d1, 1);
                d2 = n_step(chain, d2, 1);
            }
            pair_tv.push_back(total_variation(d1, d2));
        }
    }

    std::ostringstream os;
    if (opt.format == "json") {
        json doc;
        doc["pair"] = {chain.space()->label(pair.first), chain.space()->label(pair.second)};
        doc["kernel"] = opt.kernel;
        doc["step_multiplier"] = multiplier;
        json rows = json::array();
        for (std::size_t n = 0; n <= opt.n_max; ++n) {
            json row;
            row["n"] = n;
            json tv = json::object();
            for (std::size_t x = 0; x < chain.size(); ++x)
                tv[chain.space()->label(x)] = tv_curves[x][n];
            row["tv_to_mu"] = std::move(tv);
            row["pair_tv"] = pair_tv[n];
            row["uncoupled_tail"] = tail_at(n);
            row["bound_slack"] = 2.0 * tail_at(n) - pair_tv[n];
            rows.push_back(std::move(row));
        }
        doc["rows"] = std::move(rows);
        os << doc.dump(2) << "\n";
    } else {
        const char sep = opt.format == "csv" ? ',' : '\t';
        os << "n";
        for (std::size_t x = 0; x < chain.size(); ++x)
            os << sep << "tv_to_mu:" << chain.space()->label(x);
        os << sep << "pair_tv" << sep << "uncoupled_tail" << sep << "bound_slack" << "\n";
        for (std::size_t n = 0; n <= opt.n_max; ++n) {
            os << n;
            for (std::size_t x = 0; x < chain.size(); ++x)
                os << sep << format_double(tv_curves[x][n]);
            os << sep << format_double(pair_tv[n]);
            os << sep << format_double(tail_at(n));
            os << sep << format_double(2.0 * tail_at(n) - pair_tv[n]);
            os << "\n";
        }
    }
    deliver(os.str(), opt, out);
    return 0;
}

// ----- simulate -------------------------------------------------------

struct SimRow {
    std::string metric;
    std::string start;
    std::string target;
    std::optional<std::size_t> n;
    double estimate;
    std::optional<double> stderr_;
    std::size_t n_samples;
};

int cmd_simulate(const CommonOptions &opt, std::ostream &out, std::ostream &) {
    check_format(opt.format);
    if (opt.replicas < 1)
        throw InputError("simulate needs --replicas >= 1");
    ChainVariant chain = load_source(opt);
    std::vector<SimRow> rows;

    if (const auto *countable = std::get_if<CountableChain>(&chain)) {
        if (opt.x0.empty())
            throw InputError("simulate on a countable chain needs --x0");
        std::uint64_t x0 = 0, target = 0;
        auto parse_u64 = [](const std::string &text, const char *what) {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc() || ptr != text.data() + text.size())
                throw InputError(std::string(what) + " must be a nonnegative integer, got '" +
                                 text + "'");
            return v;
        };
        x0 = parse_u64(opt.x0, "--x0");
        target = parse_u64(opt.target, "--target");
        McEstimate hit =
            estimate_hit_probability(*countable, x0, target, opt.horizon, opt.replicas, opt.seed);
        rows.push_back({"hit_probability", opt.x0, opt.target, std::nullopt, hit.point,
                        hit.stderr_, hit.n_samples});
        // When the target is absorbing, mass that never reaches it stays
        // away forever, so 2(1 - hit) bounds lim ||P_n(x0,.) - delta|| from
        // below.
        CountableChain::Row target_row = countable->row(target);
        bool absorbing = target_row.size() == 1 && target_row.front().target == target;
        if (absorbing)
            rows.push_back({"tv_lower_bound", opt.x0, opt.target, std::nullopt,
                            2.0 * (1.0 - hit.point), std::nullopt, hit.n_samples});
    } else {
        const FiniteChain &finite = std::get<FiniteChain>(chain);
        if (!opt.x0.empty()) {
            std::size_t x0 = finite.index_of(opt.x0);
            std::size_t target = finite.index_of(opt.target);
            McEstimate hit = estimate_hit_probability(finite, x0, target, opt.horizon,
                                                      opt.replicas, opt.seed);
            rows.push_back({"hit_probability", opt.x0, opt.target, std::nullopt, hit.point,
                            hit.stderr_, hit.n_samples});
        }
        auto pair = opt.pair.empty() ? default_pair(finite) : parse_pair(finite, opt.pair);
        CouplingKernel kernel = make_kernel(finite, opt.kernel, 5);
        std::size_t tail_steps = std::min<std::size_t>(opt.n_max, 50);
        auto tail = empirical_uncoupled_tail(kernel, PairKey{pair.first, pair.second},
                                             tail_steps, opt.replicas, opt.seed);
        for (std::size_t n = 0; n < tail.size(); ++n)
            rows.push_back({"uncoupled_tail", finite.space()->label(pair.first),
                            finite.space()->label(pair.second), n, tail[n].point,
                            tail[n].stderr_, tail[n].n_samples});
    }

    std::ostringstream os;
    if (opt.format == "json") {
        json doc = json::array();
        for (const SimRow &r : rows) {
            json item;
            item["metric"] = r.metric;
            item["start"] = r.start;
            item["target"] = r.target;
            if (r.n)
                item["n"] = *r.n;
            item["estimate"] = r.estimate;
            if (r.stderr_)
                item["stderr"] = *r.stderr_;
            item["n_samples"] = r.n_samples;
            doc.push_back(std::move(item));
        }
        os << doc.dump(2) << "\n";
    } else {
        const char sep = opt.format == "csv" ? ',' : '\t';
        os << "metric" << sep << "start" << sep << "target" << sep << "n" << sep << "estimate"
           << sep << "stderr" << sep << "n_samples\n";
        for (const SimRow &r : rows) {
            os << r.metric << sep << r.start << sep << r.target << sep;
            if (r.n)
                os << *r.n;
            os << sep << format_double(r.estimate) << sep;
            if (r.stderr_)
                os << format_double(*r.stderr_);
            os << sep << r.n_samples << "\n";
        }
    }
    deliver(os.str(), opt, out);
    return 0;
}

// ----- gallery --------------------------------------------------------

int cmd_gallery_list(const CommonOptions &opt, std::ostream &out) {
    check_format(opt.format);
    std::ostringstream os;
    if (opt.format == "json") {
        json doc = json::array();
        for (const GalleryEntry &e : gallery_entries()) {
            json item;
            item["name"] = e.name;
            item["signature"] = e.signature;
            item["kind"] = e.countable ? "countable" : "finite";
            item["summary"] = e.summary;
            if (e.expected.classification)
                item["expected_classification"] = *e.expected.classification;
            item["claim"] = e.expected.claim;
            doc.push_back(std::move(item));
        }
        os << doc.dump(2) << "\n";
    } else {
        const char sep = opt.format == "csv" ? ',' : '\t';
        os << "name" << sep << "kind" << sep << "signature" << sep << "summary\n";
        for (const GalleryEntry &e : gallery_entries())
            os << e.name << sep << (e.countable ? "countable" : "finite") << sep << e.signature
               << sep << e.summary << "\n";
    }
    deliver(os.str(), opt, out);
    return 0;
}

int cmd_gallery_show(const CommonOptions &opt, const std::string &name, std::ostream &out) {
    const GalleryEntry *entry = find_gallery_entry(name);
    if (!entry)
        throw InputError("unknown gallery entry '" + name + "'");
    std::ostringstream os;
    os << entry->name << ": " << entry->summary << "\n";
    os << "claim: " << entry->expected.claim << "\n";
    if (!entry->countable) {
        ChainVariant chain = build_gallery(name, name == "two-state"
                                                     ? std::vector<double>{0.5, 0.2}
                                                     : std::vector<double>{});
        const FiniteChain &finite = std::get<FiniteChain>(chain);
        if (name == "two-state")
            os << "shown with default parameters a=0.5, b=0.2\n";
        os << "states:";
        for (const std::string &label : finite.space()->labels())
            os << " " << label;
        os << "\nrows:\n";
        for (std::size_t x = 0; x < finite.size(); ++x) {
            os << "  " << finite.space()->label(x) << ": (";
            for (std::size_t y = 0; y < finite.size(); ++y)
                os << (y ? ", " : "") << format_double(finite.probability(x, y));
            os << ")\n";
        }
    } else {
        CountableChain countable = std::get<CountableChain>(build_gallery(name));
        os << "rule: " << countable.description() << "\n";
        os << "first rows:\n";
        for (std::uint64_t s = 0; s <= 3; ++s) {
            os << "  " << s << ":";
            for (const CountableChain::Entry &e : countable.row(s))
                os << " (" << e.target << ": " << format_double(e.probability) << ")";
            os << "\n";
        }
    }
    deliver(os.str(), opt, out);
    return 0;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"coupdoob - Markov chain coupling laboratory"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string gallery_show_name;

    auto add_numeric = [&](CLI::App *cmd, bool mc) {
        cmd->add_option("--n-max", opt.n_max, "step bound for assumption checks and curves");
        cmd->add_option("--horizon", opt.horizon, "step bound for convergence / simulation");
        if (mc) {
            cmd->add_option("--replicas", opt.replicas, "Monte Carlo replicas");
            cmd->add_option("--seed", opt.seed, "RNG seed");
        }
        cmd->add_option("--format", opt.format, "table, csv or json");
        cmd->add_option("--out", opt.out_path, "write the report to this file");
    };

    CLI::App *verify = app.add_subcommand("verify", "classify a chain against the "
                                                    "uniqueness/convergence theorems");
    add_chain_source(verify, opt);
    add_numeric(verify, false);
    verify->add_option("--expect", opt.expect,
                       "expected classification; mismatch exits with status 2");

    CLI::App *curve = app.add_subcommand("curve", "exact TV convergence and coupling-tail "
                                                  "curves");
    add_chain_source(curve, opt);
    add_numeric(curve, false);
    curve->add_option("--pair", opt.pair, "coupled start pair 'x,y' (default: max one-step TV)");
    curve->add_option("--kernel", opt.kernel, "maximal, independent or hybrid");

    CLI::App *simulate = app.add_subcommand("simulate", "seeded Monte Carlo estimates");
    add_chain_source(simulate, opt);
    add_numeric(simulate, true);
    simulate->add_option("--x0", opt.x0, "start state for hit-probability estimates");
    simulate->add_option("--target", opt.target, "target state (default 0)");
    simulate->add_option("--pair", opt.pair, "coupled start pair 'x,y'");
    simulate->add_option("--kernel", opt.kernel, "maximal, independent or hybrid");

    CLI::App *gallery = app.add_subcommand("gallery", "named chains from the gallery");
    CLI::App *gallery_list = gallery->add_subcommand("list", "list entries");
    gallery_list->add_option("--format", opt.format, "table, csv or json");
    gallery_list->add_option("--out", opt.out_path, "write the report to this file");
    CLI::App *gallery_show = gallery->add_subcommand("show", "print one entry");
    gallery_show->add_option("name", gallery_show_name, "entry name")->required();
    gallery_show->add_option("--out", opt.out_path, "write the report to this file");
    gallery->require_subcommand(1);

    std::vector<const char *> argv;
    argv.push_back("coupdoob");
    for (const std::string &a : args)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (verify->parsed())
            return cmd_verify(opt, out, err);
        if (curve->parsed())
            return cmd_curve(opt, out, err);
        if (simulate->parsed())
            return cmd_simulate(opt, out, err);
        if (gallery->parsed()) {
            if (gallery_list->parsed())
                return cmd_gallery_list(opt, out);
            return cmd_gallery_show(opt, gallery_show_name, out);
        }
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no command\n";
    return 1;
}

} // namespace coupdoob::cli
