// Command-line front end: seeded range-sum queries, benchmarks, verification,
// statistics, and the streaming-sketch application.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ers/ers.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Config {
    int d = 1;
    int log2_delta = 4;
    std::string dist = "gaussian";
    double lambda = 1.0;
    std::string mode = "kwise";
    int k = 4;
    std::string seed_hex = "01";
    std::string format = "human";
    uint64_t oracle_cap = 4096;

    ers::Seed256 seed() const { return ers::Seed256::from_hex(seed_hex); }
    ers::HashMode hash_mode() const {
        return mode == "proxy" ? ers::HashMode::truly_random_proxy
                               : ers::HashMode::kwise;
    }
    ers::Universe universe() const { return ers::Universe(d, log2_delta); }
};

void print_config(const Config& c, const std::string& subcommand) {
    std::fprintf(stderr,
                 "# %s: dist=%s d=%d log2-delta=%d lambda=%g mode=%s k=%d "
                 "seed=%s format=%s oracle-cap=%" PRIu64 "\n",
                 subcommand.c_str(), c.dist.c_str(), c.d, c.log2_delta, c.lambda,
                 c.mode.c_str(), c.k, c.seed().to_hex().c_str(), c.format.c_str(),
                 c.oracle_cap);
}

// Range syntax: one `l:u` per dimension, dimensions comma-separated.
ers::RangeD parse_range(const std::string& text, const ers::Universe& u) {
    std::vector<ers::Range1D> dims;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos)
            throw ers::format_error("range '" + part + "' is not of the form l:u");
        try {
            const uint64_t l = std::stoull(part.substr(0, colon));
            const uint64_t hi = std::stoull(part.substr(colon + 1));
            dims.push_back({l, hi});
        } catch (const std::exception&) {
            throw ers::format_error("range '" + part + "' has non-numeric bounds");
        }
    }
    if (static_cast<int>(dims.size()) != u.d)
        throw ers::format_error("expected " + std::to_string(u.d) +
                                " dimensions in range '" + text + "'");
    ers::RangeD r = ers::RangeD::from_vec(dims);
    r.validate(u);
    return r;
}

std::string format_range(const ers::RangeD& r) {
    std::string out;
    for (int t = 0; t < r.d; ++t) {
        if (t) out += ",";
        out += std::to_string(r.dims[t].l) + ":" + std::to_string(r.dims[t].u);
    }
    return out;
}

void emit_sum(const Config& c, const std::string& range_text, double value,
              bool integer_valued) {
    char val[64];
    if (integer_valued)
        std::snprintf(val, sizeof val, "%.0f", value);
    else
        std::snprintf(val, sizeof val, "%.17g", value);
    if (c.format == "csv")
        std::printf("%s,%s\n", range_text.c_str(), val);
    else if (c.format == "jsonl")
        std::printf("{\"range\":\"%s\",\"sum\":%s}\n", range_text.c_str(), val);
    else
        std::printf("S[%s) = %s\n", range_text.c_str(), val);
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

int cmd_query(const Config& cfg, const std::vector<std::string>& range_args) {
    const ers::Universe u = cfg.universe();
    std::vector<std::string> texts = range_args;
    if (texts.empty()) {
        std::string line;
        while (std::getline(std::cin, line))
            if (!line.empty()) texts.push_back(line);
    }

    std::optional<ers::GaussianErs> gaussian;
    std::optional<ers::Dst1D<>> dst;
    std::optional<ers::PoissonErs2D<>> poisson2d;
    bool integer_valued = false;

    if (cfg.dist == "gaussian") {
        gaussian.emplace(u, cfg.hash_mode(), cfg.seed(), cfg.k);
    } else if (cfg.dist == "poisson") {
        integer_valued = true;
        if (u.d == 1)
            dst.emplace(u, ers::TargetDist::poisson(cfg.lambda), cfg.seed());
        else if (u.d == 2)
            poisson2d.emplace(u, cfg.lambda, cfg.seed());
        else
            throw ers::precondition_error(
                "unsupported combination: dist=poisson requires d in {1, 2}");
    } else if (cfg.dist == "cauchy" || cfg.dist == "rademacher") {
        integer_valued = (cfg.dist == "rademacher");
        if (u.d != 1)
            throw ers::precondition_error("unsupported combination: dist=" +
                                          cfg.dist + " requires d = 1");
        dst.emplace(u,
                    cfg.dist == "cauchy" ? ers::TargetDist::cauchy()
                                         : ers::TargetDist::rademacher(),
                    cfg.seed());
    } else {
        throw ers::precondition_error("unknown distribution '" + cfg.dist + "'");
    }

    for (const std::string& text : texts) {
        const ers::RangeD r = parse_range(text, u);
        double value;
        if (gaussian)
            value = gaussian->range_sum(r);
        else if (poisson2d)
            value = static_cast<double>(poisson2d->range_sum(r));
        else
            value = dst->range_sum(r.dims[0]);
        emit_sum(cfg, format_range(r), value, integer_valued);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

int cmd_bench(const Config& cfg, int min_l, int max_l, int queries) {
    using clock = std::chrono::steady_clock;
    const ers::Prf prf(cfg.seed());
    std::printf("delta,d,mean_ns_per_query,mean_hash_evals,max_hash_evals,bound\n");
    for (int L = min_l; L <= max_l; ++L) {
        ers::Universe u(cfg.d, L);
        ers::GaussianErs g(u, cfg.hash_mode(), cfg.seed(), cfg.k);
        ers::Stream pick(prf, ers::Domain::stat_stream, static_cast<uint64_t>(L));
        uint64_t bound = 1;
        for (int t = 0; t < cfg.d; ++t) bound *= 2 * static_cast<uint64_t>(L) + 2;
        std::vector<ers::RangeD> ranges;
        for (int i = 0; i < queries; ++i) {
            ers::RangeD r;
            r.d = cfg.d;
            for (int t = 0; t < cfg.d; ++t) {
                uint64_t a = pick.next_u64() % u.delta();
                uint64_t b = pick.next_u64() % u.delta();
                if (a > b) std::swap(a, b);
                r.dims[t] = {a, b + 1};
            }
            ranges.push_back(r);
        }
        uint64_t total_evals = 0, max_evals = 0;
        double checksum = 0.0;
        const auto start = clock::now();
        for (const auto& r : ranges) {
            uint64_t evals = 0;
            checksum += g.range_sum_counted(r, evals);
            total_evals += evals;
            max_evals = std::max(max_evals, evals);
        }
        const auto stop = clock::now();
        if (max_evals > bound) {
            std::fprintf(stderr, "eval count %" PRIu64 " exceeds bound %" PRIu64 "\n",
                         max_evals, bound);
            return kExitVerifyFail;
        }
        const double ns =
            static_cast<double>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
                    .count()) /
            queries;
        std::printf("%" PRIu64 ",%d,%.1f,%.1f,%" PRIu64 ",%" PRIu64 "\n",
                    u.delta(), cfg.d, ns, static_cast<double>(total_evals) / queries,
                    max_evals, bound);
        (void)checksum;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify / stats
// ---------------------------------------------------------------------------

class Report {
public:
    void add(const ers::TestResult& r) {
        std::printf("%-44s %12.6g %12.6g %s\n", r.name.c_str(), r.statistic,
                    r.threshold, r.pass ? "PASS" : "FAIL");
        if (!r.pass) ++failures_;
    }
    void add(const std::string& name, double statistic, double threshold,
             bool pass) {
        add(ers::TestResult{name, statistic, threshold, pass, {}});
    }
    int failures() const { return failures_; }

private:
    int failures_ = 0;
};

ers::Seed256 nth_seed(const ers::Seed256& base, uint64_t i) {
    ers::Seed256 s = base;
    s.w[3] ^= i;
    return s;
}

int cmd_verify(const Config& cfg) {
    using namespace ers;
    Report report;
    const Seed256 seed = cfg.seed();
    const int L = cfg.log2_delta;

    // Sparse-vs-dense oracle equivalence, both modes, d in {1, 2}.
    for (HashMode mode : {HashMode::kwise, HashMode::truly_random_proxy}) {
        const char* mode_name = mode == HashMode::kwise ? "kwise" : "proxy";
        for (int d = 1; d <= 2; ++d) {
            Universe u(d, std::min(L, d == 1 ? 4 : 3));
            GaussianErs g(u, mode, seed, cfg.k);
            DenseRealization dr = dense_inverse_hwt(g.source(), u, cfg.oracle_cap);
            double worst = 0.0;
            Prf prf(seed);
            Stream pick(prf, Domain::stat_stream, 1);
            for (int trial = 0; trial < 300; ++trial) {
                RangeD r;
                r.d = d;
                for (int t = 0; t < d; ++t) {
                    uint64_t a = pick.next_u64() % u.delta();
                    uint64_t b = pick.next_u64() % u.delta();
                    if (a > b) std::swap(a, b);
                    r.dims[t] = {a, b + 1};
                }
                const double fast = g.range_sum(r);
                const double brute = brute_range_sum(dr, r);
                worst = std::max(worst,
                                 std::fabs(fast - brute) / (1 + std::fabs(brute)));
            }
            report.add(std::string("oracle-equivalence-") + mode_name + "-d" +
                           std::to_string(d),
                       worst, 1e-10, worst < 1e-10);
        }
    }

    // Coefficient bounds, exhaustive in 1D.
    {
        bool ok = true;
        uint64_t worst = 0;
        for (int l2 = 1; l2 <= std::min(L, 6); ++l2) {
            Universe u(1, l2);
            for (uint64_t l = 0; l < u.delta(); ++l)
                for (uint64_t hi = l + 1; hi <= u.delta(); ++hi) {
                    const auto v = haar_range_coeffs_1d({l, hi}, u);
                    worst = std::max<uint64_t>(worst, v.size());
                    if (v.size() > 2 * static_cast<size_t>(l2) + 2) ok = false;
                }
        }
        report.add("coefficient-count-bound", static_cast<double>(worst),
                   static_cast<double>(2 * std::min(L, 6) + 2), ok);
    }

    // Orthonormality.
    {
        double worst = 0.0;
        for (const Universe& u : {Universe(1, std::min(L, 4)), Universe(2, 2)}) {
            DenseHaarMatrix m(u, cfg.oracle_cap);
            for (uint64_t r = 0; r < m.size(); ++r)
                for (uint64_t c = 0; c < m.size(); ++c) {
                    double dot = 0.0;
                    for (uint64_t i = 0; i < m.size(); ++i)
                        dot += m.at(r, i) * m.at(c, i);
                    worst = std::max(worst, std::fabs(dot - (r == c ? 1.0 : 0.0)));
                }
        }
        report.add("orthonormality-max-error", worst, 1e-12, worst < 1e-12);
    }

    // Split kernels against the exact conditional tables.
    {
        bool ok = true;
        for (int64_t z = 0; z <= 12 && ok; ++z) {
            const auto table = eq1_pmf(TargetDist::poisson(1.0), z, 4);
            for (const auto& [x, p] : table)
                if (!(p == Rational(binom128(z, x), __int128{1} << z))) ok = false;
        }
        report.add("poisson-kernel-binomial-identity", ok ? 0 : 1, 0.5, ok);
        bool ok2 = true;
        for (int64_t n = 1; 2 * n <= 12 && ok2; ++n)
            for (int64_t z = -2 * n; z <= 2 * n; z += 2) {
                const auto table = eq1_pmf(TargetDist::rademacher(), z, n);
                const auto hyp = hypergeometric_pmf(2 * n, (2 * n + z) / 2, n);
                for (const auto& [k, p] : hyp)
                    if (!(table.at(2 * k - n) == p)) ok2 = false;
            }
        report.add("rademacher-kernel-hypergeometric", ok2 ? 0 : 1, 0.5, ok2);
        bool ok3 = true;
        for (int64_t sg = 0; sg <= 12 && ok3; ++sg)
            for (int64_t sh = 0; sh <= sg; ++sh)
                for (int64_t sv = 0; sv <= sg; ++sv) {
                    const auto lhs = four_way_split_pmf(sh, sv, sg);
                    const auto rhs = hypergeometric_pmf(sg, sv, sh);
                    if (lhs.size() != rhs.size()) ok3 = false;
                    else
                        for (const auto& [x, p] : lhs)
                            if (!(p == rhs.at(x))) ok3 = false;
                }
        report.add("fourway-split-hypergeometric", ok3 ? 0 : 1, 0.5, ok3);
    }

    // Paper-exact negative cases.
    {
        auto [p_uncond, p_cond] = rademacher_2x2_conditional();
        report.add("rademacher-2x2-unconditional", p_uncond.to_double(), 2.0 / 3,
                   p_uncond == Rational(2, 3));
        report.add("rademacher-2x2-conditional", p_cond.to_double(), 1.0,
                   p_cond == Rational(1, 1));
        double worst = 0.0;
        for (double z : {0.0, 1.0, 2.0}) {
            const auto g0 = cauchy_g0(z);
            worst = std::max(worst, std::fabs(g0.numeric - g0.closed_form));
        }
        report.add("cauchy-g0-quadrature", worst, 1e-6, worst < 1e-6);
    }

    // Poisson 2D against the fully materialized grid.
    {
        Universe u(2, 3);
        PoissonErs2D<> full(u, cfg.lambda, seed);
        uint64_t grid[8][8];
        for (uint64_t i = 0; i < 8; ++i)
            for (uint64_t j = 0; j < 8; ++j)
                grid[i][j] =
                    full.dyadic_sum({DyadicRange1D{3, i}, DyadicRange1D{3, j}});
        PoissonErs2D<> p(u, cfg.lambda, seed);
        Prf prf(seed);
        Stream pick(prf, Domain::stat_stream, 2);
        bool ok = true;
        for (int trial = 0; trial < 200; ++trial) {
            uint64_t l1 = pick.next_u64() % 8, u1 = pick.next_u64() % 8;
            if (l1 > u1) std::swap(l1, u1);
            uint64_t l2 = pick.next_u64() % 8, u2 = pick.next_u64() % 8;
            if (l2 > u2) std::swap(l2, u2);
            ++u1, ++u2;
            uint64_t brute = 0;
            for (uint64_t i = l1; i < u1; ++i)
                for (uint64_t j = l2; j < u2; ++j) brute += grid[i][j];
            if (p.range_sum(RangeD({{l1, u1}, {l2, u2}})) != brute) ok = false;
        }
        report.add("poisson2d-materialization-oracle", ok ? 0 : 1, 0.5, ok);
    }

    // Complexity instrumentation.
    {
        Universe u(2, 4);
        GaussianErs g(u, cfg.hash_mode(), seed, cfg.k);
        uint64_t worst = 0;
        for (uint64_t l1 = 0; l1 < 16; ++l1)
            for (uint64_t u1 = l1 + 1; u1 <= 16; ++u1)
                for (uint64_t l2 = 0; l2 < 16; ++l2)
                    for (uint64_t u2 = l2 + 1; u2 <= 16; ++u2)
                        worst = std::max(
                            worst, g.hash_evals_for(RangeD({{l1, u1}, {l2, u2}})));
        report.add("hash-eval-product-bound", static_cast<double>(worst), 100.0,
                   worst <= 100);
    }

    return report.failures() == 0 ? kExitOk : kExitVerifyFail;
}

int cmd_stats(const Config& cfg) {
    using namespace ers;
    Report report;
    const Seed256 seed = cfg.seed();

    // Coefficient marginals under the proxy hash, 10^5 distinct refs.
    {
        Universe u(1, 17);
        CoeffSource src(u, HashMode::truly_random_proxy, seed);
        std::vector<double> samples;
        samples.reserve(100000);
        CoeffRef ref;
        ref.d = 1;
        for (int m : {16, 15, 14}) {
            ref.m[0] = static_cast<int8_t>(m);
            for (uint64_t j = 0; j < (uint64_t{1} << m) && samples.size() < 100000;
                 ++j) {
                ref.j[0] = j;
                samples.push_back(src.coeff_value(ref));
            }
        }
        report.add(ks_test("gaussian-coeff-ks", samples,
                           [](double x) { return normal_cdf(x); }, 0.01));
    }

    // DST Gaussian leaves and pair correlations.
    {
        const int n_seeds = 30000;
        std::vector<std::vector<double>> leaves(8);
        for (int s = 0; s < n_seeds; ++s) {
            Dst1D<> t(Universe(1, 3), TargetDist::gaussian(), nth_seed(seed, s));
            for (uint64_t i = 0; i < 8; ++i)
                leaves[i].push_back(t.range_sum({i, i + 1}));
        }
        report.add(ks_test("dst-gaussian-leaf-ks", leaves[5],
                           [](double x) { return normal_cdf(x); }, 0.01));
        double worst = 0.0;
        for (size_t a = 0; a < 8; ++a)
            for (size_t b = a + 1; b < 8; ++b)
                worst = std::max(worst,
                                 std::fabs(pearson_corr(leaves[a], leaves[b])));
        report.add("dst-gaussian-pair-correlation", worst, 0.03, worst < 0.03);
    }

    // Poisson leaves.
    {
        const int n_seeds = 30000;
        std::map<int64_t, double> counts;
        for (int s = 0; s < n_seeds; ++s) {
            PoissonErs2D<> p(Universe(2, 2), cfg.lambda, nth_seed(seed, s));
            counts[static_cast<int64_t>(p.range_sum(RangeD({{1, 2}, {2, 3}})))] +=
                1.0;
        }
        std::vector<double> obs, expd;
        for (int64_t x = 0; x <= 14; ++x) {
            obs.push_back(counts.count(x) ? counts[x] : 0.0);
            expd.push_back(std::exp(x * std::log(cfg.lambda) - cfg.lambda -
                                    std::lgamma(x + 1.0)) *
                           n_seeds);
        }
        report.add(chi2_test("poisson2d-leaf-chi2", obs, expd, 0.01));
    }

    // Conditional independence of strips given the total (delta = 2).
    {
        const int n_seeds = 50000;
        std::map<uint64_t, std::map<std::pair<uint64_t, uint64_t>, double>> tables;
        for (int s = 0; s < n_seeds; ++s) {
            PoissonErs2D<> p(Universe(2, 1), cfg.lambda, nth_seed(seed, s));
            const uint64_t total = p.range_sum(RangeD({{0, 2}, {0, 2}}));
            if (total < 1 || total > 6) continue;
            const uint64_t sh0 = p.range_sum(RangeD({{0, 1}, {0, 2}}));
            const uint64_t sv0 = p.range_sum(RangeD({{0, 2}, {0, 1}}));
            tables[total][{sv0, sh0}] += 1.0;
        }
        double stat = 0.0, df = 0.0;
        for (const auto& [total, cells] : tables) {
            std::vector<std::vector<double>> table(
                total + 1, std::vector<double>(total + 1, 0.0));
            double mass = 0.0;
            for (const auto& [key, c] : cells) {
                table[key.first][key.second] = c;
                mass += c;
            }
            if (mass < 500) continue;
            const Chi2Stat r = chi2_independence(table);
            stat += r.statistic;
            df += r.df;
        }
        const double crit = chi2_quantile(0.99, df);
        report.add("poisson2d-conditional-independence", stat, crit, stat < crit);
    }

    return report.failures() == 0 ? kExitOk : kExitVerifyFail;
}

// ---------------------------------------------------------------------------
// sketch
// ---------------------------------------------------------------------------

int cmd_sketch(const Config& cfg, const std::string& stream_path,
               const std::string& save_path, const std::string& load_path,
               uint32_t rows, uint32_t cols) {
    std::unique_ptr<ers::Sketch> sketch;
    if (!load_path.empty()) {
        std::ifstream in(load_path, std::ios::binary);
        if (!in) {
            std::fprintf(stderr, "cannot open '%s'\n", load_path.c_str());
            return kExitIo;
        }
        sketch = std::make_unique<ers::Sketch>(ers::Sketch::load(in));
    } else {
        sketch =
            std::make_unique<ers::Sketch>(cfg.universe(), cfg.seed(), rows, cols);
    }
    const int d = sketch->universe().d;

    std::ifstream file;
    std::istream* in = &std::cin;
    if (!stream_path.empty() && stream_path != "-") {
        file.open(stream_path);
        if (!file) {
            std::fprintf(stderr, "cannot open '%s'\n", stream_path.c_str());
            return kExitIo;
        }
        in = &file;
    }

    std::string line;
    int line_no = 0;
    while (std::getline(*in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ers::StreamUpdate upd;
        try {
            upd = ers::parse_stream_record(line, d);
        } catch (const ers::format_error& e) {
            std::fprintf(stderr, "line %d: %s\n", line_no, e.what());
            return kExitIo;
        }
        if (std::holds_alternative<ers::PointUpdate>(upd)) {
            sketch->apply(std::get<ers::PointUpdate>(upd));
        } else if (std::holds_alternative<ers::RangeUpdate>(upd)) {
            sketch->apply(std::get<ers::RangeUpdate>(upd));
        } else {
            const double est = sketch->query(std::get<ers::RangeQuery>(upd).range);
            std::printf("EST %.17g\n", est);
        }
    }

    if (!save_path.empty()) {
        std::ofstream out(save_path, std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "cannot open '%s'\n", save_path.c_str());
            return kExitIo;
        }
        sketch->save(out);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seeded virtual universes of i.i.d. random variables with "
                 "polylogarithmic range-sums"};
    app.require_subcommand(1);

    Config cfg;
    app.add_option("--d", cfg.d, "Dimension count")->capture_default_str();
    app.add_option("--log2-delta", cfg.log2_delta,
                   "Universe size exponent (delta = 2^L)")
        ->capture_default_str();
    app.add_option("--dist", cfg.dist, "Target distribution")
        ->check(CLI::IsMember({"gaussian", "poisson", "cauchy", "rademacher"}))
        ->capture_default_str();
    app.add_option("--lambda", cfg.lambda, "Poisson rate per point")
        ->capture_default_str();
    app.add_option("--mode", cfg.mode, "Coefficient hashing mode")
        ->check(CLI::IsMember({"kwise", "proxy"}))
        ->capture_default_str();
    app.add_option("--k", cfg.k, "Independence order for kwise mode")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed_hex, "Master seed (hex, up to 64 digits)")
        ->envname("ERS_SEED")
        ->capture_default_str();
    app.add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"human", "csv", "jsonl"}))
        ->capture_default_str();
    app.add_option("--oracle-cap", cfg.oracle_cap,
                   "Dense-oracle size cap (delta^d rows)")
        ->capture_default_str();

    auto* query = app.add_subcommand(
        "query", "Range sums for `l:u[,l:u...]` ranges (args or stdin)");
    std::vector<std::string> range_args;
    query->add_option("ranges", range_args, "Ranges, one token per range");

    auto* bench =
        app.add_subcommand("bench", "Query-cost sweep over universe sizes (CSV)");
    int min_l = 8, max_l = 20, queries = 2000;
    bench->add_option("--min-log2-delta", min_l, "Smallest exponent")
        ->capture_default_str();
    bench->add_option("--max-log2-delta", max_l, "Largest exponent")
        ->capture_default_str();
    bench->add_option("--queries", queries, "Random queries per size")
        ->capture_default_str();

    auto* verify = app.add_subcommand(
        "verify", "Deterministic oracle-equivalence and exactness checks");
    auto* stats =
        app.add_subcommand("stats", "Statistical goodness-of-fit suites");

    auto* sketch = app.add_subcommand(
        "sketch", "Stream updates/queries through a median-of-means sketch");
    std::string stream_path, save_path, load_path;
    uint32_t rows = 5, cols = 16;
    sketch->add_option("stream", stream_path, "Update stream file ('-' = stdin)");
    sketch->add_option("--save", save_path, "Write sketch state after the stream");
    sketch->add_option("--load", load_path, "Start from saved sketch state");
    sketch->add_option("--rows", rows, "Median groups")->capture_default_str();
    sketch->add_option("--cols", cols, "Estimators per group")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (query->parsed()) {
            print_config(cfg, "query");
            return cmd_query(cfg, range_args);
        }
        if (bench->parsed()) {
            print_config(cfg, "bench");
            return cmd_bench(cfg, min_l, max_l, queries);
        }
        if (verify->parsed()) {
            print_config(cfg, "verify");
            return cmd_verify(cfg);
        }
        if (stats->parsed()) {
            print_config(cfg, "stats");
            return cmd_stats(cfg);
        }
        if (sketch->parsed()) {
            print_config(cfg, "sketch");
            return cmd_sketch(cfg, stream_path, save_path, load_path, rows, cols);
        }
    } catch (const ers::precondition_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const ers::format_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitVerifyFail;
    }
    return kExitUsage;
}
