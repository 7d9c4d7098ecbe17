#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcount/counting.hpp"
#include "pcount/oracles.hpp"

namespace {

using pcount::i128;
using pcount::u64;
using json = nlohmann::ordered_json;

constexpr int exit_usage = 2;
constexpr int exit_range = 3;
constexpr int exit_mismatch = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accepts plain decimals, 1e9 and 10^9.
u64 parse_n(const std::string& text) {
    auto digits = [&](const std::string& s) {
        if (s.empty() || s.size() > 20 || s.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError("not a non-negative integer: " + text);
        const unsigned long long v = std::stoull(s);
        return static_cast<u64>(v);
    };
    auto power = [&](u64 base, u64 exp) {
        unsigned __int128 v = 1;
        for (u64 i = 0; i < exp; ++i) {
            v *= base;
            if (v > ~u64{0}) throw UsageError("value out of range: " + text);
        }
        return static_cast<u64>(v);
    };
    try {
        if (auto e = text.find_first_of("eE"); e != std::string::npos)
            return static_cast<u64>(static_cast<unsigned __int128>(digits(text.substr(0, e))) *
                                    power(10, digits(text.substr(e + 1))));
        if (auto c = text.find('^'); c != std::string::npos)
            return power(digits(text.substr(0, c)), digits(text.substr(c + 1)));
        return digits(text);
    } catch (const std::out_of_range&) {
        throw UsageError("value out of range: " + text);
    }
}

struct Options {
    std::string fn;
    std::string n_text;
    unsigned power = 1;
    u64 modulus = 0;
    u64 residue = 0;
    std::string oracle_fn;
    std::string from = "1e6", to = "1e8";
    double factor = 10;
    std::string bench_fn = "pi";
    bool json = false;
    bool verify = false;
    std::string verify_limit = "1e8";
    std::string moduli = "primary";
    std::string cutoff;
};

pcount::ResultBundle run_main(const std::string& fn, u64 n, const Options& o, const pcount::Config& c) {
    if (fn == "pi") return pcount::count_primes(n, c);
    if (fn == "mertens") return pcount::mertens(n, c);
    if (fn == "sum-primes") return pcount::sum_over_primes(n, pcount::MultiplicativeWeight::power(o.power), c);
    if (fn == "pi-mod") return pcount::count_primes_mod(n, o.modulus, o.residue, c);
    if (fn == "squarefree") return pcount::count_squarefree(n, c);
    if (fn == "totient-sum") return pcount::totient_sum(n, c);
    throw UsageError("unknown function: " + fn);
}

i128 run_oracle(const std::string& fn, u64 n, const Options& o) {
    namespace orc = pcount::oracle;
    if (fn == "pi") return orc::pi_naive(n);
    if (fn == "mertens") return orc::mertens_naive(n);
    if (fn == "sum-primes") return orc::sum_primes_naive(n, o.power);
    if (fn == "pi-mod") {
        if (o.modulus == 0) throw UsageError("pi-mod needs --modulus");
        return orc::pi_mod_naive(n, o.modulus, o.residue);
    }
    if (fn == "squarefree") return orc::sqfree_naive(n);
    if (fn == "totient-sum") return orc::totient_sum_naive(n);
    throw UsageError("unknown function: " + fn);
}

json bundle_json(const pcount::ResultBundle& b) {
    json j;
    j["function"] = b.function;
    j["n"] = b.n;
    j["result"] = pcount::to_string(b.value);
    j["delta"] = static_cast<double>(b.delta);
    j["s"] = b.s;
    j["time_ms"] = b.total_ms();
    json ph = json::object();
    for (const auto& [k, v] : b.phases) ph[k] = v;
    j["phases"] = ph;
    j["moduli"] = json::array({b.moduli.primes[0], b.moduli.primes[1]});
    j["method"] = b.direct ? "direct" : "pipeline";
    return j;
}

double phase(const pcount::ResultBundle& b, const std::string& name) {
    for (const auto& [k, v] : b.phases)
        if (k == name) return v;
    return 0;
}

int bench(const Options& o, const pcount::Config& c) {
    const u64 from = parse_n(o.from), to = parse_n(o.to);
    if (from < 1 || to < from || !(o.factor > 1)) throw UsageError("bench needs 1 <= from <= to and factor > 1");
    std::vector<double> xs, ys;
    json rows = json::array();
    if (!o.json) std::cout << "n,result,sieve_ms,convolution_ms,correction_ms,total_ms\n";
    for (long double x = from; x <= static_cast<long double>(to) * (1 + 1e-12L); x *= o.factor) {
        const u64 n = static_cast<u64>(std::llround(x));
        const auto b = run_main(o.bench_fn, n, o, c);
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(std::max(b.total_ms(), 1e-3)));
        if (o.json) {
            rows.push_back(bundle_json(b));
        } else {
            std::cout << n << ',' << pcount::to_string(b.value) << ',' << phase(b, "sieve") << ','
                      << phase(b, "convolution") << ',' << phase(b, "correction") << ',' << b.total_ms() << '\n';
        }
    }
    double slope = std::nan("");
    if (xs.size() >= 2) {
        const double k = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }
    if (o.json) {
        json out;
        out["function"] = o.bench_fn;
        out["rows"] = rows;
        out["slope"] = std::isfinite(slope) ? json(slope) : json(nullptr);
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << "slope," << slope << '\n';
    }
    return 0;
}

int dispatch(const Options& o, const pcount::Config& c) {
    if (o.fn == "bench") return bench(o, c);
    if (o.fn == "oracle") {
        const u64 n = parse_n(o.n_text);
        const auto start = std::chrono::steady_clock::now();
        const i128 v = run_oracle(o.oracle_fn, n, o);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (o.json) {
            json j;
            j["function"] = o.oracle_fn;
            j["n"] = n;
            j["result"] = pcount::to_string(v);
            j["time_ms"] = ms;
            j["method"] = "oracle";
            std::cout << j.dump() << '\n';
        } else {
            std::cout << pcount::to_string(v) << '\n';
        }
        return 0;
    }

    const u64 n = parse_n(o.n_text);
    const auto b = run_main(o.fn, n, o, c);
    std::optional<pcount::oracle::OracleReport> report;
    if (o.verify && n <= parse_n(o.verify_limit)) {
        pcount::oracle::OracleReport r;
        r.function = o.fn;
        r.input = n;
        r.main_value = b.value;
        r.main_ms = b.total_ms();
        const auto start = std::chrono::steady_clock::now();
        r.oracle_value = run_oracle(o.fn, n, o);
        r.oracle_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        r.match = r.oracle_value == r.main_value;
        report = r;
    }
    if (o.json) {
        json j = bundle_json(b);
        if (report) {
            j["verified"] = report->match;
            j["oracle_result"] = pcount::to_string(report->oracle_value);
            j["oracle_ms"] = report->oracle_ms;
        }
        std::cout << j.dump() << '\n';
    } else {
        std::cout << pcount::to_string(b.value) << '\n';
    }
    if (report && !report->match) {
        std::cerr << "verify mismatch: " << o.fn << "(" << n << ") = " << pcount::to_string(report->main_value)
                  << " but oracle gives " << pcount::to_string(report->oracle_value) << '\n';
        return exit_mismatch;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact prime counting and related sums"};
    app.fallthrough();
    app.require_subcommand(1);
    Options o;
    pcount::Config config;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    config.threads = hw;
    long double scale = 1;
    std::string chunk_text;

    app.add_option("--delta-scale", scale, "multiplier c on the default segmentation precision")
        ->envname("PCOUNT_DELTA_SCALE");
    app.add_option("--threads", config.threads, "worker threads")->envname("PCOUNT_THREADS")->check(CLI::PositiveNumber);
    app.add_option("--cutoff", o.cutoff, "direct sieving below this N")->envname("PCOUNT_CUTOFF");
    app.add_option("--chunk", chunk_text, "error-correction block length")->envname("PCOUNT_CHUNK");
    app.add_option("--moduli", o.moduli, "prime pair for the transforms")
        ->check(CLI::IsMember({"primary", "alternate"}))
        ->envname("PCOUNT_MODULI");
    app.add_flag("--shrink-interval", config.shrink_interval, "tighter critical interval for the pair correction");
    app.add_flag("--json", o.json, "JSON output");
    app.add_flag("--verify", o.verify, "compare against the brute-force oracle");
    app.add_option("--verify-limit", o.verify_limit, "largest N checked by --verify")->envname("PCOUNT_VERIFY_LIMIT");

    auto add_n = [&](CLI::App* sub) { sub->add_option("N", o.n_text, "argument")->required(); };
    auto* pi = app.add_subcommand("pi", "number of primes <= N");
    add_n(pi);
    auto* me = app.add_subcommand("mertens", "Mertens function M(N)");
    add_n(me);
    auto* sp = app.add_subcommand("sum-primes", "sum of p^L over primes <= N");
    add_n(sp);
    sp->add_option("--power", o.power, "exponent L")->default_val(1);
    auto* pm = app.add_subcommand("pi-mod", "primes <= N congruent to R mod M");
    add_n(pm);
    pm->add_option("--modulus", o.modulus, "modulus M")->required();
    pm->add_option("--residue", o.residue, "residue R")->required();
    auto* sq = app.add_subcommand("squarefree", "square-free integers <= N");
    add_n(sq);
    auto* ts = app.add_subcommand("totient-sum", "sum of phi(n) for n <= N");
    add_n(ts);
    auto* orc = app.add_subcommand("oracle", "brute-force reference value");
    orc->add_option("FN", o.oracle_fn, "function")
        ->required()
        ->check(CLI::IsMember({"pi", "mertens", "sum-primes", "pi-mod", "squarefree", "totient-sum"}));
    add_n(orc);
    orc->add_option("--power", o.power, "exponent for sum-primes")->default_val(1);
    orc->add_option("--modulus", o.modulus, "modulus for pi-mod");
    orc->add_option("--residue", o.residue, "residue for pi-mod");
    auto* be = app.add_subcommand("bench", "timings over a geometric range of N");
    be->add_option("--from", o.from, "first N");
    be->add_option("--to", o.to, "last N");
    be->add_option("--factor", o.factor, "ratio between consecutive N");
    be->add_option("--fn", o.bench_fn, "function to time")
        ->check(CLI::IsMember({"pi", "mertens", "sum-primes", "pi-mod", "squarefree", "totient-sum"}));
    be->add_option("--power", o.power, "exponent for sum-primes")->default_val(1);
    be->add_option("--modulus", o.modulus, "modulus for pi-mod");
    be->add_option("--residue", o.residue, "residue for pi-mod");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    for (auto* sub : app.get_subcommands()) o.fn = sub->get_name();

    try {
        config.delta_scale = scale;
        if (!o.cutoff.empty()) config.small_cutoff = parse_n(o.cutoff);
        if (!chunk_text.empty()) config.chunk = static_cast<std::size_t>(parse_n(chunk_text));
        config.pool = o.moduli == "alternate" ? pcount::ModulusPool::alternate : pcount::ModulusPool::primary;
        return dispatch(o, config);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help();
        return exit_usage;
    } catch (const pcount::unsupported_modulus& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return exit_range;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::range_error& e) {
        std::cerr << "range error: " << e.what() << '\n';
        return exit_range;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
