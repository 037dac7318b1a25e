#pragma once

#include "aside.hpp"
#include "mirror.hpp"
#include "random.hpp"
#include "siegel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace abhms {

/// One independent verification job. key fixes its place in the merged output.
struct Scenario {
    std::string key;
    std::function<VerificationReport()> run;
};

/// Runs every scenario on up to `jobs` threads and returns the reports sorted by key.
/// A scenario that throws is reported as failing with the error text in params.
inline std::vector<VerificationReport> run_scenarios(std::vector<Scenario> scenarios, int jobs) {
    std::sort(scenarios.begin(), scenarios.end(), [](const Scenario& x, const Scenario& y) { return x.key < y.key; });
    std::vector<VerificationReport> out(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
            try {
                out[i] = scenarios[i].run();
            } catch (const std::exception& e) {
                VerificationReport r;
                r.params["error"] = e.what();
                r.max_residual = std::numeric_limits<double>::infinity();
                r.pass = false;
                out[i] = std::move(r);
            }
            out[i].scenario = scenarios[i].key;
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

struct SweepConfig {
    int g = 1;
    std::uint64_t seed = 0;
    std::optional<SiegelPoint> tau; // fixed modulus, otherwise one random τ per scenario
    std::optional<std::vector<int>> slopes;
    int draws = 0; // 0: per-scenario default
    int k_max = 0; // 0: 4 for g = 1, 3 otherwise
    std::optional<double> a2_offset;
    double epsilon = 0.01;
    std::optional<double> tol;
};

namespace detail {

inline std::string pad(long long n, int width = 3) {
    std::string s = std::to_string(n);
    return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

inline std::string slope_list(const std::vector<int>& ks) {
    std::string s;
    for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? "," : "") + std::to_string(ks[i]);
    return s;
}

inline RealVector random_unit_vector(Rng& rng, int g) {
    RealVector v(g);
    for (int i = 0; i < g; ++i) v[i] = rng.uniform();
    return v;
}

/// Stream id of a scenario: family tag in the high bits, running index below.
inline std::uint64_t stream_id(std::uint64_t family, std::uint64_t index) { return (family << 32) | index; }

inline SiegelPoint scenario_tau(const SweepConfig& cfg, Rng& rng) { return cfg.tau ? *cfg.tau : random_siegel(rng, cfg.g); }

} // namespace detail

/// Pairwise-distinct slope triples from {lo..hi} with k12·k23·k13 > 0.
inline std::vector<std::vector<int>> valid_slope_triples(int lo, int hi) {
    std::vector<std::vector<int>> out;
    for (int k1 = lo; k1 <= hi; ++k1)
        for (int k2 = lo; k2 <= hi; ++k2)
            for (int k3 = lo; k3 <= hi; ++k3) {
                if (k1 == k2 || k2 == k3 || k1 == k3) continue;
                if (slope_triple(k1, k2, k3).N > 0) out.push_back({k1, k2, k3});
            }
    return out;
}

inline std::vector<Scenario> product_scenarios(const SweepConfig& cfg) {
    std::vector<std::vector<int>> triples;
    if (cfg.slopes) {
        if (cfg.slopes->size() != 3) fail(ErrorKind::InvalidArgument, "--slopes needs three values for product");
        slope_triple((*cfg.slopes)[0], (*cfg.slopes)[1], (*cfg.slopes)[2]);
        triples.push_back(*cfg.slopes);
    } else {
        triples = valid_slope_triples(-2, 4);
    }
    const int draws = cfg.draws > 0 ? cfg.draws : (cfg.slopes ? 3 : 1);
    const double tol = cfg.tol.value_or(1e-8);
    std::vector<Scenario> out;
    std::uint64_t idx = 0;
    for (const auto& t : triples)
        for (int d = 0; d < draws; ++d, ++idx) {
            const std::uint64_t stream = detail::stream_id(1, idx);
            out.push_back({"product/g" + std::to_string(cfg.g) + "/" + detail::pad(idx, 5), [cfg, t, stream, tol] {
                               Rng rng = Rng(cfg.seed).split(stream);
                               const SiegelPoint tau = detail::scenario_tau(cfg, rng);
                               std::vector<Brane> br;
                               for (int k : t)
                                   br.push_back(Brane::finite(tau, k, detail::random_unit_vector(rng, cfg.g),
                                                              detail::random_unit_vector(rng, cfg.g)));
                               return verify_product(br[0], br[1], br[2], tol);
                           }});
        }
    return out;
}

/// Every pair kind: distinct slopes over {−2..3}², equal slopes with equal / shifted a / shifted b, slope↔vertical, vertical pairs.
inline std::vector<Scenario> dims_scenarios(const SweepConfig& cfg) {
    std::vector<Scenario> out;
    const int g = cfg.g;
    const double eps = cfg.epsilon;
    std::uint64_t idx = 0;
    auto add = [&](std::function<std::pair<Brane, Brane>(Rng&, const SiegelPoint&)> make) {
        const std::uint64_t stream = detail::stream_id(2, idx);
        out.push_back({"dims/g" + std::to_string(g) + "/" + detail::pad(static_cast<long long>(idx), 5),
                       [cfg, make, stream, eps] {
                           Rng rng = Rng(cfg.seed).split(stream);
                           const SiegelPoint tau = detail::scenario_tau(cfg, rng);
                           const auto [b1, b2] = make(rng, tau);
                           PerturbationParams p;
                           p.epsilon = eps;
                           return verify_dims(b1, b2, p);
                       }});
        ++idx;
    };
    auto rv = [g](Rng& rng) { return detail::random_unit_vector(rng, g); };
    for (int k = -2; k <= 3; ++k)
        for (int kp = -2; kp <= 3; ++kp) {
            if (k == kp) continue;
            add([k, kp, rv](Rng& rng, const SiegelPoint& tau) {
                const RealVector a1 = rv(rng), b1 = rv(rng), a2 = rv(rng), b2 = rv(rng);
                return std::pair{Brane::finite(tau, k, a1, b1), Brane::finite(tau, kp, a2, b2)};
            });
        }
    for (int mode = 0; mode < 4; ++mode)
        add([mode, g, rv](Rng& rng, const SiegelPoint& tau) {
            const int k = rng.uniform_int(-2, 3);
            const RealVector a = rv(rng), b = rv(rng);
            RealVector a2 = a, b2 = b;
            if (mode == 1) a2 = a + RealVector::Constant(g, 0.5);
            if (mode == 2) b2 = b + RealVector::Constant(g, 0.25);
            if (mode == 3) a2 = a + RealVector::Unit(g, 0) * 0.3; // differs in one coordinate only
            return std::pair{Brane::finite(tau, k, a, b), Brane::finite(tau, k, a2, b2)};
        });
    add([rv](Rng& rng, const SiegelPoint& tau) {
        return std::pair{Brane::finite(tau, rng.uniform_int(-2, 3), rv(rng), rv(rng)), Brane::vertical_at(tau, rv(rng), rv(rng))};
    });
    add([rv](Rng& rng, const SiegelPoint& tau) {
        return std::pair{Brane::vertical_at(tau, rv(rng), rv(rng)), Brane::finite(tau, rng.uniform_int(-2, 3), rv(rng), rv(rng))};
    });
    add([rv](Rng& rng, const SiegelPoint& tau) {
        const RealVector a = rv(rng), b = rv(rng);
        return std::pair{Brane::vertical_at(tau, a, b), Brane::vertical_at(tau, a, b)};
    });
    add([rv](Rng& rng, const SiegelPoint& tau) {
        return std::pair{Brane::vertical_at(tau, rv(rng), rv(rng)), Brane::vertical_at(tau, rv(rng), rv(rng))};
    });
    return out;
}

inline std::vector<Scenario> ring_scenarios(const SweepConfig& cfg) {
    const int k_max = cfg.k_max > 0 ? cfg.k_max : (cfg.g == 1 ? 4 : 3);
    const double tol = cfg.tol.value_or(1e-8);
    const int draws = cfg.draws > 0 ? cfg.draws : 1;
    std::vector<Scenario> out;
    for (int d = 0; d < draws; ++d) {
        const std::uint64_t stream = detail::stream_id(3, static_cast<std::uint64_t>(d));
        out.push_back({"ring/g" + std::to_string(cfg.g) + "/" + detail::pad(d, 5), [cfg, k_max, tol, stream] {
                           Rng rng = Rng(cfg.seed).split(stream);
                           return seidel_ring(detail::scenario_tau(cfg, rng), k_max, tol).report;
                       }});
    }
    return out;
}

inline std::vector<Scenario> vertical_scenarios(const SweepConfig& cfg) {
    std::vector<std::vector<int>> pairs{{0, 1}, {0, 2}, {1, 3}};
    if (cfg.slopes) {
        if (cfg.slopes->size() != 2) fail(ErrorKind::InvalidArgument, "--slopes needs two values for vertical");
        if ((*cfg.slopes)[0] >= (*cfg.slopes)[1]) fail(ErrorKind::SlopeOrderViolation, "vertical needs k1 < k2");
        pairs = {*cfg.slopes};
    }
    const int draws = cfg.draws > 0 ? cfg.draws : 4;
    const double tol = cfg.tol.value_or(1e-9);
    std::vector<Scenario> out;
    std::uint64_t idx = 0;
    for (const auto& p : pairs)
        for (int d = 0; d < draws; ++d, ++idx) {
            const std::uint64_t stream = detail::stream_id(4, idx);
            out.push_back({"vertical/g" + std::to_string(cfg.g) + "/" + detail::pad(static_cast<long long>(idx), 5),
                           [cfg, p, stream, tol] {
                               Rng rng = Rng(cfg.seed).split(stream);
                               const SiegelPoint tau = detail::scenario_tau(cfg, rng);
                               const int g = cfg.g;
                               const Brane b1 = Brane::finite(tau, p[0], detail::random_unit_vector(rng, g),
                                                              detail::random_unit_vector(rng, g));
                               const Brane b2 = Brane::finite(tau, p[1], detail::random_unit_vector(rng, g),
                                                              detail::random_unit_vector(rng, g));
                               const RealVector xa = detail::random_unit_vector(rng, g);
                               const RealVector xb = detail::random_unit_vector(rng, g);
                               const ComplexVector z = -(xa.cast<cplx>() + tau.tau() * xb.cast<cplx>());
                               return verify_vertical(b1, b2, z, tol);
                           }});
        }
    return out;
}

inline std::vector<Scenario> cohomology_scenarios(const SweepConfig& cfg) {
    const int draws = cfg.draws > 0 ? cfg.draws : 6;
    std::vector<Scenario> out;
    for (int d = 0; d < draws; ++d) {
        const std::uint64_t stream = detail::stream_id(5, static_cast<std::uint64_t>(d));
        out.push_back({"cohomology/g" + std::to_string(cfg.g) + "/" + detail::pad(d, 5), [cfg, d, stream] {
                           Rng rng = Rng(cfg.seed).split(stream);
                           const SiegelPoint tau = detail::scenario_tau(cfg, rng);
                           const int g = cfg.g;
                           const int k = rng.uniform_int(-2, 3);
                           const RealVector a1 = detail::random_unit_vector(rng, g), b1 = detail::random_unit_vector(rng, g);
                           RealVector a2 = a1;
                           if (cfg.a2_offset)
                               a2 = a1 + RealVector::Constant(g, *cfg.a2_offset);
                           else if (d % 2 == 1)
                               a2 = detail::random_unit_vector(rng, g);
                           PerturbationParams p;
                           p.epsilon = cfg.epsilon;
                           return verify_cohomology(Brane::finite(tau, k, a1, b1), Brane::finite(tau, k, a2, b1), p);
                       }});
    }
    return out;
}

inline const std::vector<std::string>& scenario_families() {
    static const std::vector<std::string> names{"product", "dims", "ring", "vertical", "cohomology"};
    return names;
}

inline std::vector<Scenario> build_scenarios(const std::string& family, const SweepConfig& cfg) {
    if (family == "product") return product_scenarios(cfg);
    if (family == "dims") return dims_scenarios(cfg);
    if (family == "ring") return ring_scenarios(cfg);
    if (family == "vertical") return vertical_scenarios(cfg);
    if (family == "cohomology") return cohomology_scenarios(cfg);
    if (family == "all") {
        std::vector<Scenario> all;
        SweepConfig shared = cfg;
        shared.slopes.reset();
        for (const auto& f : scenario_families()) {
            auto part = build_scenarios(f, shared);
            all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        return all;
    }
    fail(ErrorKind::InvalidArgument, "unknown scenario \"" + family + "\"");
}

} // namespace abhms
