// Copyright 2026 The qubo-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUBO_FORGE_SOLVERS_HPP_INCLUDED
#define QUBO_FORGE_SOLVERS_HPP_INCLUDED

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qubo_forge/compiler.hpp"
#include "qubo_forge/error.hpp"
#include "qubo_forge/expression.hpp"

namespace qubo_forge {

using Bits = std::vector<std::uint8_t>;

/// Degree-two model over indexed binaries, in the sorted order of
/// QuboModel::binaries().
class IndexedQubo {
 public:
    struct Neighbor {
        std::size_t index;
        double coupling;
    };

    IndexedQubo() = default;

    explicit IndexedQubo(const QuboModel& model) : names_(model.binaries()), offset_(model.offset) {
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < names_.size(); ++i) index[names_[i]] = i;
        linear_.assign(names_.size(), 0.0);
        adjacency_.resize(names_.size());
        for (const auto& [m, c] : model.quadratic.terms()) {
            const auto& v = m.variables();
            if (m.degree() == 0) {
                offset_ += c;
            } else if (m.degree() == 1) {
                linear_[index.at(v[0])] += c;
            } else if (m.degree() == 2 && v[0] != v[1]) {
                const std::size_t i = index.at(v[0]), j = index.at(v[1]);
                adjacency_[i].push_back({j, c});
                adjacency_[j].push_back({i, c});
                edges_.push_back({i, j, c});
            } else if (m.degree() == 2) {
                linear_[index.at(v[0])] += c;
            } else {
                throw Error("model is not quadratic: " + m.to_string());
            }
        }
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    double offset() const noexcept { return offset_; }
    const std::vector<double>& linear() const noexcept { return linear_; }
    const std::vector<Neighbor>& neighbors(std::size_t i) const { return adjacency_[i]; }

    double energy(const Bits& x) const {
        double e = offset_;
        for (std::size_t i = 0; i < linear_.size(); ++i)
            if (x[i]) e += linear_[i];
        for (const auto& [i, j, c] : edges_)
            if (x[i] && x[j]) e += c;
        return e;
    }

    /// Local fields h_i = linear_i + sum_j J_ij x_j; flipping i changes the
    /// energy by (1 - 2 x_i) h_i.
    std::vector<double> fields(const Bits& x) const {
        std::vector<double> h = linear_;
        for (const auto& [i, j, c] : edges_) {
            if (x[j]) h[i] += c;
            if (x[i]) h[j] += c;
        }
        return h;
    }

    void flip(Bits& x, std::vector<double>& h, std::size_t i) const {
        const double sign = x[i] ? -1.0 : 1.0;
        x[i] ^= 1;
        for (const auto& n : adjacency_[i]) h[n.index] += sign * n.coupling;
    }

    /// Largest possible single-flip energy change of variable i.
    double max_flip(std::size_t i) const {
        double pos = std::max(linear_[i], 0.0), neg = std::max(-linear_[i], 0.0);
        for (const auto& n : adjacency_[i]) (n.coupling > 0 ? pos : neg) += std::abs(n.coupling);
        return std::max(pos, neg);
    }

    double min_abs_coefficient() const {
        double best = std::numeric_limits<double>::infinity();
        for (double c : linear_)
            if (std::abs(c) > kZeroTolerance) best = std::min(best, std::abs(c));
        for (const auto& e : edges_)
            if (std::abs(e.c) > kZeroTolerance) best = std::min(best, std::abs(e.c));
        return best;
    }

 private:
    struct Edge {
        std::size_t i;
        std::size_t j;
        double c;
    };

    std::vector<std::string> names_;
    double offset_ = 0.0;
    std::vector<double> linear_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::vector<Edge> edges_;
};

struct Sample {
    Bits bits;
    double energy = 0.0;

    bool operator==(const Sample&) const = default;
};

using Decoded = std::map<std::string, double>;

/// Decoded source-variable values of one assignment; `valid` is false when
/// an encoding-induced constraint (one-hot, domain wall) is broken.
struct DecodedSample {
    Decoded values;
    bool valid = true;
};

inline DecodedSample decode_sample(const QuboModel& model, const std::vector<std::string>& names, const Bits& bits) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;
    DecodedSample out;
    for (const auto& plan : model.encodings) {
        const auto d = plan.decode_with([&](const std::string& b) -> int {
            auto it = index.find(b);
            return it == index.end() ? 0 : bits[it->second];
        });
        out.values[plan.source] = snap12(d.value);
        out.valid = out.valid && d.valid;
    }
    return out;
}

inline Assignment to_assignment(const std::vector<std::string>& names, const Bits& bits) {
    Assignment a;
    for (std::size_t i = 0; i < names.size(); ++i) a[names[i]] = bits[i];
    return a;
}

struct SolutionSet {
    std::string solver;
    std::vector<std::string> variables;  // binary names, index order of every Bits
    std::vector<Sample> samples;
    std::vector<Decoded> decoded;  // parallel to samples
    std::vector<Sample> landscape;  // exhaustive only: lowest energies, ascending
    std::vector<double> run_seconds;  // empty unless timing was requested
    double total_seconds = 0.0;
    std::vector<std::string> warnings;

    bool empty() const noexcept { return samples.empty(); }

    std::size_t best_index() const {
        if (samples.empty()) throw Error("solution set is empty");
        std::size_t best = 0;
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (samples[i].energy < samples[best].energy) best = i;
        return best;
    }

    const Sample& best() const { return samples[best_index()]; }
    double best_energy() const { return best().energy; }
    const Decoded& best_decoded() const { return decoded[best_index()]; }

    std::vector<double> energies() const {
        std::vector<double> out;
        for (const auto& s : samples) out.push_back(s.energy);
        return out;
    }
};

enum class SolverKind { exhaustive, simulated_annealing, qaoa };

inline std::string to_string(SolverKind k) {
    switch (k) {
        case SolverKind::exhaustive: return "exhaustive";
        case SolverKind::simulated_annealing: return "sa";
        case SolverKind::qaoa: return "qaoa";
    }
    return "?";
}

inline SolverKind solver_kind_from_string(const std::string& s) {
    if (s == "exhaustive") return SolverKind::exhaustive;
    if (s == "sa" || s == "simulated-annealing") return SolverKind::simulated_annealing;
    if (s == "qaoa") return SolverKind::qaoa;
    throw Error("unknown solver '" + s + "'");
}

struct SolverParams {
    std::size_t runs = 100;
    std::uint64_t seed = 0;
    bool record_time = false;
    std::size_t threads = 0;  // 0: hardware concurrency

    // simulated annealing
    std::size_t sweeps = 1000;
    double beta_start = 0.1;
    double beta_end = 10.0;
    bool auto_scale_beta = true;

    // QAOA
    std::size_t layers = 1;
    std::size_t shots = 1024;
    std::size_t max_optimizer_iters = 200;
    std::vector<double> initial_angles;  // gamma_1..gamma_p, beta_1..beta_p

    // exhaustive
    std::size_t max_exhaustive_variables = 26;
    std::size_t k_best = 1000;
    std::size_t max_qaoa_variables = 16;

    void validate() const {
        if (runs < 1) throw Error("runs must be at least 1");
        if (!(beta_start > 0.0) || !(beta_start < beta_end)) throw Error("need 0 < beta_start < beta_end");
        if (sweeps < 1) throw Error("sweeps must be at least 1");
        if (layers < 1) throw Error("QAOA needs at least one layer");
        if (shots < 1) throw Error("shots must be at least 1");
        if (!initial_angles.empty() && initial_angles.size() != 2 * layers)
            throw Error("initial_angles needs 2 * layers values");
    }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline void finish(SolutionSet& out, const QuboModel& model, const IndexedQubo& q) {
    out.variables = q.names();
    out.decoded.clear();
    for (const auto& s : out.samples) out.decoded.push_back(decode_sample(model, out.variables, s.bits).values);
}

inline Bits bits_of(std::uint64_t code, std::size_t n) {
    Bits x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> i) & 1U);
    return x;
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += threads) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exhaustive enumeration

/**
 * Enumerates all 2^n assignments in Gray-code order with incremental energy
 * updates. `samples` holds the optimum once per requested run; `landscape`
 * keeps the k lowest-energy assignments, ties ordered by bit pattern.
 */
inline SolutionSet solve_exhaustive(const QuboModel& model, const SolverParams& params = {}) {
    const auto start = std::chrono::steady_clock::now();
    const IndexedQubo q(model);
    const std::size_t n = q.size();
    if (n > params.max_exhaustive_variables)
        throw Error("exhaustive solver is limited to " + std::to_string(params.max_exhaustive_variables) +
                    " binaries, model has " + std::to_string(n));
    const std::size_t k = std::max<std::size_t>(1, params.k_best);

    using Entry = std::pair<double, std::uint64_t>;
    std::priority_queue<Entry> heap;  // max-heap of the k best
    Bits x(n, 0);
    auto h = q.fields(x);
    double energy = q.offset();
    std::uint64_t code = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 0;; ++step) {
        const Entry e{energy, code};
        if (heap.size() < k) {
            heap.push(e);
        } else if (e < heap.top()) {
            heap.pop();
            heap.push(e);
        }
        if (step + 1 == total) break;
        const auto bit = static_cast<std::size_t>(std::countr_zero(step + 1));
        energy += (x[bit] ? -1.0 : 1.0) * h[bit];
        q.flip(x, h, bit);
        code ^= std::uint64_t{1} << bit;
    }

    SolutionSet out;
    out.solver = "exhaustive";
    std::vector<Sample> best;
    while (!heap.empty()) {
        Bits b = detail::bits_of(heap.top().second, n);
        best.push_back({b, q.energy(b)});
        heap.pop();
    }
    std::sort(best.begin(), best.end(), [](const Sample& a, const Sample& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return std::lexicographical_compare(a.bits.rbegin(), a.bits.rend(), b.bits.rbegin(), b.bits.rend());
    });
    out.landscape = std::move(best);
    out.samples.assign(std::max<std::size_t>(1, params.runs), out.landscape.front());
    detail::finish(out, model, q);
    out.total_seconds = detail::seconds_since(start);
    if (params.record_time) out.run_seconds.assign(out.samples.size(), out.total_seconds / out.samples.size());
    return out;
}

// ---------------------------------------------------------------------------
// Simulated annealing

struct BetaRange {
    double start;
    double end;
};

/// Effective inverse temperatures. With auto-scaling the start value is
/// divided by the largest single-flip change and the end value by the
/// smallest coefficient magnitude, so acceptance rates do not depend on the
/// scale of the model.
inline BetaRange effective_betas(const IndexedQubo& q, const SolverParams& params) {
    if (!params.auto_scale_beta || q.size() == 0) return {params.beta_start, params.beta_end};
    double max_flip = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) max_flip = std::max(max_flip, q.max_flip(i));
    double min_coeff = q.min_abs_coefficient();
    if (!(max_flip > 0.0) || !std::isfinite(min_coeff)) return {params.beta_start, params.beta_end};
    BetaRange r{params.beta_start / max_flip, params.beta_end / min_coeff};
    if (r.end <= r.start) r.end = r.start * (params.beta_end / params.beta_start);
    return r;
}

/**
 * Single-flip Metropolis annealing; one sample per run. Run r uses the seed
 * `seed + r`, so results do not depend on the thread count. Each run reports
 * the lowest-energy state it visited.
 */
inline SolutionSet solve_sa(const QuboModel& model, const SolverParams& params = {}) {
    params.validate();
    const auto start = std::chrono::steady_clock::now();
    const IndexedQubo q(model);
    const std::size_t n = q.size();
    const BetaRange betas = effective_betas(q, params);
    std::vector<double> schedule(params.sweeps);
    for (std::size_t s = 0; s < params.sweeps; ++s) {
        const double t = params.sweeps == 1 ? 1.0 : static_cast<double>(s) / static_cast<double>(params.sweeps - 1);
        schedule[s] = betas.start * std::pow(betas.end / betas.start, t);
    }

    SolutionSet out;
    out.solver = "sa";
    out.samples.resize(params.runs);
    std::vector<double> seconds(params.runs, 0.0);
    detail::parallel_for(params.runs, params.threads, [&](std::size_t r) {
        const auto run_start = std::chrono::steady_clock::now();
        std::mt19937_64 rng(params.seed + r);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Bits x(n);
        for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1U);
        auto h = q.fields(x);
        double energy = q.energy(x);
        Bits best = x;
        double best_energy = energy;
        for (const double beta : schedule) {
            for (std::size_t i = 0; i < n; ++i) {
                const double delta = (x[i] ? -1.0 : 1.0) * h[i];
                if (delta <= 0.0 || unit(rng) < std::exp(-beta * delta)) {
                    q.flip(x, h, i);
                    energy += delta;
                    if (energy < best_energy - 1e-12) {
                        best_energy = energy;
                        best = x;
                    }
                }
            }
        }
        out.samples[r] = {best, q.energy(best)};
        seconds[r] = detail::seconds_since(run_start);
    });
    detail::finish(out, model, q);
    out.total_seconds = detail::seconds_since(start);
    if (params.record_time) out.run_seconds = std::move(seconds);
    return out;
}

// ---------------------------------------------------------------------------
// QAOA statevector simulation

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization with the standard coefficients.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, double step, std::size_t max_iters,
                                    double tolerance = 1e-8) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> simplex(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += step;
    std::vector<double> values(d + 1);
    NelderMeadResult out;
    for (std::size_t i = 0; i <= d; ++i) values[i] = f(simplex[i]);
    out.evaluations = d + 1;

    std::vector<std::size_t> order(d + 1);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
        if (std::abs(values[worst] - values[best]) < tolerance) {
            out.converged = true;
            break;
        }
        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / static_cast<double>(d);
        auto along = [&](double t) {
            std::vector<double> p(d);
            for (std::size_t k = 0; k < d; ++k) p[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
            return p;
        };
        auto reflected = along(-1.0);
        const double fr = f(reflected);
        ++out.evaluations;
        if (fr < values[best]) {
            auto expanded = along(-2.0);
            const double fe = f(expanded);
            ++out.evaluations;
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = std::move(reflected);
            values[worst] = fr;
        } else {
            const bool outside = fr < values[worst];
            auto contracted = along(outside ? -0.5 : 0.5);
            const double fc = f(contracted);
            ++out.evaluations;
            if (fc < (outside ? fr : values[worst])) {
                simplex[worst] = std::move(contracted);
                values[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < d; ++k)
                        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                    values[i] = f(simplex[i]);
                    ++out.evaluations;
                }
            }
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    out.x = simplex[best];
    out.value = values[best];
    return out;
}

/// Energies of every basis state; bit i of the index is binary i.
inline std::vector<double> energy_table(const IndexedQubo& q) {
    const std::size_t n = q.size();
    std::vector<double> table(std::size_t{1} << n);
    for (std::size_t c = 0; c < table.size(); ++c) table[c] = q.energy(detail::bits_of(c, n));
    return table;
}

/**
 * p-layer QAOA state: |+>^n followed by alternating phase layers
 * exp(-i gamma_k C) and transverse mixers exp(-i beta_k X) on every qubit.
 * `cost` is the diagonal of C. `angles` = gamma_1..gamma_p, beta_1..beta_p.
 */
inline std::vector<std::complex<double>> qaoa_state(const std::vector<double>& cost, std::size_t n,
                                                    const std::vector<double>& angles) {
    const std::size_t dim = cost.size();
    const std::size_t p = angles.size() / 2;
    std::vector<std::complex<double>> psi(dim, std::complex<double>(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    for (std::size_t layer = 0; layer < p; ++layer) {
        const double gamma = angles[layer], beta = angles[p + layer];
        for (std::size_t z = 0; z < dim; ++z) psi[z] *= std::polar(1.0, -gamma * cost[z]);
        const std::complex<double> c(std::cos(beta), 0.0), s(0.0, -std::sin(beta));
        for (std::size_t q = 0; q < n; ++q) {
            const std::size_t mask = std::size_t{1} << q;
            for (std::size_t z = 0; z < dim; ++z) {
                if (z & mask) continue;
                const auto a = psi[z], b = psi[z | mask];
                psi[z] = c * a + s * b;
                psi[z | mask] = s * a + c * b;
            }
        }
    }
    return psi;
}

inline double expected_energy(const std::vector<std::complex<double>>& psi, const std::vector<double>& energies) {
    double e = 0.0;
    for (std::size_t z = 0; z < psi.size(); ++z) e += std::norm(psi[z]) * energies[z];
    return e;
}

struct QaoaReport {
    std::vector<double> angles;
    double expected_energy = 0.0;
    double uniform_energy = 0.0;  // mean energy over all basis states
};

/**
 * Optimizes the QAOA angles for the model and samples `shots` bitstrings
 * from the final state. The phase operator uses (E - offset) / max|E - offset|;
 * reported energies include the offset. The optimizer restarts from three
 * fixed angle schedules unless `initial_angles` is given.
 */
inline SolutionSet solve_qaoa_sim(const QuboModel& model, const SolverParams& params = {},
                                  QaoaReport* report = nullptr) {
    params.validate();
    const auto start = std::chrono::steady_clock::now();
    const IndexedQubo q(model);
    const std::size_t n = q.size();
    if (n > params.max_qaoa_variables)
        throw Error("QAOA simulation is limited to " + std::to_string(params.max_qaoa_variables) +
                    " binaries, model has " + std::to_string(n));
    const auto energies = energy_table(q);
    double scale = 0.0;
    for (double e : energies) scale = std::max(scale, std::abs(e - q.offset()));
    if (!(scale > 0.0)) scale = 1.0;
    std::vector<double> cost(energies.size());
    for (std::size_t z = 0; z < cost.size(); ++z) cost[z] = (energies[z] - q.offset()) / scale;

    const std::size_t p = params.layers;
    auto objective = [&](const std::vector<double>& angles) {
        return expected_energy(qaoa_state(cost, n, angles), cost);
    };
    std::vector<std::vector<double>> starts;
    if (!params.initial_angles.empty()) {
        starts.push_back(params.initial_angles);
    } else {
        // Linear ramps of increasing total evolution time.
        for (double dt : {0.4, 0.8, 1.6}) {
            std::vector<double> a(2 * p);
            for (std::size_t k = 0; k < p; ++k) {
                const double frac = (static_cast<double>(k) + 0.5) / static_cast<double>(p);
                a[k] = dt * frac;
                a[p + k] = dt * (1.0 - frac);
            }
            starts.push_back(std::move(a));
        }
    }

    SolutionSet out;
    out.solver = "qaoa";
    NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (const auto& x0 : starts) {
        auto r = nelder_mead(objective, x0, 0.25, params.max_optimizer_iters);
        any_converged = any_converged || r.converged;
        if (r.value < best.value) best = std::move(r);
    }
    if (!any_converged)
        out.warnings.push_back("QAOA angle optimizer did not converge within " +
                               std::to_string(params.max_optimizer_iters) + " iterations; using best angles seen");

    const auto psi = qaoa_state(cost, n, best.x);
    std::vector<double> probs(psi.size());
    for (std::size_t z = 0; z < psi.size(); ++z) probs[z] = std::norm(psi[z]);
    std::mt19937_64 rng(params.seed);
    std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
    for (std::size_t s = 0; s < params.shots; ++s) {
        const std::size_t z = pick(rng);
        out.samples.push_back({detail::bits_of(z, n), energies[z]});
    }
    if (report) {
        report->angles = best.x;
        report->expected_energy = expected_energy(psi, energies);
        report->uniform_energy = std::accumulate(energies.begin(), energies.end(), 0.0) / energies.size();
    }
    detail::finish(out, model, q);
    out.total_seconds = detail::seconds_since(start);
    if (params.record_time) out.run_seconds.assign(out.samples.size(), out.total_seconds / out.samples.size());
    return out;
}

inline SolutionSet solve(const QuboModel& model, SolverKind kind, const SolverParams& params = {}) {
    switch (kind) {
        case SolverKind::exhaustive: return solve_exhaustive(model, params);
        case SolverKind::simulated_annealing: return solve_sa(model, params);
        case SolverKind::qaoa: return solve_qaoa_sim(model, params);
    }
    throw Error("unknown solver");
}

}  // namespace qubo_forge

#endif  // QUBO_FORGE_SOLVERS_HPP_INCLUDED
