#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "toggleflow/batched.hpp"
#include "toggleflow/graph.hpp"
#include "toggleflow/oracles.hpp"
#include "toggleflow/pnorm.hpp"
#include "toggleflow/recurse.hpp"
#include "toggleflow/rng.hpp"
#include "toggleflow/solvers.hpp"
#include <nlohmann/json.hpp>

namespace tf = toggleflow;
using ordered_json = nlohmann::ordered_json;

namespace {

double wall_ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<tf::Arc> grid_arcs(int rows, int cols) {
  std::vector<tf::Arc> arcs;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) arcs.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) arcs.push_back({v, v + cols, 1.0});
    }
  return arcs;
}

std::vector<tf::Arc> gnm_arcs(int n, int m, tf::Rng& rng) {
  const long long max_m = static_cast<long long>(n) * (n - 1) / 2;
  if (m < n - 1 || m > max_m) throw std::invalid_argument("m out of range for a simple graph");
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::set<std::pair<int, int>> chosen;
    std::vector<tf::Arc> arcs;
    while (static_cast<int>(arcs.size()) < m) {
      int u = rng.below(n), v = rng.below(n);
      if (u == v) continue;
      const auto key = std::minmax(u, v);
      if (!chosen.insert(key).second) continue;
      arcs.push_back({u, v, 1.0});
    }
    try {
      tf::Graph probe(n, arcs);
      return arcs;
    } catch (const std::invalid_argument&) {
      // disconnected; redraw
    }
  }
  throw std::runtime_error("could not draw a connected graph in 100 attempts");
}

std::vector<tf::Arc> regular_arcs(int n, int deg, tf::Rng& rng) {
  if (deg < 1 || deg >= n || (n * deg) % 2 != 0)
    throw std::invalid_argument("degree must satisfy 1 <= deg < n with n*deg even");
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * deg);
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < deg; ++k) stubs.push_back(v);
    for (int i = static_cast<int>(stubs.size()) - 1; i > 0; --i)
      std::swap(stubs[i], stubs[rng.below(i + 1)]);

    std::set<std::pair<int, int>> chosen;
    std::vector<tf::Arc> arcs;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const int u = stubs[i], v = stubs[i + 1];
      if (u == v || !chosen.insert(std::minmax(u, v)).second) {
        ok = false;
        break;
      }
      arcs.push_back({u, v, 1.0});
    }
    if (!ok) continue;
    try {
      tf::Graph probe(n, arcs);
      return arcs;
    } catch (const std::invalid_argument&) {
    }
  }
  throw std::runtime_error("could not draw a connected regular graph in 100 attempts");
}

tf::Supply make_supply(int n, const std::string& kind, tf::Rng& rng) {
  if (kind == "st") {
    tf::Supply b(n, 0.0);
    b[0] = 1.0;
    b[n - 1] = -1.0;
    return b;
  }
  if (kind != "random") throw std::invalid_argument("supply kind must be st or random");
  for (int attempt = 0; attempt < 100; ++attempt) {
    tf::Supply b(n);
    double mean = 0.0;
    for (int v = 0; v < n; ++v) {
      b[v] = rng.uniform(-1.0, 1.0);
      mean += b[v];
    }
    mean /= n;
    double l1 = 0.0;
    for (int v = 0; v < n; ++v) {
      b[v] -= mean;
      l1 += std::abs(b[v]);
    }
    if (l1 < 1e-12) continue;
    for (int v = 0; v < n; ++v) b[v] *= 2.0 / l1;
    return b;
  }
  throw std::runtime_error("degenerate random supply");
}

void write_vector(const std::vector<double>& vals, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < vals.size(); ++i)
    std::fprintf(fp, "%zu %.17g\n", i, vals[i]);
  std::fclose(fp);
}

struct LoadedProblem {
  tf::Graph g;
  tf::Supply b;
};

LoadedProblem load_problem(const std::string& graph_path, const std::string& supply_path) {
  tf::Graph g = tf::read_graph(graph_path);
  tf::Supply b = tf::read_supply(supply_path, g.n());
  return {std::move(g), std::move(b)};
}

long long quadratic_budget(const tf::Graph& g, const tf::Supply& b, double eps) {
  std::vector<double> r(g.m());
  for (int e = 0; e < g.m(); ++e) r[e] = g.arc(e).r;
  const tf::RootedTree t = tf::low_stretch_tree(g, r);
  const tf::CutTable cuts = tf::build_cut_table(g, t, b);
  if (cuts.tau <= 0.0) return 0;
  const double k = cuts.tau * std::log(cuts.tau / eps);
  return k <= 0.0 ? 0 : static_cast<long long>(std::ceil(k));
}

int run_generate(const std::string& kind, int n, int m, int deg, int rows, int cols, double rmax,
                 const std::string& supply_kind, std::uint64_t seed, const std::string& out) {
  tf::Rng rng(seed);
  std::vector<tf::Arc> arcs;
  if (kind == "path") {
    for (int v = 0; v + 1 < n; ++v) arcs.push_back({v, v + 1, 1.0});
  } else if (kind == "cycle") {
    for (int v = 0; v + 1 < n; ++v) arcs.push_back({v, v + 1, 1.0});
    arcs.push_back({n - 1, 0, 1.0});
  } else if (kind == "grid") {
    if (rows <= 0 || cols <= 0) {
      rows = static_cast<int>(std::sqrt(static_cast<double>(n)));
      while (rows > 1 && n % rows != 0) --rows;
      cols = n / rows;
    }
    n = rows * cols;
    arcs = grid_arcs(rows, cols);
  } else if (kind == "random-gnm") {
    arcs = gnm_arcs(n, m, rng);
  } else if (kind == "random-regular") {
    arcs = regular_arcs(n, deg, rng);
  } else {
    throw std::invalid_argument("unknown graph kind: " + kind);
  }

  if (rmax < 1.0) throw std::invalid_argument("rmax must be at least 1");
  if (rmax > 1.0) {
    const double span = std::log(rmax);
    for (tf::Arc& a : arcs) a.r = std::exp(rng.uniform(0.0, span));
  }

  tf::Graph g(n, arcs);
  const tf::Supply b = make_supply(n, supply_kind, rng);
  tf::write_graph(g, out + ".graph");
  tf::write_supply(b, out + ".supply");

  ordered_json j;
  j["kind"] = kind;
  j["n"] = g.n();
  j["m"] = g.m();
  j["graph"] = out + ".graph";
  j["supply"] = out + ".supply";
  std::cout << j.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const char* threads_env = std::getenv("TOGGLEFLOW_THREADS");
  Eigen::setNbThreads(threads_env ? std::max(1, std::atoi(threads_env)) : 1);

  CLI::App app{"near-optimal electrical and p-norm flows by cycle and cut toggling"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "write a graph/supply pair");
  std::string gen_kind = "grid", gen_supply = "st", gen_out = "problem";
  int gen_n = 16, gen_m = 0, gen_deg = 3, gen_rows = 0, gen_cols = 0;
  double gen_rmax = 1.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("--kind", gen_kind, "path|cycle|grid|random-gnm|random-regular");
  gen->add_option("--n", gen_n, "vertex count");
  gen->add_option("--m", gen_m, "edge count (random-gnm)");
  gen->add_option("--deg", gen_deg, "degree (random-regular)");
  gen->add_option("--rows", gen_rows, "grid rows");
  gen->add_option("--cols", gen_cols, "grid cols");
  gen->add_option("--rmax", gen_rmax, "resistances log-uniform in [1, rmax]");
  gen->add_option("--supply", gen_supply, "st|random");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output prefix");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "run a solver and report a summary");
  std::string algo = "dual-kosz", graph_path, supply_path, trace_path, out_prefix;
  std::string cutflow = "auto";
  double eps = 0.1, p_exp = 2.0;
  std::uint64_t seed = 1;
  long long batch = -1, max_iters = 0, tree_refresh = 1;
  int n0 = 10;
  double gamma = 0.01, eps_prime = 0.01, delta = 0.5, c3 = 0.25;
  int d_override = 0;
  bool with_oracle = false;
  solve->add_option("--algo", algo, "kosz|dual-kosz|batched|recursive|pnorm-cycle|pnorm-cut");
  solve->add_option("--graph", graph_path, "graph file")->required();
  solve->add_option("--supply", supply_path, "supply file")->required();
  solve->add_option("--eps", eps, "target accuracy");
  solve->add_option("--seed", seed, "sampling seed");
  solve->add_option("--trace", trace_path, "write per-iteration records (jsonl)");
  solve->add_option("--out", out_prefix, "write PREFIX.potentials and PREFIX.flow");
  solve->add_option("--batch", batch, "block length for batched (0 = unbatched)");
  solve->add_option("--cutflow", cutflow, "cut-flow structure: naive|table|auto");
  solve->add_option("--max-iters", max_iters, "iteration cap (0 = full budget)");
  solve->add_option("--p", p_exp, "norm exponent for pnorm solvers");
  solve->add_option("--tree-refresh", tree_refresh, "rebuild period for pnorm trees");
  solve->add_option("--n0", n0, "recursive base-case size");
  solve->add_option("--gamma", gamma, "recursive sparsifier quality");
  solve->add_option("--eps-prime", eps_prime, "recursive child accuracy");
  solve->add_option("--delta", delta, "recursive batch schedule exponent");
  solve->add_option("--c3", c3, "recursive batch schedule constant");
  solve->add_option("--d", d_override, "force recursive batch size");
  solve->add_flag("--oracle", with_oracle, "also report the gap against a dense reference");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "timing sweeps, CSV on stdout");
  std::string bench_graph, bench_supply, sweep = "l", l_tokens = "1,sqrt,K", sizes = "8,16,32";
  std::string bench_cutflow = "auto";
  double bench_eps = 0.1;
  std::uint64_t bench_seed = 1;
  long long bench_max_iters = 0;
  bench->add_option("--graph", bench_graph, "graph file (sweep l)");
  bench->add_option("--supply", bench_supply, "supply file (sweep l)");
  bench->add_option("--sweep", sweep, "l|n");
  bench->add_option("--l", l_tokens, "comma list: integers, sqrt, K");
  bench->add_option("--sizes", sizes, "comma list of grid sides (sweep n)");
  bench->add_option("--eps", bench_eps, "target accuracy");
  bench->add_option("--seed", bench_seed, "sampling seed");
  bench->add_option("--max-iters", bench_max_iters, "iteration cap (0 = full budget)");
  bench->add_option("--cutflow", bench_cutflow, "structure for unbatched rows: naive|table|auto");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed())
      return run_generate(gen_kind, gen_n, gen_m, gen_deg, gen_rows, gen_cols, gen_rmax,
                          gen_supply, gen_seed, gen_out);

    if (solve->parsed()) {
      LoadedProblem prob = load_problem(graph_path, supply_path);
      const tf::Graph& g = prob.g;
      const tf::Supply& b = prob.b;
      tf::Rng rng(seed);

      tf::SolveOptions opts;
      opts.record_trace = !trace_path.empty();
      opts.max_iters = max_iters;
      if (cutflow == "naive")
        opts.naive_cutflow = true;
      else if (cutflow != "table" && cutflow != "auto")
        throw std::invalid_argument("--cutflow must be naive, table, or auto");

      const auto start = std::chrono::steady_clock::now();
      tf::Flow f;
      tf::Potentials x;
      tf::SolverTrace trace;
      int exit_code = 0;
      double p_used = 2.0;

      if (algo == "dual-kosz") {
        auto res = tf::dual_kosz(g, b, eps, rng, opts);
        f = std::move(res.f);
        x = std::move(res.x);
        trace = std::move(res.trace);
      } else if (algo == "kosz") {
        auto res = tf::kosz(g, b, eps, rng, opts);
        f = std::move(res.f);
        x = std::move(res.x);
        trace = std::move(res.trace);
      } else if (algo == "batched") {
        const long long l = batch >= 0
                                ? batch
                                : static_cast<long long>(std::ceil(std::sqrt(
                                      static_cast<double>(g.m()))));
        auto res = tf::batched_dual_kosz(g, b, eps, l, rng, opts);
        f = std::move(res.f);
        x = std::move(res.x);
        trace = std::move(res.trace);
      } else if (algo == "recursive") {
        tf::RecursionParams params;
        params.n0 = n0;
        params.gamma = gamma;
        params.eps_prime = eps_prime;
        params.delta = delta;
        params.c3 = c3;
        params.d_override = d_override;
        auto res = tf::recursive_solve(g, b, eps, rng, params, opts);
        f = std::move(res.f);
        x = std::move(res.x);
        trace = std::move(res.trace);
      } else if (algo == "pnorm-cycle" || algo == "pnorm-cut") {
        p_used = p_exp;
        tf::PNormOptions popts;
        popts.record_trace = opts.record_trace;
        popts.tree_refresh = tree_refresh;
        if (max_iters > 0) popts.max_iters = max_iters;
        auto res = algo == "pnorm-cycle" ? tf::pnorm_cycle_solve(g, b, p_exp, eps, rng, popts)
                                         : tf::pnorm_cut_solve(g, b, p_exp, eps, rng, popts);
        f = std::move(res.f);
        x = std::move(res.x);
        trace = std::move(res.trace);
        if (!res.converged) exit_code = 2;
      } else {
        throw std::invalid_argument("unknown algo: " + algo);
      }
      const double elapsed = wall_ms_since(start);

      const double energy = tf::primal_energy(g, f, p_used);
      const double dual = tf::dual_objective(g, x, b, tf::PNormParams::make(g, p_used));

      ordered_json j;
      j["algo"] = algo;
      j["n"] = g.n();
      j["m"] = g.m();
      j["tau"] = trace.tau;
      j["K"] = trace.K;
      j["iterations_run"] = trace.iterations_run;
      j["final_energy"] = energy;
      j["final_dual"] = dual;
      j["gap"] = energy - dual;
      if (with_oracle) {
        double opt_energy = 0.0;
        if (p_used == 2.0) {
          const tf::Potentials xs = tf::solve_laplacian_dense(g, b);
          for (int v = 0; v < g.n(); ++v) opt_energy += 0.5 * b[v] * xs[v];
        } else {
          opt_energy = tf::pnorm_oracle(g, b, p_used).energy;
        }
        j["oracle_gap"] = energy / opt_energy - 1.0;
      }
      j["wall_ms"] = elapsed;
      std::cout << j.dump() << "\n";

      if (!trace_path.empty()) {
        trace.seed = seed;
        trace.write_jsonl(trace_path);
      }
      if (!out_prefix.empty()) {
        write_vector(x, out_prefix + ".potentials");
        write_vector(f, out_prefix + ".flow");
      }
      return exit_code;
    }

    // ---- bench ----
    std::printf("n,m,l,algo,K,wall_ms,final_gap\n");
    auto run_row = [&](const tf::Graph& g, const tf::Supply& b, long long l) {
      tf::SolveOptions opts;
      opts.max_iters = bench_max_iters;
      opts.naive_cutflow = bench_cutflow == "naive";
      tf::Rng rng(bench_seed);
      const auto start = std::chrono::steady_clock::now();
      tf::DualSolveResult res = l == 0 ? tf::dual_kosz(g, b, bench_eps, rng, opts)
                                       : tf::batched_dual_kosz(g, b, bench_eps, l, rng, opts);
      const double ms = wall_ms_since(start);
      const double gap = tf::primal_energy(g, res.f, 2.0) -
                         tf::dual_objective(g, res.x, b, tf::PNormParams::make(g, 2.0));
      std::printf("%d,%d,%lld,%s,%lld,%.3f,%.6g\n", g.n(), g.m(), l,
                  l == 0 ? "dual-kosz" : "batched", res.trace.K, ms, gap);
    };

    auto parse_l = [&](const tf::Graph& g, const tf::Supply& b,
                       const std::string& tok) -> long long {
      if (tok == "sqrt")
        return static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(g.m()))));
      if (tok == "K") return quadratic_budget(g, b, bench_eps);
      return std::stoll(tok);
    };

    auto split = [](const std::string& s) {
      std::vector<std::string> toks;
      std::size_t pos = 0;
      while (pos <= s.size()) {
        const std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) {
          toks.push_back(s.substr(pos));
          break;
        }
        toks.push_back(s.substr(pos, comma - pos));
        pos = comma + 1;
      }
      return toks;
    };

    if (sweep == "l") {
      if (bench_graph.empty() || bench_supply.empty())
        throw std::invalid_argument("sweep l needs --graph and --supply");
      LoadedProblem prob = load_problem(bench_graph, bench_supply);
      for (const std::string& tok : split(l_tokens))
        run_row(prob.g, prob.b, parse_l(prob.g, prob.b, tok));
    } else if (sweep == "n") {
      for (const std::string& tok : split(sizes)) {
        const int side = std::stoi(tok);
        tf::Graph g(side * side, grid_arcs(side, side));
        tf::Rng gen_rng(bench_seed);
        const tf::Supply b = make_supply(g.n(), "random", gen_rng);
        for (const std::string& lt : split(l_tokens)) run_row(g, b, parse_l(g, b, lt));
      }
    } else {
      throw std::invalid_argument("--sweep must be l or n");
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
