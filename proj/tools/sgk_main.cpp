// Command-line frontend: every computation of the library as a subcommand
// with JSON/CSV/pretty output. Exit codes: 0 success, 1 verification
// failure, 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include "sgk/mixing.hpp"
#include "sgk/serialize.hpp"
#include "sgk/verify.hpp"

namespace {

using namespace sgk;

struct CommonOpts {
  int k = 2;
  int depth = 0;  // 0: per-command default
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  std::string format;
  std::string out_path;
};

std::ostream& open_output(const CommonOpts& opts, std::ofstream& file) {
  if (opts.out_path.empty()) return std::cout;
  file.open(opts.out_path);
  if (!file) throw std::runtime_error("cannot open output file '" + opts.out_path + "'");
  return file;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_seed = false) {
  cmd->add_option("--k", opts.k, "gasket level k (exact solves grow steeply; 2..32)")
      ->check(CLI::Range(2, 32));
  cmd->add_option("--depth", opts.depth, "depth/level override (command specific)");
  cmd->add_option("--format", opts.format, "output format: json, csv or pretty");
  cmd->add_option("--out", opts.out_path, "write output to a file instead of stdout");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = logical cores)");
  if (with_seed) cmd->add_option("--seed", opts.seed, "random seed");
}

int resolved_threads(const CommonOpts& opts) {
  if (opts.threads > 0) return opts.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int run_info(const CommonOpts& opts, std::uint64_t samples) {
  const GasketParams params = gasket_params(opts.k);
  const Rational r_energy = renormalization_constant(params, RenormMethod::kEnergyRatio);
  const Rational r_eigen = renormalization_constant(params, RenormMethod::kCornerEigenvalue);
  const Rational r_resist = renormalization_constant(params, RenormMethod::kResistance);
  const Rational r_hit = renormalization_constant(params, RenormMethod::kHittingTime);
  const Rational p_return = return_probability(params);
  const Rational h0 = expected_hitting_time(params, 0);
  const Rational h1 = expected_hitting_time(params, 1);
  const int m_max = opts.depth > 0 ? opts.depth : 5;
  WalkStats walk;
  if (samples > 0)
    walk = monte_carlo_walk(params, WalkTarget::kReturnProbability, samples, opts.seed,
                            resolved_threads(opts));

  std::ofstream file;
  std::ostream& os = open_output(opts, file);
  if (opts.format == "json") {
    const HarmonicStructure hs = extension_tensor(params);
    Json out;
    out["schema"] = 1;
    out["k"] = opts.k;
    out["d"] = params.d;
    out["hausdorff_dim"] = params.hausdorff_dim;
    out["r"] = Json{{"energy-ratio", r_energy.str()},
                    {"corner-eigenvalue", r_eigen.str()},
                    {"resistance", r_resist.str()},
                    {"hitting-time", r_hit.str()}};
    out["return_probability"] = p_return.str();
    out["hitting_time"] = Json{{"m0", h0.str()}, {"m1", h1.str()}};
    Json census = Json::array();
    for (int m = 0; m <= m_max; ++m) census.push_back(vertex_census(params, m).str());
    out["vertex_census"] = std::move(census);
    Json tensor = Json::array();
    for (int n = 0; n < params.d; ++n) tensor.push_back(json_mat3(hs.B[static_cast<std::size_t>(n)]));
    out["extension_tensor"] = std::move(tensor);
    if (samples > 0)
      out["monte_carlo_return_probability"] =
          Json{{"estimate", walk.estimate},
               {"standard_error", walk.standard_error},
               {"samples", walk.samples},
               {"seed", walk.seed}};
    os << out.dump(2) << "\n";
    return 0;
  }
  os << "SG_" << opts.k << ": d = " << params.d << ", Hausdorff dimension s = "
     << std::setprecision(12) << params.hausdorff_dim << "\n";
  os << "renormalization constant r:\n";
  os << "  energy-ratio       " << r_energy << "\n";
  os << "  corner-eigenvalue  " << r_eigen << "\n";
  os << "  resistance         " << r_resist << "\n";
  os << "  hitting-time       " << r_hit << "\n";
  os << "return probability p = " << p_return << "  (r = 1 - p)\n";
  os << "expected hitting time H(q1,q2): Gamma_0 " << h0 << ", Gamma_1 " << h1 << "\n";
  os << "|V_m|:";
  for (int m = 0; m <= m_max; ++m) os << " " << vertex_census(params, m);
  os << "\n";
  if (samples > 0)
    os << "Monte Carlo return probability: " << std::setprecision(8) << walk.estimate
       << " +/- " << walk.standard_error << " (exact " << p_return << ", seed "
       << walk.seed << ")\n";
  return 0;
}

int run_graph(const CommonOpts& opts, int level) {
  const GasketParams params = gasket_params(opts.k);
  const LevelGraph g = build_level_graph(params, level);
  std::ofstream file;
  std::ostream& os = open_output(opts, file);
  if (opts.format == "csv") {
    os << "edge_a,edge_b\n";
    for (const auto& [a, b] : g.edges) os << a << "," << b << "\n";
    return 0;
  }
  os << json_graph(g).dump(2) << "\n";
  return 0;
}

int run_measure(const CommonOpts& opts, const std::string& word_text, int table_depth,
                int decay_levels) {
  const GasketParams params = gasket_params(opts.k);
  const HarmonicStructure hs = extension_tensor(params);
  std::ofstream file;
  std::ostream& os = open_output(opts, file);

  if (decay_levels > 0) {
    auto rows = decay_scan(hs, decay_levels);
    os << "level,max_prob,argmax,scaled\n";
    for (const auto& row : rows)
      os << row.level << "," << row.max_prob << "," << row.argmax.str() << ","
         << row.scaled << "\n";
    return 0;
  }
  if (table_depth > 0) {
    os << "word,nu0,nu1,nu2,prob\n";
    Word path;
    auto recurse = [&](auto&& self, int len) -> void {
      const MeasureVector mv = energy_cell_vector(hs, path);
      os << path.str() << "," << mv.nu(0) << "," << mv.nu(1) << "," << mv.nu(2) << ","
         << mv.prob() << "\n";
      if (len == table_depth) return;
      for (int s = 0; s < params.d; ++s) {
        path.append(s);
        self(self, len + 1);
        path = path.prefix(len);
      }
    };
    recurse(recurse, 0);
    return 0;
  }

  const Word w = Word::parse(word_text, params.d);
  if (opts.format == "csv") {
    const MeasureVector mv = energy_cell_vector(hs, w);
    os << "word,nu0,nu1,nu2,prob\n";
    os << w.str() << "," << mv.nu(0) << "," << mv.nu(1) << "," << mv.nu(2) << ","
       << mv.prob() << "\n";
    return 0;
  }
  os << json_measure(hs, w).dump(2) << "\n";
  return 0;
}

int run_selfsim(const CommonOpts& opts, bool print_matrices, bool verify_flag) {
  const GasketParams params = gasket_params(opts.k);
  const HarmonicStructure hs = extension_tensor(params);
  const MMatrixFamily mm = m_matrices(hs);
  std::ofstream file;
  std::ostream& os = open_output(opts, file);

  int exit_code = 0;
  if (verify_flag) {
    const int depth = opts.depth > 0 ? opts.depth : (params.d <= 6 ? 3 : 2);
    const IdentityReport vec = verify_vector_identity(hs, mm, depth);
    const IdentityReport wgt = weighted_identity_check(hs, mm, depth);
    os << (vec.ok ? "PASS" : "FAIL") << " vector identity to depth " << depth;
    if (!vec.ok) os << " (" << vec.detail << ")";
    os << "\n";
    os << (wgt.ok ? "PASS" : "FAIL") << " weighted identity to depth " << depth;
    if (!wgt.ok) os << " (" << wgt.detail << ")";
    os << "\n";
    exit_code = vec.ok && wgt.ok ? 0 : 1;
  }
  if (print_matrices || !verify_flag) {
    const std::vector<int> relabel = symmetry_order_relabeling(params);
    os << json_m_family(mm, &relabel).dump(2) << "\n";
  }
  return exit_code;
}

int run_laplacian(const CommonOpts& opts, const std::string& point_text, int levels,
                  const std::string& method) {
  const GasketParams params = gasket_params(opts.k);
  const HarmonicStructure hs = extension_tensor(params);

  const auto colon = point_text.find(':');
  if (colon == std::string::npos)
    throw std::domain_error("--point expects '<word>:<corner>', e.g. 0:1");
  const Word cell = Word::parse(point_text.substr(0, colon), params.d);
  const int corner = std::stoi(point_text.substr(colon + 1));
  const JunctionPoint x{cell, corner};

  // Default probe function: h_1^2 + h_2^2 for the energy route (constant
  // estimate 2), h_0^2 for the standard route.
  Vec3Q e0(Rational(1), Rational(0), Rational(0));
  LaplacianSequence seq;
  if (method == "energy")
    seq = delta_nu_estimate(hs, HarmonicForm::square(e0), x, cell.size() + levels);
  else if (method == "standard")
    seq = delta_mu_estimate(hs, HarmonicForm::square(e0), x, cell.size() + levels);
  else
    throw std::domain_error("--method must be 'energy' or 'standard'");

  std::ofstream file;
  std::ostream& os = open_output(opts, file);
  os << "level,raw,estimate,successive_diff\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < seq.estimate.size(); ++i) {
    os << (seq.m0 + static_cast<int>(i)) << "," << seq.raw[i].to_double() << ","
       << seq.estimate[i].to_double() << ",";
    if (i > 0) os << seq.successive_diff[i - 1];
    os << "\n";
  }
  return 0;
}

int run_mixing(const CommonOpts& opts, const std::string& a_text, const std::string& b_text,
               int n_max, const std::string& method, bool fit_flag) {
  const GasketParams params = gasket_params(opts.k);
  const HarmonicStructure hs = extension_tensor(params);
  const EnergyCoordinates ec = energy_orthobasis(hs);
  const Word a = Word::parse(a_text, params.d);
  const Word b = Word::parse(b_text, params.d);
  const CorrelationMethod cm =
      method == "brute" ? CorrelationMethod::kBrute : CorrelationMethod::kOperator;
  if (method != "brute" && method != "operator")
    throw std::domain_error("--method must be 'brute' or 'operator'");

  std::ofstream file;
  std::ostream& os = open_output(opts, file);
  os << "n,correlation,log_ratio\n";
  os << std::setprecision(17);
  double prev = 0.0;
  const int n_lo = std::max(0, b.size() - a.size());
  for (int n = n_lo; n <= n_max; ++n) {
    const double corr = correlation_exact(ec, a, b, n, cm);
    os << n << "," << corr << ",";
    if (n > n_lo && corr != 0.0 && prev != 0.0) os << std::log(std::abs(corr / prev));
    os << "\n";
    prev = corr;
  }
  if (fit_flag) {
    const RateFit fit = mixing_rate_fit(ec, a, b, std::max(n_lo, 5), n_max);
    os << "# rate," << fit.rate << "\n";
    os << "# reference_rate," << fit.reference_rate << "\n";
    os << "# constant," << fit.constant << "\n";
  }
  return 0;
}

int run_verify(const CommonOpts& opts, const std::string& suite) {
  const int depth = opts.depth > 0 ? opts.depth : (opts.k == 2 ? 5 : 3);
  const auto results = verify::run_suites(suite, opts.k, depth);
  std::ofstream file;
  std::ostream& os = open_output(opts, file);
  bool all_ok = true;
  for (const auto& suite_result : results) {
    for (const auto& check : suite_result.checks) {
      os << (check.ok ? "PASS" : "FAIL") << " [" << suite_result.suite << "] " << check.name;
      if (!check.detail.empty()) os << " -- " << check.detail;
      os << "\n";
      all_ok = all_ok && check.ok;
    }
  }
  os << (all_ok ? "OK" : "FAILED") << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact harmonic analysis on level-k Sierpinski gaskets"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* info = app.add_subcommand("info", "dimensions, renormalization constants, censuses");
  add_common(info, opts, /*with_seed=*/true);
  std::uint64_t info_samples = 0;
  info->add_option("--samples", info_samples,
                   "also run a Monte Carlo return-probability cross-check");

  auto* graph = app.add_subcommand("graph", "emit a level graph as JSON or CSV");
  add_common(graph, opts);
  int graph_level = 1;
  graph->add_option("--m", graph_level, "graph level m")->check(CLI::Range(0, 16));

  auto* measure = app.add_subcommand("measure", "Kusuoka measure of a cylinder");
  add_common(measure, opts);
  std::string word_text;
  int table_depth = 0, decay_levels = 0;
  measure->add_option("--word", word_text, "cell address, e.g. 012");
  measure->add_option("--table", table_depth, "emit CSV for all words up to this depth");
  measure->add_option("--decay", decay_levels, "emit the max-cylinder decay table");

  auto* selfsim = app.add_subcommand("selfsim", "cell transport matrices and identities");
  add_common(selfsim, opts);
  bool print_matrices = false, selfsim_verify = false;
  selfsim->add_flag("--print-matrices", print_matrices, "emit the M family as JSON");
  selfsim->add_flag("--verify", selfsim_verify, "run the exact identity checks");

  auto* laplacian = app.add_subcommand("laplacian", "pointwise Laplacian estimator sequences");
  add_common(laplacian, opts);
  std::string point_text = "0:1", lap_method = "energy";
  int lap_levels = 6;
  laplacian->add_option("--point", point_text, "junction as '<word>:<corner>'");
  laplacian->add_option("--levels", lap_levels, "number of refinement levels");
  laplacian->add_option("--method", lap_method, "energy or standard");

  auto* mixing = app.add_subcommand("mixing", "shift correlations of the Kusuoka measure");
  add_common(mixing, opts);
  std::string a_text = "0", b_text = "0", mix_method = "operator";
  int mix_n = 25;
  bool fit_flag = false;
  mixing->add_option("--a", a_text, "first cylinder word");
  mixing->add_option("--b", b_text, "second cylinder word");
  mixing->add_option("--n", mix_n, "largest shift");
  mixing->add_option("--method", mix_method, "operator or brute");
  mixing->add_flag("--fit", fit_flag, "append the fitted rate and constant");

  auto* verify_cmd = app.add_subcommand("verify", "run invariant suites, exit 0/1");
  add_common(verify_cmd, opts);
  std::string suite = "all";
  verify_cmd->add_option("--suite", suite,
                         "all, harmonic, measures, selfsim, laplacian or mixing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (info->parsed()) return run_info(opts, info_samples);
    if (graph->parsed()) return run_graph(opts, graph_level);
    if (measure->parsed()) return run_measure(opts, word_text, table_depth, decay_levels);
    if (selfsim->parsed()) return run_selfsim(opts, print_matrices, selfsim_verify);
    if (laplacian->parsed()) return run_laplacian(opts, point_text, lap_levels, lap_method);
    if (mixing->parsed()) return run_mixing(opts, a_text, b_text, mix_n, mix_method, fit_flag);
    if (verify_cmd->parsed()) return run_verify(opts, suite);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
