#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rtk/example1.hpp"
#include "rtk/io.hpp"
#include "rtk/perturb.hpp"
#include "rtk/spectral.hpp"

namespace {

using rtk::Json;

constexpr std::uint64_t kDefaultSeed = 20240607;

std::uint64_t default_seed() {
  const char* env = std::getenv("RTK_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') rtk::fail(rtk::ErrorCode::kValidationError, "RTK_SEED must be a non-negative integer");
  return v;
}

void emit(const Json& j, const std::string& path) {
  const std::string text = rtk::dump_canonical(j);
  if (path.empty()) {
    std::cout << text;
  } else {
    rtk::write_file(path, text);
  }
}

std::vector<double> parse_deltas(const std::string& spec) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      rtk::fail(rtk::ErrorCode::kValidationError, "--deltas: cannot read '" + s + "'");
    }
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) rtk::fail(rtk::ErrorCode::kValidationError, "--deltas: expected start:step:stop");
    const double a = number(parts[0]), step = number(parts[1]), b = number(parts[2]);
    if (!(step > 0.0) || b < a) rtk::fail(rtk::ErrorCode::kValidationError, "--deltas: empty range");
    const long n = std::lround(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back(a + step * static_cast<double>(k));
  } else {
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) rtk::fail(rtk::ErrorCode::kValidationError, "--deltas: no values");
  return out;
}

std::string history_path(const std::string& output) {
  std::filesystem::path p(output);
  p.replace_extension();
  return p.string() + ".history.csv";
}

void write_history(const rtk::ArteReport& report, std::ostream& os) {
  os << "iteration,residual,log10_residual\n" << std::setprecision(17);
  os << 0 << ',' << report.initial_residual << ',' << std::log10(report.initial_residual) << '\n';
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    const double r = report.residual_history[k];
    os << k + 1 << ',' << r << ',' << std::log10(r) << '\n';
  }
}

Json eigen_json(const std::vector<rtk::Complex>& values) { return rtk::complex_list_to_json(values); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paired tensor equations: Riccati, Lyapunov, Sylvester, H-infinity and perturbation analysis"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Solve a tensor equation");
  solve->require_subcommand(1);

  // solve arte
  auto* arte = solve->add_subcommand("arte", "Algebraic Riccati tensor equation");
  std::string input, output, history, method = "newton", inner = "direct";
  double eps = 1e-8, inner_tol = 1e-4;
  int max_iter = 50;
  arte->add_option("--input", input, "Problem document")->required();
  arte->add_option("--method", method, "newton or schur")->check(CLI::IsMember({"newton", "schur"}));
  auto* eps_opt = arte->add_option("--eps", eps, "Outer residual tolerance");
  auto* inner_opt = arte->add_option("--inner", inner, "Inner Lyapunov solver")
                        ->check(CLI::IsMember({"direct", "bicg-tensor", "bicg-vec"}));
  auto* inner_tol_opt = arte->add_option("--inner-tol", inner_tol, "Inner absolute residual tolerance");
  auto* max_iter_opt = arte->add_option("--max-iter", max_iter, "Newton iteration cap");
  arte->add_option("--output", output, "Report file (default standard output)");
  arte->add_option("--history", history, "Residual history CSV (default next to --output)");

  // solve lyap / sylv
  auto* lyap = solve->add_subcommand("lyap", "Lyapunov tensor equation A^H E + E A + Q = O");
  std::string lyap_method = "direct";
  lyap->add_option("--input", input, "Problem document")->required();
  lyap->add_option("--method", lyap_method, "direct, bicg-tensor or bicg-vec")
      ->check(CLI::IsMember({"direct", "bicg-tensor", "bicg-vec"}));
  lyap->add_option("--output", output, "Result file (default standard output)");

  auto* sylv = solve->add_subcommand("sylv", "Sylvester tensor equation A X + X B = K");
  std::string sylv_method = "direct";
  sylv->add_option("--input", input, "Problem document")->required();
  sylv->add_option("--method", sylv_method, "direct or bicg")->check(CLI::IsMember({"direct", "bicg"}));
  sylv->add_option("--output", output, "Result file (default standard output)");

  auto* analyze = app.add_subcommand("analyze", "System and sensitivity analysis");
  analyze->require_subcommand(1);

  auto* hinf = analyze->add_subcommand("hinf", "H-infinity norm by Hamiltonian bisection");
  double rel_tol = 1e-4;
  hinf->add_option("--input", input, "System document")->required();
  hinf->add_option("--rel-tol", rel_tol, "Relative bisection width");

  auto* brl = analyze->add_subcommand("brl", "Bounded real lemma verdicts");
  double gamma = 0.0;
  brl->add_option("--input", input, "System document")->required();
  brl->add_option("--gamma", gamma, "Level gamma")->required();

  auto* perturb = analyze->add_subcommand("perturb", "Condition bounds and randomized perturbation runs");
  std::string deltas = "1e-8:1e-8:9.9e-7", csv;
  int trials = 3;
  std::uint64_t seed = 0;
  bool real_da = true;
  perturb->add_option("--input", input, "ARTE problem document")->required();
  perturb->add_option("--deltas", deltas, "start:step:stop or a comma list");
  perturb->add_option("--trials", trials, "Trials per delta")->check(CLI::NonNegativeNumber);
  auto* seed_opt = perturb->add_option("--seed", seed, "RNG seed (default RTK_SEED or built-in)");
  perturb->add_flag("--real-da,!--complex-da", real_da, "Real (default) or complex dA");
  perturb->add_option("--csv", csv, "Per-sample CSV");
  perturb->add_option("--output", output, "Summary file (default standard output)");

  auto* spectrum = app.add_subcommand("spectrum", "U-eigenvalues and stability verdict");
  std::string field;
  spectrum->add_option("--input", input, "Tensor or problem document")->required();
  spectrum->add_option("--tensor", field, "Tensor field of a problem document (default A)");
  bool closed_loop = false;
  spectrum->add_flag("--closed-loop", closed_loop, "For an ARTE document: spectrum of A - G E with E solved");

  auto* demo = app.add_subcommand("demo", "Embedded examples");
  demo->require_subcommand(1);
  auto* ex1 = demo->add_subcommand("example1", "Fourth-order Riccati example with rank-one coefficients");
  bool check = false;
  std::string fixture;
  ex1->add_flag("--check", check, "Assert the reference values");
  ex1->add_option("--fixture", fixture, "Write the example as an ARTE problem document and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (arte->parsed()) {
      const rtk::ProblemDocument doc = rtk::load_problem(input);
      const rtk::ArteProblem problem = rtk::to_arte_problem(doc);
      if (eps_opt->count() == 0) eps = rtk::option_number(doc, "eps", eps);
      if (inner_opt->count() == 0) inner = rtk::option_string(doc, "inner", inner);
      if (inner_tol_opt->count() == 0) inner_tol = rtk::option_number(doc, "inner_tol", inner_tol);
      if (max_iter_opt->count() == 0) max_iter = static_cast<int>(rtk::option_number(doc, "max_iter", max_iter));
      rtk::ArteReport report;
      if (method == "schur") {
        report = rtk::arte_schur_solve(problem);
      } else {
        rtk::NewtonOptions o;
        o.inner = rtk::parse_lyapunov_method(inner);
        o.eps = eps;
        o.inner_tol = inner_tol;
        o.max_iter = max_iter;
        report = doc.E0 ? rtk::newton_arte(problem, rtk::to_dense(*doc.E0), o) : rtk::newton_arte(problem, o);
      }
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      emit(rtk::report_to_json(report), output);
      if (history.empty() && !output.empty()) history = history_path(output);
      if (!history.empty()) {
        std::ofstream os(history);
        if (!os) rtk::fail(rtk::ErrorCode::kValidationError, "cannot write '" + history + "'");
        write_history(report, os);
      }
      return 0;
    }

    if (lyap->parsed()) {
      const rtk::ProblemDocument doc = rtk::load_problem(input);
      if (doc.kind != "lyapunov") rtk::fail(rtk::ErrorCode::kValidationError, "kind: expected lyapunov");
      const rtk::PairedTensor a = doc.tensor("A"), q = doc.tensor("Q");
      rtk::BicgResult stats;
      const rtk::PairedTensor e =
          rtk::lyapunov_solve(a, q, rtk::parse_lyapunov_method(lyap_method), {}, &stats);
      Json j;
      j["method"] = lyap_method;
      j["E"] = rtk::tensor_to_json(e);
      j["residual"] = rtk::frobenius_norm(rtk::conj_transpose(a) * e + e * a + q);
      j["iterations"] = stats.iterations;
      emit(j, output);
      return 0;
    }

    if (sylv->parsed()) {
      const rtk::ProblemDocument doc = rtk::load_problem(input);
      if (doc.kind != "sylvester") rtk::fail(rtk::ErrorCode::kValidationError, "kind: expected sylvester");
      const rtk::PairedTensor a = doc.tensor("A"), b = doc.tensor("B"), k = doc.tensor("K");
      const rtk::PairedTensor x = rtk::sylvester_solve(
          a, b, k, sylv_method == "bicg" ? rtk::SylvesterMethod::kBicg : rtk::SylvesterMethod::kDirect);
      Json j;
      j["method"] = sylv_method;
      j["X"] = rtk::tensor_to_json(x);
      j["residual"] = rtk::frobenius_norm(a * x + x * b - k);
      emit(j, output);
      return 0;
    }

    if (hinf->parsed()) {
      const rtk::MltiSystem sys = rtk::to_system(rtk::load_problem(input));
      const rtk::HinfResult h = rtk::hinf_norm(sys, rel_tol);
      emit(Json{{"hinf", h.value}, {"lower", h.lower}, {"upper", h.upper}, {"iterations", h.iterations}}, "");
      return 0;
    }

    if (brl->parsed()) {
      const rtk::MltiSystem sys = rtk::to_system(rtk::load_problem(input));
      const rtk::BrlVerdict v = rtk::bounded_real_check(sys, gamma);
      emit(Json{{"gamma", v.gamma},
                {"hinf", v.hinf},
                {"norm_below_gamma", v.norm_below_gamma},
                {"hamiltonian_axis_free", v.hamiltonian_axis_free},
                {"riccati_solution", v.riccati_solution},
                {"riccati_min_eigenvalue", v.riccati_min_eigenvalue},
                {"riccati_residual", v.riccati_residual},
                {"riccati_note", v.riccati_note},
                {"consistent", v.consistent()}},
           "");
      return 0;
    }

    if (perturb->parsed()) {
      const rtk::ProblemDocument doc = rtk::load_problem(input);
      const rtk::ArteProblem problem = rtk::to_arte_problem(doc);
      if (seed_opt->count() == 0) seed = default_seed();
      rtk::NewtonOptions tight;
      tight.eps = 1e-12;
      const rtk::ArteReport base =
          doc.E0 ? rtk::newton_arte(problem, rtk::to_dense(*doc.E0), tight) : rtk::newton_arte(problem, tight);
      rtk::PerturbConfig config;
      config.real_delta_A = real_da;
      config.delta_scales = parse_deltas(deltas);
      const rtk::PerturbReport r = rtk::random_perturbation_suite(problem, base.E, config, trials, seed);
      if (!csv.empty()) {
        std::ofstream os(csv);
        if (!os) rtk::fail(rtk::ErrorCode::kValidationError, "cannot write '" + csv + "'");
        rtk::write_perturbation_csv(r, os);
      }
      Json rows = Json::array();
      for (double d : config.delta_scales) {
        double worst = 0.0;
        int n = 0;
        for (const auto& s : r.samples) {
          if (s.delta != d || !s.ok) continue;
          worst = std::max(worst, s.relative_error);
          ++n;
        }
        rows.push_back(Json{{"delta", d}, {"samples", n}, {"max_relative_error", worst}});
      }
      Json failures = Json::array();
      for (const auto& s : r.samples) {
        if (!s.ok) failures.push_back(Json{{"delta", s.delta}, {"trial", s.trial}, {"message", s.message}});
      }
      emit(Json{{"seed", r.seed},
                {"real_delta_A", real_da},
                {"kappa1_upper", r.kappa.kappa1_upper},
                {"kappa2_upper", r.kappa.kappa2_upper},
                {"kappa3_upper", r.kappa.kappa3_upper},
                {"eta_c", r.kappa.eta_c},
                {"per_delta", rows},
                {"failures", failures}},
           output);
      return r.failures == 0 ? 0 : 4;
    }

    if (spectrum->parsed()) {
      const std::string text = rtk::read_file(input);
      rtk::PairedTensor t;
      Json probe;
      try {
        probe = Json::parse(text);
      } catch (const Json::parse_error&) {
        rtk::parse_problem(text);  // rethrows with line and column
      }
      if (probe.is_object() && probe.contains("kind")) {
        const rtk::ProblemDocument doc = rtk::parse_problem(text);
        if (closed_loop) {
          const rtk::ArteProblem problem = rtk::to_arte_problem(doc);
          const rtk::ArteReport r = rtk::arte_schur_solve(problem);
          t = problem.A - problem.G * r.E;
        } else {
          t = doc.tensor(field.empty() ? "A" : field);
        }
      } else {
        t = rtk::to_dense(rtk::tensor_from_json(probe, "tensor"));
      }
      const std::vector<rtk::Complex> ev = rtk::u_eigenvalues(t);
      emit(Json{{"eigenvalues", eigen_json(ev)}, {"stable", rtk::is_stable(ev)}}, "");
      return 0;
    }

    if (ex1->parsed()) {
      namespace ex = rtk::example1;
      if (!fixture.empty()) {
        rtk::ProblemDocument doc;
        doc.kind = "arte";
        doc.tensors.emplace("A", ex::gcpd_A());
        doc.tensors.emplace("B", ex::gcpd_B());
        doc.tensors.emplace("C", ex::gcpd_C());
        doc.E0 = ex::initial_guess();
        doc.options = Json{{"eps", 1e-6}, {"inner", "bicg-tensor"}, {"inner_tol", 1e-4}};
        rtk::write_file(fixture, rtk::serialize(doc));
        return 0;
      }
      const rtk::ArteProblem problem = ex::problem();
      const rtk::ArteReport r = rtk::newton_arte(problem, ex::initial_guess(), ex::reference_newton_options());
      const rtk::ConditionNumbers k = rtk::condition_numbers(problem, r.E, {});
      std::cout << std::setprecision(6);
      std::cout << "Newton iterations: " << r.iterations << "\nresidual ||f(E)||_F: " << std::scientific << r.residual
                << std::defaultfloat << '\n';
      for (int l = 1; l <= 2; ++l) {
        for (int kk = 1; kk <= 2; ++kk) {
          std::cout << "E(:,:," << kk << ',' << l << ") =\n" << ex::slice(r.E, kk, l).real() << '\n';
        }
      }
      std::cout << "closed-loop U-eigenvalues:";
      for (const auto& z : r.closed_loop_eigenvalues) std::cout << ' ' << z;
      std::cout << "\nsmallest U-eigenvalue of E: " << r.psd_certificate << '\n';
      std::cout << "kappa1_upper " << k.kappa1_upper << ", kappa2_upper " << k.kappa2_upper << ", kappa3_upper "
                << k.kappa3_upper << '\n';
      if (!check) return 0;
      bool all = true;
      for (const auto& c : ex::run_checks(default_seed())) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.passed;
      }
      return all ? 0 : 5;
    }
  } catch (const rtk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rtk::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
