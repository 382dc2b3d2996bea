// Command-line driver: forward / adjoint / gradient / optimize / lipschitz /
// verify on a flat key-value run config.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ebopt/ebopt.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

std::string trace_path_for(const std::string& out) {
  std::filesystem::path p(out);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + "_trace.csv")).string();
}

int run_forward(const std::string& config, const std::string& out) {
  const ebopt::RunConfig cfg = ebopt::load_config(config);
  const ebopt::BeamProblem p = cfg.problem();
  const ebopt::EvolutionState s = ebopt::solve_forward(p, cfg.v0_field);
  ebopt::write_spacetime_field(out, s.u, p.grid());
  return kOk;
}

int run_adjoint(const std::string& config, const std::string& u_path, const std::string& out,
                std::string trace) {
  const ebopt::RunConfig cfg = ebopt::load_config(config);
  const ebopt::BeamProblem p = cfg.problem();
  const ebopt::SpaceTimeField u = ebopt::read_spacetime_field(u_path, p.grid());
  const ebopt::AdjointState a = ebopt::solve_adjoint(p, u);
  if (trace.empty()) trace = trace_path_for(out);
  ebopt::write_spacetime_field(out, a.psi, p.grid());
  ebopt::write_space_field(trace, a.trace_at_zero, p.grid());
  return kOk;
}

int run_gradient(const std::string& config, const std::string& v_path, const std::string& out) {
  const ebopt::RunConfig cfg = ebopt::load_config(config);
  const ebopt::BeamProblem p = cfg.problem();
  const ebopt::SpaceField v =
      v_path.empty() ? cfg.v0_field : ebopt::read_space_field(v_path, p.grid());
  ebopt::write_space_field(out, ebopt::gradient(p, v), p.grid());
  return kOk;
}

int run_optimize(const std::string& config, const std::string& vout, const std::string& report) {
  const ebopt::RunConfig cfg = ebopt::load_config(config);
  const ebopt::BeamProblem p = cfg.problem();
  const ebopt::OptimizationReport rep = ebopt::optimize(p, cfg.optimizer, cfg.v0_field);
  ebopt::write_space_field(vout, rep.final_v, p.grid());

  auto out = ebopt::open_output(report);
  out << "iter,cost,grad_norm,step\n";
  for (std::size_t k = 0; k < rep.cost_history.size(); ++k)
    out << k << ',' << ebopt::format_double(rep.cost_history[k]) << ','
        << ebopt::format_double(rep.grad_norm_history[k]) << ','
        << ebopt::format_double(rep.step_history[k]) << '\n';

  std::cout << "iterations=" << rep.iterations << " termination=" << to_string(rep.termination)
            << " initial_cost=" << ebopt::format_double(rep.cost_history.front())
            << " final_cost=" << ebopt::format_double(rep.final_cost)
            << " rejected_steps=" << rep.rejected_steps;
  if (rep.lipschitz_used) std::cout << " L_hat=" << ebopt::format_double(*rep.lipschitz_used);
  std::cout << " seed=" << rep.seed << '\n';
  return kOk;
}

int run_lipschitz(const std::string& config) {
  const ebopt::RunConfig cfg = ebopt::load_config(config);
  const ebopt::LipschitzEstimate est = ebopt::estimate_lipschitz(cfg.problem(), cfg.optimizer);
  std::cout << "L_hat=" << ebopt::format_double(est.value)
            << " residual=" << ebopt::format_double(est.residual)
            << " iterations=" << est.iterations << " converged=" << (est.converged ? "yes" : "no")
            << " seed=" << est.seed << '\n';
  return kOk;
}

int run_verify(const std::string& config, const std::string& suite_name, std::uint64_t seed) {
  const ebopt::Suite suite = ebopt::parse_suite(suite_name);
  const ebopt::RunConfig cfg = ebopt::load_config(config);
  ebopt::SuiteOptions opt;
  opt.seed = seed;
  const ebopt::VerificationReport rep =
      ebopt::run_verification(cfg.problem(), cfg.optimizer, cfg.v0_field, suite, opt);
  for (const auto& r : rep.records) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name
              << " measured=" << r.measured << " tol=" << r.tolerance << " [" << r.grids << "]";
    if (!r.detail.empty()) std::cout << ' ' << r.detail;
    std::cout << '\n';
  }
  return rep.passed() ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal initial velocity for a simply supported Euler-Bernoulli beam"};
  app.require_subcommand(1);

  std::string config, out, u_path, v_path, trace, vout, report, suite = "all";
  std::uint64_t seed = 7;

  auto* forward = app.add_subcommand("forward", "solve the state equation and write u");
  forward->add_option("--config", config)->required();
  forward->add_option("--out", out)->required();

  auto* adjoint = app.add_subcommand("adjoint", "solve the adjoint equation for a given u");
  adjoint->add_option("--config", config)->required();
  adjoint->add_option("--u", u_path)->required();
  adjoint->add_option("--out", out, "psi on the space-time grid")->required();
  adjoint->add_option("--trace", trace, "psi(., 0); defaults to <out>_trace.csv");

  auto* grad = app.add_subcommand("gradient", "write J'(v)");
  grad->add_option("--config", config)->required();
  grad->add_option("--v", v_path, "velocity CSV; defaults to v0 from the config");
  grad->add_option("--out", out)->required();

  auto* opt = app.add_subcommand("optimize", "projected gradient descent");
  opt->add_option("--config", config)->required();
  opt->add_option("--vout", vout)->required();
  opt->add_option("--report", report)->required();

  auto* lip = app.add_subcommand("lipschitz", "power-iteration estimate of the gradient Lipschitz constant");
  lip->add_option("--config", config)->required();

  auto* ver = app.add_subcommand("verify", "run verification checks");
  ver->add_option("--config", config)->required();
  ver->add_option("--suite", suite)
      ->check(CLI::IsMember({"all", "energy", "adjoint", "gradient", "vi", "order"}));
  ver->add_option("--seed", seed, "probe seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "ebopt: " << msg << '\n';
    return kUsage;
  }

  try {
    if (*forward) return run_forward(config, out);
    if (*adjoint) return run_adjoint(config, u_path, out, trace);
    if (*grad) return run_gradient(config, v_path, out);
    if (*opt) return run_optimize(config, vout, report);
    if (*lip) return run_lipschitz(config);
    if (*ver) return run_verify(config, suite, seed);
  } catch (const ebopt::Error& e) {
    std::cerr << "ebopt: " << e.what() << '\n';
    return e.is_numerical() ? kNumerical : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "ebopt: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
