// conncoef: connection coefficients, eigenvalues and eigenfunctions of the
// ellipsoidal and spheroidal wave equations from the command line.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conncoef/ellipsoidal.hpp"
#include "conncoef/errors.hpp"
#include "conncoef/spheroidal.hpp"

namespace ell = conncoef::ellipsoidal;
namespace sph = conncoef::spheroidal;
using json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, usage = 1, numerical = 2, no_seeds = 3 };

// Shortest round-trip form, which never needs more than 17 digits.
std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

struct Output {
  std::string path;
  void write(const std::string& text) const {
    if (path.empty() || path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << text;
  }
};

struct EllFlags {
  double gamma = 0.0;
  double c = 0.0;
  int rho = 0, sigma = 0, tau = 0;
  bool abramov = false;
  double k2 = 0.0, omega2 = 0.0;

  void add(CLI::App* app, bool with_tau, bool require_c) {
    auto* copt = app->add_option("--c", c, "third singular point, c > 1");
    app->add_option("--gamma", gamma, "coefficient of z^2");
    app->add_option("--rho", rho, "exponent flag at 0")->check(CLI::IsMember({0, 1}));
    app->add_option("--sigma", sigma, "exponent flag at 1")->check(CLI::IsMember({0, 1}));
    if (with_tau) app->add_option("--tau", tau, "exponent flag at c")->check(CLI::IsMember({0, 1}));
    if (require_c) {
      copt->required();
      return;
    }
    auto* ab = app->add_flag("--abramov", abramov, "parameters in (k^2, omega^2, H, L) form");
    app->add_option("--k2", k2, "k^2 (Abramov form)")->needs(ab);
    app->add_option("--omega2", omega2, "omega^2 (Abramov form)")->needs(ab);
  }

  ell::Problem problem() const {
    ell::Problem p;
    if (abramov) {
      const auto n = ell::from_abramov({k2, omega2, 0.0, 0.0});
      p.c = n.c;
      p.gamma = n.gamma;
    } else {
      p.c = c;
      p.gamma = gamma;
    }
    p.rho = rho;
    p.sigma = sigma;
    p.tau = tau;
    p.validate();
    return p;
  }

  // Native (lambda, mu) from either form of the spectral pair.
  std::pair<double, double> native(double a, double b) const {
    if (!abramov) return {a, b};
    const auto n = ell::from_abramov({k2, omega2, a, b});
    return {n.lambda, n.mu};
  }
  std::pair<double, double> display(double lambda, double mu) const {
    if (!abramov) return {lambda, mu};
    const auto a = ell::to_abramov({1.0 / k2, omega2 / 4.0, lambda, mu});
    return {a.h, a.l};
  }
};

struct Timer {
  bool enabled = false;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  void attach(json& j) const {
    if (!enabled) return;
    j["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Exit status_exit(conncoef::ThetaStatus s) {
  return s == conncoef::ThetaStatus::converged ? ok : numerical;
}

json theta_json(const conncoef::ThetaResult<conncoef::Complex>& r) {
  json j;
  j["theta_re"] = r.theta.real();
  j["theta_im"] = r.theta.imag();
  j["k"] = r.k_final;
  j["n"] = r.n;
  j["error_bound"] = r.error_bound;
  j["status"] = conncoef::to_string(r.status);
  j["estimate"] = r.estimate;
  j["tau_estimate_re"] = r.tau_estimate.real();
  j["tau_estimate_im"] = r.tau_estimate.imag();
  return j;
}

std::string theta_text(const conncoef::ThetaResult<conncoef::Complex>& r) {
  std::ostringstream o;
  o << "theta " << num(r.theta.real());
  if (r.theta.imag() != 0.0) o << " " << num(r.theta.imag()) << "i";
  o << "\nk " << r.k_final << "\nn " << r.n << "\nerror_bound " << num(r.error_bound)
    << "\nstatus " << conncoef::to_string(r.status) << "\n";
  return o.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"connection coefficients for ellipsoidal and spheroidal wave equations"};
  app.require_subcommand(1);
  Timer timer;
  app.add_flag("--timing", timer.enabled, "add wall time to JSON output");

  // theta-ell -----------------------------------------------------------------
  auto* th_ell = app.add_subcommand("theta-ell", "Theta (or Theta^ with --hat) for the ellipsoidal equation");
  EllFlags te;
  double te_lambda = 0.0, te_mu = 0.0, te_tol = 1e-10;
  long te_n = 5, te_kmax = 1'000'000;
  bool te_hat = false, te_json = false;
  th_ell->add_option("--lambda", te_lambda)->required();
  th_ell->add_option("--mu", te_mu)->required();
  te.add(th_ell, true, true);
  th_ell->add_option("--n", te_n, "acceleration order")->check(CLI::NonNegativeNumber);
  th_ell->add_option("--tol", te_tol)->check(CLI::PositiveNumber);
  th_ell->add_option("--kmax", te_kmax)->check(CLI::PositiveNumber);
  th_ell->add_flag("--hat", te_hat, "evaluate Theta^ with exponent flag tau");
  th_ell->add_flag("--json", te_json);

  // theta-sph -----------------------------------------------------------------
  auto* th_sph = app.add_subcommand("theta-sph", "Theta(t) for the spheroidal equation");
  double ts_t = 0.0, ts_mu = 0.0, ts_g2 = 0.0, ts_tol = 1e-12;
  long ts_n = 5, ts_kmax = 1'000'000;
  bool ts_json = false;
  th_sph->add_option("--t", ts_t, "shifted eigenvalue parameter t = lambda - mu(mu+1)")->required();
  th_sph->add_option("--mu", ts_mu);
  th_sph->add_option("--gamma2", ts_g2);
  th_sph->add_option("--n", ts_n)->check(CLI::NonNegativeNumber);
  th_sph->add_option("--tol", ts_tol)->check(CLI::PositiveNumber);
  th_sph->add_option("--kmax", ts_kmax)->check(CLI::PositiveNumber);
  th_sph->add_flag("--json", ts_json);

  // eigen-ell -----------------------------------------------------------------
  auto* ei_ell = app.add_subcommand("eigen-ell", "eigenpairs (lambda, mu) of the ellipsoidal equation");
  EllFlags ee;
  ee.add(ei_ell, true, false);
  std::vector<double> ee_seeds;
  std::vector<double> ee_lrange{-0.5, 10.0}, ee_mrange{-8.0, 0.5};
  int ee_res = 41;
  long ee_n = 5;
  double ee_tol = 1e-9;
  bool ee_json = false;
  ei_ell->add_option("--seed", ee_seeds, "seed pair(s) lambda mu (H L with --abramov)")
      ->expected(2, CLI::detail::expected_max_vector_size);
  ei_ell->add_option("--lambda-range", ee_lrange)->expected(2);
  ei_ell->add_option("--mu-range", ee_mrange)->expected(2);
  ei_ell->add_option("--resolution", ee_res, "grid nodes per axis")->check(CLI::Range(2, 100000));
  ei_ell->add_option("--n", ee_n)->check(CLI::NonNegativeNumber);
  ei_ell->add_option("--tol", ee_tol)->check(CLI::PositiveNumber);
  ei_ell->add_flag("--json", ee_json);

  // eigen-sph -----------------------------------------------------------------
  auto* ei_sph = app.add_subcommand("eigen-sph", "eigenvalues of the spheroidal equation");
  double es_mu = 0.0, es_g2 = 0.0, es_tol = 1e-12;
  int es_count = 8;
  long es_n = 5;
  bool es_csv = false, es_json = false;
  ei_sph->add_option("--mu", es_mu);
  ei_sph->add_option("--gamma2", es_g2);
  ei_sph->add_option("--count", es_count)->check(CLI::PositiveNumber);
  ei_sph->add_option("--n", es_n)->check(CLI::NonNegativeNumber);
  ei_sph->add_option("--tol", es_tol)->check(CLI::PositiveNumber);
  auto* csv_flag = ei_sph->add_flag("--csv", es_csv);
  ei_sph->add_flag("--json", es_json)->excludes(csv_flag);

  // scan ----------------------------------------------------------------------
  auto* scan = app.add_subcommand("scan", "sample Theta on a grid (CSV or JSON)");
  std::string sc_kind = "ell", sc_format = "csv";
  EllFlags sce;
  sce.add(scan, true, false);
  double sc_mu = 0.0, sc_g2 = 0.0, sc_tol = 1e-10;
  std::vector<double> sc_lrange{-30.0, 90.0}, sc_mrange{-90.0, 30.0}, sc_trange{-5.0, 60.0};
  int sc_res = 21;
  long sc_n = 5;
  Output sc_out;
  scan->add_option("--problem", sc_kind)->check(CLI::IsMember({"ell", "sph"}));
  scan->add_option("--mu", sc_mu, "spheroidal order");
  scan->add_option("--gamma2", sc_g2, "spheroidal gamma^2");
  scan->add_option("--lambda-range", sc_lrange)->expected(2);
  scan->add_option("--mu-range", sc_mrange)->expected(2);
  scan->add_option("--t-range", sc_trange)->expected(2);
  scan->add_option("--resolution", sc_res)->check(CLI::Range(2, 1000000));
  scan->add_option("--n", sc_n)->check(CLI::NonNegativeNumber);
  scan->add_option("--tol", sc_tol)->check(CLI::PositiveNumber);
  scan->add_option("--format", sc_format)->check(CLI::IsMember({"csv", "json"}));
  scan->add_option("--output,-o", sc_out.path);

  // eigenfunction -------------------------------------------------------------
  auto* efn = app.add_subcommand("eigenfunction", "sample an eigenfunction (CSV)");
  std::string ef_kind = "ell", ef_norm = "none";
  EllFlags efe;
  efe.add(efn, true, false);
  double ef_lambda = 0.0, ef_mu_ell = 0.0, ef_mu = 0.0, ef_g2 = 0.0;
  int ef_index = 0, ef_samples = 201;
  bool ef_no_refine = false;
  Output ef_out;
  efn->add_option("--problem", ef_kind)->check(CLI::IsMember({"ell", "sph"}));
  efn->add_option("--lambda", ef_lambda, "ellipsoidal lambda (H with --abramov)");
  efn->add_option("--mu-ell", ef_mu_ell, "ellipsoidal mu (L with --abramov)");
  efn->add_flag("--no-refine", ef_no_refine, "use the given pair without a Broyden solve");
  efn->add_option("--mu", ef_mu, "spheroidal order");
  efn->add_option("--gamma2", ef_g2, "spheroidal gamma^2");
  efn->add_option("--index", ef_index, "spheroidal eigenvalue index N")->check(CLI::NonNegativeNumber);
  efn->add_option("--samples", ef_samples)->check(CLI::Range(2, 10000000));
  efn->add_option("--normalize", ef_norm)->check(CLI::IsMember({"none", "sup", "integral"}));
  efn->add_option("--output,-o", ef_out.path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*th_ell) {
      const ell::Problem p = te.problem();
      ell::Options o;
      o.n = te_n;
      o.tol = te_tol;
      o.k_max = te_kmax;
      const auto r = te_hat ? ell::theta_hat(te_lambda, te_mu, p, o) : ell::theta(te_lambda, te_mu, p, o);
      if (te_json) {
        json j;
        j["command"] = te_hat ? "theta-ell --hat" : "theta-ell";
        j["inputs"] = {{"lambda", te_lambda}, {"mu", te_mu}, {"gamma", te.gamma}, {"c", te.c},
                       {"rho", te.rho}, {"sigma", te.sigma}, {"tau", te.tau}, {"tol", te_tol}};
        j.update(theta_json(r));
        timer.attach(j);
        std::cout << j.dump() << "\n";
      } else {
        std::cout << theta_text(r);
      }
      return status_exit(r.status);
    }

    if (*th_sph) {
      const sph::Problem p{ts_mu, ts_g2};
      p.validate();
      sph::Options o;
      o.n = ts_n;
      o.tol = ts_tol;
      o.k_max = ts_kmax;
      const auto r = sph::theta_t(ts_t, p, o);
      if (ts_json) {
        json j;
        j["command"] = "theta-sph";
        j["inputs"] = {{"t", ts_t}, {"mu", ts_mu}, {"gamma2", ts_g2}, {"tol", ts_tol}};
        j.update(theta_json(r));
        timer.attach(j);
        std::cout << j.dump() << "\n";
      } else {
        std::cout << theta_text(r);
      }
      return status_exit(r.status);
    }

    if (*ei_ell) {
      const ell::Problem p = ee.problem();
      ell::SolveOptions so;
      so.n = ee_n;
      so.solver.tol_residual = ee_tol;
      std::vector<ell::Seed> seeds;
      if (!ee_seeds.empty()) {
        if (ee_seeds.size() % 2 != 0) {
          std::cerr << "--seed takes pairs of values\n";
          return usage;
        }
        for (std::size_t i = 0; i < ee_seeds.size(); i += 2) {
          const auto [l, m] = ee.native(ee_seeds[i], ee_seeds[i + 1]);
          seeds.push_back({l, m});
        }
      } else {
        const auto [l0, m0] = ee.native(ee_lrange[0], ee_mrange[0]);
        const auto [l1, m1] = ee.native(ee_lrange[1], ee_mrange[1]);
        ell::Options o;
        o.n = ee_n;
        const auto grid = ell::scan_grid(p, {std::min(l0, l1), std::max(l0, l1)},
                                         {std::min(m0, m1), std::max(m0, m1)}, ee_res, ee_res, o);
        seeds = grid.seeds;
      }
      if (seeds.empty()) {
        std::cerr << "no seeds found\n";
        return no_seeds;
      }
      const auto pairs = ell::solve_seeds(seeds, p, so, 1e-6);
      std::ostringstream text;
      for (const auto& e : pairs) {
        const auto [a, b] = ee.display(e.lambda.real(), e.mu.real());
        if (ee_json) {
          json j;
          j[ee.abramov ? "H" : "lambda"] = a;
          j[ee.abramov ? "L" : "mu"] = b;
          j["residual_theta"] = e.residual_theta;
          j["residual_theta_hat"] = e.residual_theta_hat;
          j["iterations"] = e.iterations;
          timer.attach(j);
          text << j.dump() << "\n";
        } else {
          text << num(a) << " " << num(b) << " " << num(e.residual_theta) << " "
               << num(e.residual_theta_hat) << " " << e.iterations << "\n";
        }
      }
      std::cout << text.str();
      return pairs.empty() ? numerical : ok;
    }

    if (*ei_sph) {
      const sph::Problem p{es_mu, es_g2};
      sph::EigenvalueOptions o;
      o.n = es_n;
      o.tol = es_tol;
      auto eigs = sph::eigenvalues(p, es_count, o);
      for (auto& e : eigs) {
        try {
          e.parity = sph::eigenfunction(e, p).parity();
        } catch (const conncoef::Error&) {
          e.parity = 0;
        }
      }
      std::ostringstream text;
      if (es_csv) text << "N,lambda,parity,residual\n";
      for (const auto& e : eigs) {
        if (es_csv) {
          text << e.index << "," << num(e.lambda.real()) << "," << e.parity << "," << num(e.residual) << "\n";
        } else if (es_json) {
          json j;
          j["N"] = e.index;
          j["t"] = e.t_root.real();
          j["lambda"] = e.lambda.real();
          j["parity"] = e.parity;
          j["residual"] = e.residual;
          timer.attach(j);
          text << j.dump() << "\n";
        } else {
          text << e.index << " " << num(e.lambda.real()) << " " << (e.parity > 0 ? "+" : e.parity < 0 ? "-" : "?")
               << " " << num(e.residual) << "\n";
        }
      }
      std::cout << text.str();
      return ok;
    }

    if (*scan) {
      std::ostringstream text;
      bool all_ok = true;
      if (sc_kind == "ell") {
        const ell::Problem p = sce.problem();
        ell::Options o;
        o.n = sc_n;
        o.tol = sc_tol;
        const auto grid = ell::scan_grid(p, {sc_lrange[0], sc_lrange[1]}, {sc_mrange[0], sc_mrange[1]},
                                         sc_res, sc_res, o);
        all_ok = grid.all_converged;
        if (sc_format == "csv") {
          text << "lambda,mu,theta,theta_hat\n";
          for (const auto& n : grid.nodes) {
            text << num(n.lambda) << "," << num(n.mu) << "," << num(n.theta) << "," << num(n.theta_hat) << "\n";
          }
        } else {
          json j;
          j["command"] = "scan";
          j["problem"] = "ell";
          j["all_converged"] = grid.all_converged;
          json rows = json::array();
          for (const auto& n : grid.nodes) {
            rows.push_back({{"lambda", n.lambda}, {"mu", n.mu}, {"theta", n.theta}, {"theta_hat", n.theta_hat},
                            {"converged", n.converged}});
          }
          j["nodes"] = std::move(rows);
          json seeds = json::array();
          for (const auto& s : grid.seeds) seeds.push_back({{"lambda", s.lambda}, {"mu", s.mu}});
          j["seeds"] = std::move(seeds);
          timer.attach(j);
          text << j.dump() << "\n";
        }
      } else {
        const sph::Problem p{sc_mu, sc_g2};
        p.validate();
        sph::Options o;
        o.n = sc_n;
        o.tol = sc_tol;
        json rows = json::array();
        if (sc_format == "csv") text << "t,theta\n";
        for (int i = 0; i < sc_res; ++i) {
          const double t = sc_trange[0] + (sc_trange[1] - sc_trange[0]) * i / (sc_res - 1);
          double v = std::nan("");
          try {
            const auto r = sph::theta_t(t, p, o);
            all_ok = all_ok && r.status == conncoef::ThetaStatus::converged;
            v = r.theta.real();
          } catch (const conncoef::Error&) {
            all_ok = false;
          }
          if (sc_format == "csv") {
            text << num(t) << "," << num(v) << "\n";
          } else {
            rows.push_back({{"t", t}, {"theta", v}});
          }
        }
        if (sc_format == "json") {
          json j;
          j["command"] = "scan";
          j["problem"] = "sph";
          j["all_converged"] = all_ok;
          j["nodes"] = std::move(rows);
          timer.attach(j);
          text << j.dump() << "\n";
        }
      }
      sc_out.write(text.str());
      return all_ok ? ok : numerical;
    }

    if (*efn) {
      std::ostringstream text;
      if (ef_kind == "ell") {
        const ell::Problem p = efe.problem();
        const auto [l, m] = efe.native(ef_lambda, ef_mu_ell);
        ell::EigenPair pair{l, m, 0.0, 0.0, 0};
        if (!ef_no_refine) pair = ell::solve_pair(l, m, p);
        ell::Eigenfunction fn = ell::eigenfunction(pair, p);
        if (ef_norm == "sup") fn = ell::normalize(fn, ell::Normalization::sup);
        if (ef_norm == "integral") fn = ell::normalize(fn, ell::Normalization::integral);
        text << "z,w\n";
        for (double z : ell::sup_grid(p.c, ef_samples)) text << num(z) << "," << num(fn.value(z)) << "\n";
      } else {
        const sph::Problem p{ef_mu, ef_g2};
        const auto eigs = sph::eigenvalues(p, ef_index + 1);
        const auto fn = sph::eigenfunction(eigs.back(), p);
        double peak = 0.0;
        std::vector<std::pair<double, double>> rows;
        for (int i = 0; i < ef_samples; ++i) {
          const double x = -1.0 + 2.0 * (i + 1) / (ef_samples + 1.0);
          rows.emplace_back(x, fn.value(x));
          peak = std::max(peak, std::abs(rows.back().second));
        }
        if (ef_norm == "integral") {
          std::cerr << "integral normalization applies to ellipsoidal functions only\n";
          return usage;
        }
        const double s = ef_norm == "sup" && peak > 0.0 ? 1.0 / peak : 1.0;
        text << "x,w\n";
        for (const auto& [x, w] : rows) text << num(x) << "," << num(s * w) << "\n";
      }
      ef_out.write(text.str());
      return ok;
    }
  } catch (const conncoef::InvalidProblem& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return usage;
  } catch (const conncoef::InvalidExponent& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numerical;
  }
  return usage;
}
