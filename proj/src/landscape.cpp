#include "gpland/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpland/errors.hpp"

namespace gpland {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

struct Eval {
  double value;
  Eigen::VectorXd grad;
};

Eval evaluate(const Objective& f, const Eigen::VectorXd& x) {
  Eval e;
  e.grad.resize(x.size());
  e.value = finite_or_inf(f(x, &e.grad));
  if (!e.grad.allFinite()) e.value = kInf;
  return e;
}

// Strong-Wolfe line search (bracket + zoom). Returns the accepted step, or
// nullopt when no acceptable step exists along p.
struct LineSearchResult {
  double alpha;
  Eval eval;
};

std::optional<LineSearchResult> wolfe_line_search(const Objective& f,
                                                  const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& p,
                                                  double f0, double dphi0) {
  constexpr double c1 = 1e-4;
  constexpr double c2 = 0.9;
  constexpr int kMaxBracket = 20;
  constexpr int kMaxZoom = 30;

  auto phi = [&](double a) { return evaluate(f, x + a * p); };

  auto zoom = [&](double lo, double f_lo, double hi) -> std::optional<LineSearchResult> {
    for (int it = 0; it < kMaxZoom; ++it) {
      const double a = 0.5 * (lo + hi);
      Eval e = phi(a);
      const double dphi = e.value < kInf ? e.grad.dot(p) : kInf;
      if (e.value > f0 + c1 * a * dphi0 || e.value >= f_lo) {
        hi = a;
      } else {
        if (std::fabs(dphi) <= -c2 * dphi0) {
          return LineSearchResult{a, std::move(e)};
        }
        if (dphi * (hi - lo) >= 0.0) hi = lo;
        lo = a;
        f_lo = e.value;
      }
      if (std::fabs(hi - lo) < 1e-16 * std::max(1.0, std::fabs(lo))) break;
    }
    // Fall back to the best sufficient-decrease point found.
    Eval e = phi(lo);
    if (e.value < f0 + c1 * lo * dphi0 && lo > 0.0) {
      return LineSearchResult{lo, std::move(e)};
    }
    return std::nullopt;
  };

  double a_prev = 0.0;
  double f_prev = f0;
  double a = 1.0;
  for (int it = 0; it < kMaxBracket; ++it) {
    Eval e = phi(a);
    if (e.value > f0 + c1 * a * dphi0 || (it > 0 && e.value >= f_prev)) {
      return zoom(a_prev, f_prev, a);
    }
    const double dphi = e.grad.dot(p);
    if (std::fabs(dphi) <= -c2 * dphi0) {
      return LineSearchResult{a, std::move(e)};
    }
    if (dphi >= 0.0) {
      return zoom(a, e.value, a_prev);
    }
    a_prev = a;
    f_prev = e.value;
    a *= 2.0;
    if (a > 1e8) break;
  }
  return std::nullopt;
}

struct RawMinimum {
  Eigen::VectorXd theta;
  double loss;
  double grad_norm;
};

bool theta_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

LocalResult local_minimize(const Objective& objective,
                           const Eigen::VectorXd& start,
                           const LocalMinimizeOptions& options) {
  const int dim = static_cast<int>(start.size());
  LocalResult out;
  out.theta = start;

  Eval cur = evaluate(objective, start);
  if (!std::isfinite(cur.value)) {
    out.loss = cur.value;
    out.grad_norm = kInf;
    return out;  // caller retries from a fresh sample
  }

  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;
  Eigen::VectorXd x = start;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter;
    const double gnorm = cur.grad.norm();
    if (gnorm <= options.grad_tol) {
      out.theta = x;
      out.loss = cur.value;
      out.grad_norm = gnorm;
      out.converged = true;
      return out;
    }

    // Two-loop recursion.
    Eigen::VectorXd q = cur.grad;
    const int m = static_cast<int>(s_hist.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (m > 0) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd p = -q;

    double dphi0 = p.dot(cur.grad);
    if (!(dphi0 < 0.0)) {  // not a descent direction: restart from steepest
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      p = -cur.grad;
      dphi0 = -cur.grad.squaredNorm();
    }

    auto ls = wolfe_line_search(objective, x, p, cur.value, dphi0);
    if (!ls && !s_hist.empty()) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      p = -cur.grad;
      dphi0 = -cur.grad.squaredNorm();
      ls = wolfe_line_search(objective, x, p, cur.value, dphi0);
    }
    if (!ls) break;

    const Eigen::VectorXd x_new = x + ls->alpha * p;
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = ls->eval.grad - cur.grad;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    x = x_new;
    cur = std::move(ls->eval);
  }

  out.theta = x;
  out.loss = cur.value;
  out.grad_norm = cur.grad.norm();
  out.converged = out.grad_norm <= options.grad_tol;
  return out;
}

bool metropolis_accept(double delta_loss, double c, Rng& rng) {
  if (!(c > 0.0)) throw DomainError("metropolis_accept: c must be positive");
  if (delta_loss <= 0.0) return true;
  return rng.uniform() < std::exp(-delta_loss / c);
}

void BasinHoppingConfig::validate() const {
  if (step_scale <= 0.0 || local_tol <= 0.0 || dedup_loss_tol <= 0.0 ||
      dedup_theta_tol <= 0.0) {
    throw ConfigError("BasinHoppingConfig: tolerances must be positive");
  }
  if (stall_n < 1 || max_steps < 1 || stall_n > max_steps) {
    throw ConfigError("BasinHoppingConfig: need 1 <= stall_n <= max_steps");
  }
  if (local_max_iter < 1 || n_chains < 1) {
    throw ConfigError("BasinHoppingConfig: local_max_iter and n_chains >= 1");
  }
}

std::vector<MinimumRecord> dedup_minima(std::vector<MinimumRecord> records,
                                        double loss_tol, double theta_tol) {
  std::sort(records.begin(), records.end(),
            [](const MinimumRecord& a, const MinimumRecord& b) {
              if (a.loss != b.loss) return a.loss < b.loss;
              return theta_less(a.theta, b.theta);
            });
  std::vector<MinimumRecord> kept;
  for (auto& r : records) {
    bool duplicate = false;
    for (const auto& k : kept) {
      if (std::fabs(k.loss - r.loss) < loss_tol &&
          (k.theta - r.theta).norm() < theta_tol) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(std::move(r));
  }
  return kept;
}

Eigen::MatrixXd hessian_fd(const Objective& objective,
                           const Eigen::VectorXd& theta, double step_scale) {
  const int dim = static_cast<int>(theta.size());
  Eigen::MatrixXd H(dim, dim);
  Eigen::VectorXd g_hi(dim), g_lo(dim);
  for (int j = 0; j < dim; ++j) {
    const double h = step_scale * std::max(1.0, std::fabs(theta[j]));
    Eigen::VectorXd x = theta;
    x[j] = theta[j] + h;
    const double v_hi = objective(x, &g_hi);
    x[j] = theta[j] - h;
    const double v_lo = objective(x, &g_lo);
    if (!std::isfinite(v_hi) || !std::isfinite(v_lo)) {
      throw NumericalError("hessian_fd: objective not finite near theta");
    }
    H.col(j) = (g_hi - g_lo) / (2.0 * h);
  }
  H = 0.5 * (H + H.transpose()).eval();
  if (!H.allFinite()) throw NumericalError("hessian_fd: non-finite entries");
  return H;
}

void analyze_minimum(MinimumRecord& record, const Eigen::MatrixXd& hessian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("analyze_minimum: eigendecomposition failed");
  }
  record.hessian_eigenvalues = solver.eigenvalues();  // ascending
  const int m = static_cast<int>(record.hessian_eigenvalues.size());
  record.spectral_norm =
      std::max(std::fabs(record.hessian_eigenvalues[0]),
               std::fabs(record.hessian_eigenvalues[m - 1]));

  const double floor = 1e-8 * record.spectral_norm;
  double sum_ln = 0.0;
  int retained = 0;
  for (int i = 0; i < m; ++i) {
    const double lam = record.hessian_eigenvalues[i];
    if (lam > floor && floor > 0.0) {
      sum_ln += std::log(lam);
      ++retained;
    }
  }
  if (retained > 0) {
    record.log_occupation = -record.loss - 0.5 * sum_ln;
  } else {
    record.log_occupation = std::nullopt;
  }
}

namespace {

// One Metropolis chain. Returns converged raw minima (deduplicated within
// the chain as it goes).
std::vector<RawMinimum> run_chain(
    const Objective& objective, int dim,
    const std::function<Eigen::VectorXd(Rng&)>& sampler,
    const BasinHoppingConfig& config, Rng rng,
    const std::vector<Eigen::VectorXd>& warm_starts) {
  LocalMinimizeOptions lopt;
  lopt.grad_tol = config.local_tol;
  lopt.max_iterations = config.local_max_iter;

  std::vector<RawMinimum> minima;
  std::vector<double> early_losses;

  auto try_add = [&](const LocalResult& res) -> bool {
    if (!res.converged) return false;
    for (auto& m : minima) {
      if (std::fabs(m.loss - res.loss) < config.dedup_loss_tol &&
          (m.theta - res.theta).norm() < config.dedup_theta_tol) {
        if (res.loss < m.loss) {
          m.theta = res.theta;
          m.loss = res.loss;
          m.grad_norm = res.grad_norm;
        }
        return false;
      }
    }
    minima.push_back({res.theta, res.loss, res.grad_norm});
    return true;
  };

  std::optional<RawMinimum> current;
  auto consider_current = [&](const LocalResult& res) {
    if (!res.converged) return;
    if (!current || res.loss < current->loss) {
      current = RawMinimum{res.theta, res.loss, res.grad_norm};
    }
  };

  for (const auto& w : warm_starts) {
    if (static_cast<int>(w.size()) != dim) {
      throw DimensionError("basin_hop: warm start dimension mismatch");
    }
    const LocalResult res = local_minimize(objective, w, lopt);
    try_add(res);
    consider_current(res);
    if (res.converged) early_losses.push_back(res.loss);
  }

  // Calibration / multi-start phase: when c is adaptive it comes from the
  // first 10 local minimizations.
  const bool adaptive = config.metropolis_c <= 0.0;
  const int seed_searches =
      adaptive ? std::max(0, 10 - static_cast<int>(early_losses.size()))
               : (current ? 0 : 1);
  int attempts = 0;
  for (int k = 0; k < seed_searches; ++k) {
    Eigen::VectorXd start = sampler(rng);
    Eigen::VectorXd dummy;
    while (!std::isfinite(objective(start, &dummy)) && attempts < 100) {
      start = sampler(rng);
      ++attempts;
    }
    const LocalResult res = local_minimize(objective, start, lopt);
    try_add(res);
    consider_current(res);
    if (res.converged) early_losses.push_back(res.loss);
  }
  while (!current && attempts < 100) {  // keep sampling until one converges
    ++attempts;
    const LocalResult res = local_minimize(objective, sampler(rng), lopt);
    try_add(res);
    consider_current(res);
    if (res.converged) early_losses.push_back(res.loss);
  }
  if (!current) {
    throw ExplorationError(
        "basin_hop: no converged starting minimum after 100 attempts");
  }

  double c = config.metropolis_c;
  if (adaptive) {
    std::vector<double> sorted = early_losses;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
      const double pos = q * (sorted.size() - 1);
      const std::size_t i = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      return i + 1 < sorted.size()
                 ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
                 : sorted[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    c = 0.5 * iqr;
    if (!(c > 1e-12)) {
      c = std::max(1e-3, 1e-3 * std::fabs(quantile(0.5)));
    }
  }

  int stall = 0;
  for (int step = 0; step < config.max_steps && stall < config.stall_n;
       ++step) {
    Eigen::VectorXd proposal = current->theta;
    for (int i = 0; i < dim; ++i) {
      proposal[i] += config.step_scale * rng.uniform(-1.0, 1.0);
    }
    Eigen::VectorXd dummy;
    if (!std::isfinite(objective(proposal, &dummy))) {
      proposal = sampler(rng);
    }
    const LocalResult res = local_minimize(objective, proposal, lopt);
    if (try_add(res)) {
      stall = 0;
    } else {
      ++stall;
    }
    if (res.converged &&
        metropolis_accept(res.loss - current->loss, c, rng)) {
      current = RawMinimum{res.theta, res.loss, res.grad_norm};
    }
  }

  return minima;
}

}  // namespace

std::vector<MinimumRecord> basin_hop_objective(
    const Objective& objective, int dim,
    const std::function<Eigen::VectorXd(Rng&)>& sampler,
    const BasinHoppingConfig& config,
    const std::vector<Eigen::VectorXd>& warm_starts) {
  config.validate();

  std::vector<RawMinimum> raw;
  for (int chain = 0; chain < config.n_chains; ++chain) {
    auto chain_minima =
        run_chain(objective, dim, sampler, config,
                  Rng::fork(config.seed, static_cast<std::uint64_t>(chain)),
                  chain == 0 ? warm_starts : std::vector<Eigen::VectorXd>{});
    raw.insert(raw.end(), chain_minima.begin(), chain_minima.end());
  }
  if (raw.empty()) {
    throw ExplorationError("basin_hop: zero converged minima");
  }

  std::vector<MinimumRecord> records;
  records.reserve(raw.size());
  for (auto& r : raw) {
    MinimumRecord rec;
    rec.theta = std::move(r.theta);
    rec.loss = r.loss;
    rec.grad_norm = r.grad_norm;
    records.push_back(std::move(rec));
  }
  records =
      dedup_minima(std::move(records), config.dedup_loss_tol,
                   config.dedup_theta_tol);

  for (auto& rec : records) {
    const Eigen::MatrixXd H = hessian_fd(objective, rec.theta);
    analyze_minimum(rec, H);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].id = static_cast<int>(i);
  }
  return records;
}

std::vector<MinimumRecord> basin_hop(
    const Dataset& data, const SearchSpace& space,
    const BasinHoppingConfig& config, const Dataset* test,
    const std::vector<Eigen::VectorXd>& warm_starts) {
  auto data_ptr = std::make_shared<Dataset>(data);
  const NlmlObjective objective(data_ptr, space);
  auto sampler = [&space](Rng& rng) { return sample_start(space, rng); };

  auto records = basin_hop_objective(
      [&objective](const Eigen::VectorXd& u, Eigen::VectorXd* g) {
        return objective(u, g);
      },
      space.vector_size(), sampler, config, warm_starts);

  for (auto& rec : records) {
    rec.hyperparameters = from_vector(rec.theta, space);
    const FittedGP model(data_ptr, rec.hyperparameters);
    rec.train_mse = train_mse_raw(model);
    if (test) rec.test_mse = test_mse_raw(model, *test);
  }
  return records;
}

}  // namespace gpland
