#include "pact/team.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "pact/lp.hpp"
#include "pact/numeric.hpp"

namespace pact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kShareFloor = 1e-9;  // positivity floor inside optimizers
constexpr double kCutStep = 1e-4;     // finite-difference step for cuts

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double vec_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Solves 1/g'(a) = s for a > 0; 1/g' is increasing because g is concave.
double invert_marginal(const std::function<double(double)>& g_prime,
                       double s) {
  auto q = [&](double a) { return 1.0 / g_prime(a); };
  double lo = 1e-12, hi = 1.0;
  int guard = 0;
  while (q(lo) > s) {
    lo *= 0.25;
    if (++guard > 600)
      throw std::runtime_error("team equilibrium: marginal inversion failed");
  }
  guard = 0;
  while (q(hi) < s) {
    hi *= 2.0;
    if (++guard > 600)
      throw std::runtime_error("team equilibrium: marginal inversion failed");
  }
  return bisect_root([&](double a) { return q(a) - s; }, lo, hi, 0.0, 250);
}

// Root of F inside the open domain (lo_dom, hi_dom): geometric expansion to
// a sign change, then bisection. F is negative below the root.
double solve_scalar_root(const std::function<double(double)>& F,
                         double lo_dom, double hi_dom) {
  double hi = std::isinf(hi_dom) ? 1.0 : hi_dom - 1.0;
  double lo = hi - 1.0;
  if (!std::isinf(lo_dom)) lo = std::max(lo, 0.5 * (lo_dom + hi));

  double span = 1.0;
  double fhi = F(hi);
  int guard = 0;
  while (fhi <= 0.0) {
    if (++guard > 200)
      throw std::runtime_error(
          "team equilibrium: could not bracket the fixed point");
    lo = hi;  // hi sits below the root, reuse it as the lower end
    if (std::isinf(hi_dom)) {
      hi += span;
      span *= 2.0;
    } else {
      hi = 0.5 * (hi + hi_dom);
    }
    fhi = F(hi);
  }
  span = 1.0;
  double flo = F(lo);
  guard = 0;
  while (flo >= 0.0) {
    if (++guard > 200)
      throw std::runtime_error(
          "team equilibrium: could not bracket the fixed point");
    if (std::isinf(lo_dom)) {
      lo -= span;
      span *= 2.0;
    } else {
      lo = 0.5 * (lo + lo_dom);
    }
    flo = F(lo);
  }
  return bisect_root(F, lo, hi, 1e-13, 300);
}

// Gaussian elimination with partial pivoting; m is overwritten.
std::vector<double> solve_dense(std::vector<std::vector<double>> m,
                                std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (!(std::fabs(m[piv][col]) > 1e-300))
      throw std::runtime_error("team equilibrium: singular newton system");
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m[i][c] * x[c];
    x[i] = s / m[i][i];
  }
  return x;
}

}  // namespace

TeamProduction TeamProduction::cobb_douglas(double scale,
                                            std::vector<double> exponents) {
  require(scale > 0.0 && std::isfinite(scale),
          "TeamProduction: scale must be positive");
  require(!exponents.empty(), "TeamProduction: need at least one agent");
  double total = 0.0;
  for (double k : exponents) {
    require(k > 0.0 && std::isfinite(k),
            "TeamProduction: exponents must be positive");
    total += k;
  }
  require(total < 1.0,
          "TeamProduction: exponents must sum below 1 (decreasing returns)");

  TeamProduction p;
  p.form = Form::explicitly_additive;
  p.n = exponents.size();
  p.builtin = Builtin::cobb_douglas;
  p.scale = scale;
  p.exponents = exponents;
  p.h = [scale](double t) { return scale * std::exp(t); };
  p.h_prime = p.h;
  for (double k : exponents) {
    p.g.push_back([k](double a) { return k * std::log(a); });
    p.g_prime.push_back([k](double a) { return k / a; });
    p.marginal_inverse.push_back([k](double s) { return k * s; });
  }
  p.aggregate_lo = -kInf;
  p.aggregate_hi = kInf;
  return p;
}

TeamProduction TeamProduction::ces(std::vector<double> weights, double k,
                                   double d) {
  require(!weights.empty(), "TeamProduction: need at least one agent");
  for (double w : weights)
    require(w > 0.0 && std::isfinite(w),
            "TeamProduction: weights must be positive");
  require(k > 0.0 && std::isfinite(k),
          "TeamProduction: substitution decay k must be positive");
  require(d > 0.0 && d < 1.0,
          "TeamProduction: returns d must lie in (0, 1)");

  TeamProduction p;
  p.form = Form::explicitly_additive;
  p.n = weights.size();
  p.builtin = Builtin::ces;
  p.weights = weights;
  p.decay = k;
  p.returns = d;
  double ratio = d / k;
  p.h = [ratio](double t) { return std::pow(-t, -ratio); };
  p.h_prime = [ratio](double t) {
    return ratio * std::pow(-t, -ratio - 1.0);
  };
  for (double w : weights) {
    p.g.push_back([w, k](double a) { return -w * std::pow(a, -k); });
    p.g_prime.push_back(
        [w, k](double a) { return k * w * std::pow(a, -k - 1.0); });
    p.marginal_inverse.push_back(
        [w, k](double s) { return std::pow(k * w * s, 1.0 / (k + 1.0)); });
  }
  p.aggregate_lo = -kInf;
  p.aggregate_hi = 0.0;
  return p;
}

TeamProduction TeamProduction::custom_additive(
    std::function<double(double)> h, std::function<double(double)> h_prime,
    std::vector<std::function<double(double)>> g,
    std::vector<std::function<double(double)>> g_prime,
    double aggregate_lo, double aggregate_hi) {
  require(static_cast<bool>(h) && static_cast<bool>(h_prime),
          "TeamProduction: custom additive needs h and h'");
  require(!g.empty() && g.size() == g_prime.size(),
          "TeamProduction: custom additive needs matching g and g'");
  for (std::size_t i = 0; i < g.size(); ++i)
    require(static_cast<bool>(g[i]) && static_cast<bool>(g_prime[i]),
            "TeamProduction: custom additive evaluators must be set");
  require(aggregate_lo < aggregate_hi,
          "TeamProduction: aggregate domain must be a nonempty interval");

  TeamProduction p;
  p.form = Form::explicitly_additive;
  p.n = g.size();
  p.h = std::move(h);
  p.h_prime = std::move(h_prime);
  p.g = std::move(g);
  p.g_prime = std::move(g_prime);
  p.aggregate_lo = aggregate_lo;
  p.aggregate_hi = aggregate_hi;
  return p;
}

TeamProduction TeamProduction::general(
    std::function<double(const std::vector<double>&)> f,
    std::function<std::vector<double>(const std::vector<double>&)> grad,
    std::size_t n) {
  require(static_cast<bool>(f) && static_cast<bool>(grad),
          "TeamProduction: general form needs f and its gradient");
  require(n >= 1, "TeamProduction: need at least one agent");
  TeamProduction p;
  p.form = Form::general_smooth;
  p.n = n;
  p.f = std::move(f);
  p.grad = std::move(grad);
  return p;
}

double TeamProduction::value(const std::vector<double>& a) const {
  if (a.size() != n)
    throw std::invalid_argument("TeamProduction: action profile size mismatch");
  for (double ai : a)
    if (!(ai >= 0.0)) throw std::domain_error("team effort must be nonnegative");
  if (form == Form::general_smooth) return f(a);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) t += g[i](a[i]);
  return h(t);
}

double ContractProfile::total() const { return vec_sum(shares); }

void ContractProfile::validate(std::size_t n) const {
  if (shares.size() != n)
    throw std::invalid_argument("ContractProfile: share count mismatch");
  for (double b : shares)
    if (!(b >= 0.0) || !std::isfinite(b))
      throw std::invalid_argument(
          "ContractProfile: shares must be nonnegative and finite");
}

EquilibriumResult equilibrium(const TeamProduction& prod,
                              const ContractProfile& beta) {
  beta.validate(prod.n);
  const std::size_t n = prod.n;

  if (std::any_of(beta.shares.begin(), beta.shares.end(),
                  [](double b) { return b == 0.0; })) {
    EquilibriumResult out;
    out.actions.assign(n, 0.0);
    double v = prod.value(out.actions);
    out.production = std::isfinite(v) ? v : 0.0;
    out.method = "degenerate";
    out.degenerate = true;
    return out;
  }

  EquilibriumResult out;
  if (prod.form == TeamProduction::Form::explicitly_additive) {
    std::size_t evals = 0;
    auto y = [&](std::size_t i, double s) {
      double a = prod.marginal_inverse.empty()
                     ? invert_marginal(prod.g_prime[i], s)
                     : prod.marginal_inverse[i](s);
      return std::pair<double, double>(a, prod.g[i](a));
    };
    auto F = [&](double t) {
      ++evals;
      double acc = t;
      double hp = prod.h_prime(t);
      for (std::size_t i = 0; i < n; ++i)
        acc -= y(i, beta.shares[i] * hp).second;
      return acc;
    };
    double t = solve_scalar_root(F, prod.aggregate_lo, prod.aggregate_hi);

    out.actions.resize(n);
    double hp = prod.h_prime(t);
    double agg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto [a, gi] = y(i, beta.shares[i] * hp);
      out.actions[i] = a;
      agg += gi;
    }
    out.production = prod.value(out.actions);
    out.fixed_point_gap = std::fabs(t - agg);
    double hp_agg = prod.h_prime(agg);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      res = std::max(res, std::fabs(beta.shares[i] * hp_agg *
                                        prod.g_prime[i](out.actions[i]) -
                                    1.0));
    out.foc_residual = res;
    out.method = "scalar fixed point";
    out.iterations = evals;
    return out;
  }

  // General smooth path: damped Newton on grad f(a) = (1/beta_i), with a
  // finite-difference Hessian and positivity-preserving backtracking.
  std::vector<double> a(n, 0.5);
  auto residual = [&](const std::vector<double>& gv) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      r = std::max(r, std::fabs(beta.shares[i] * gv[i] - 1.0));
    return r;
  };
  std::vector<double> gv = prod.grad(a);
  double res = residual(gv);
  std::size_t iter = 0;
  for (; iter < 500 && res > 1e-10; ++iter) {
    std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
      double h = 1e-6 * std::max(1.0, std::fabs(a[j]));
      std::vector<double> ap = a;
      ap[j] += h;
      std::vector<double> gp = prod.grad(ap);
      for (std::size_t i = 0; i < n; ++i) hess[i][j] = (gp[i] - gv[i]) / h;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double sym = 0.5 * (hess[i][j] + hess[j][i]);
        hess[i][j] = hess[j][i] = sym;
      }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = 1.0 / beta.shares[i] - gv[i];
    std::vector<double> step = solve_dense(std::move(hess), std::move(rhs));

    double s = 1.0;
    bool accepted = false;
    while (s > 1e-14) {
      std::vector<double> trial(n);
      bool positive = true;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = a[i] + s * step[i];
        positive = positive && trial[i] > 0.0;
      }
      if (positive) {
        std::vector<double> gt = prod.grad(trial);
        double rt = residual(gt);
        if (rt < res) {
          a = std::move(trial);
          gv = std::move(gt);
          res = rt;
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) break;
  }
  if (res > 1e-8)
    throw std::runtime_error(
        "team equilibrium solver did not converge; residual=" +
        format_double(res));
  out.actions = a;
  out.production = prod.value(a);
  out.foc_residual = res;
  out.method = "damped newton";
  out.iterations = iter;
  return out;
}

double production_of_contract(const TeamProduction& prod,
                              const ContractProfile& beta) {
  return equilibrium(prod, beta).production;
}

QuasiconcavityReport quasiconcavity_check(const TeamProduction& prod,
                                          std::size_t samples, Rng& rng) {
  require(samples > 0, "quasiconcavity check needs samples");
  auto draw = [&]() {
    // n + 1 exponentials normalize to a uniform point of the open simplex.
    std::vector<double> e(prod.n + 1);
    double total = 0.0;
    for (auto& v : e) {
      v = -std::log(std::max(1.0 - rng.uniform(), 1e-300));
      total += v;
    }
    ContractProfile b;
    b.shares.resize(prod.n);
    for (std::size_t i = 0; i < prod.n; ++i) b.shares[i] = e[i] / total;
    return b;
  };

  QuasiconcavityReport rep;
  rep.samples = samples;
  rep.worst_slack = kInf;
  for (std::size_t s = 0; s < samples; ++s) {
    ContractProfile b1 = draw(), b2 = draw();
    double lam = rng.uniform();
    ContractProfile mix;
    mix.shares.resize(prod.n);
    for (std::size_t i = 0; i < prod.n; ++i)
      mix.shares[i] = lam * b1.shares[i] + (1.0 - lam) * b2.shares[i];
    double p1 = production_of_contract(prod, b1);
    double p2 = production_of_contract(prod, b2);
    double pm = production_of_contract(prod, mix);
    double slack = pm - std::min(p1, p2);
    rep.worst_slack = std::min(rep.worst_slack, slack);
    if (slack < -1e-8) ++rep.violations;
  }
  return rep;
}

namespace {

// Maximizes P over the face {sum beta = total, beta_i >= floor} by pairwise
// share transfers with golden-section line searches; strict quasiconcavity
// of the built-ins makes every such slice unimodal.
std::pair<ContractProfile, double> face_maximum(
    const std::function<double(const ContractProfile&)>& P, std::size_t n,
    double total, double floor_share) {
  ContractProfile best;
  if (n == 1) {
    best.shares = {total};
    return {best, P(best)};
  }

  std::vector<std::vector<double>> starts;
  starts.emplace_back(n, total / static_cast<double>(n));
  for (std::size_t corner : {std::size_t{0}, n - 1}) {
    std::vector<double> s(n, total / (4.0 * static_cast<double>(n)));
    s[corner] = total - vec_sum(s) + s[corner];
    starts.push_back(std::move(s));
  }

  double best_val = -kInf;
  for (auto& start : starts) {
    ContractProfile b;
    b.shares = start;
    double val = P(b);
    for (int sweep = 0; sweep < 12; ++sweep) {
      double before = val;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          double lo = floor_share - b.shares[i];
          double hi = b.shares[j] - floor_share;
          if (!(hi - lo > 1e-12)) continue;
          auto slice = [&](double delta) {
            ContractProfile t = b;
            t.shares[i] += delta;
            t.shares[j] -= delta;
            return P(t);
          };
          double delta = golden_section_max(slice, lo, hi, 1e-9);
          double cand = slice(delta);
          if (cand > val) {
            val = cand;
            b.shares[i] += delta;
            b.shares[j] -= delta;
          }
        }
      if (val - before < 1e-11) break;
    }
    if (val > best_val) {
      best_val = val;
      best = b;
    }
  }
  return {best, best_val};
}

}  // namespace

MinContractResult min_contract(const TeamProduction& prod, double k,
                               double eps, double share_cap) {
  if (!(k >= 0.0) || !std::isfinite(k))
    throw std::invalid_argument("min_contract: threshold must be nonnegative");
  require(eps > 0.0, "min_contract: eps must be positive");
  require(share_cap > 0.0 && std::isfinite(share_cap),
          "min_contract: share cap must be positive");

  const std::size_t n = prod.n;
  MinContractResult out;
  if (k == 0.0) {
    out.objective = 0.0;
    out.contract.shares.assign(n, 0.0);
    out.attainable = true;
    return out;
  }

  std::size_t queries = 0;
  auto P = [&](const ContractProfile& b) {
    ++queries;
    return production_of_contract(prod, b);
  };
  auto member = [&](const std::vector<double>& x) {
    ContractProfile b;
    b.shares = x;
    return P(b) >= k;
  };

  // Production rises in every share, so the box maximum sits at the top
  // corner; it doubles as the feasible anchor for segment bisection.
  ContractProfile anchor;
  anchor.shares.assign(n, share_cap);
  double pmax = P(anchor);
  if (!(pmax >= k)) {
    out.objective = kInf;
    out.contract.shares.assign(n, 0.0);
    out.attainable = false;
    out.oracle_queries = queries;
    return out;
  }

  std::vector<double> best = anchor.shares;
  double ub = vec_sum(best);

  LinearProgram lp(n, LinearProgram::Sense::minimize);
  lp.objective.assign(n, 1.0);
  lp.lower.assign(n, kShareFloor);
  lp.upper.assign(n, share_cap);

  bool closed = false;
  for (int round = 0; round < 300 && !closed; ++round) {
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
      throw std::runtime_error("min_contract: outer relaxation infeasible");
    double lb = sol.value;
    if (ub - lb <= eps) {
      closed = true;
      break;
    }
    const std::vector<double>& probe = sol.x;
    if (member(probe)) {
      best = probe;
      ub = vec_sum(probe);
      closed = true;
      break;
    }

    // Push the infeasible probe to the constraint boundary: along the
    // all-ones direction when the ray reaches the feasible set inside the
    // box, else along the segment to the anchor.
    std::vector<double> zf;
    double tmax = share_cap - *std::max_element(probe.begin(), probe.end());
    bool resolved = false;
    if (tmax > 1e-12) {
      std::vector<double> top = probe;
      for (double& v : top) v += tmax;
      if (member(top)) {
        double lo = 0.0, hi = tmax;
        while (hi - lo > 1e-10) {
          double mid = 0.5 * (lo + hi);
          std::vector<double> cand = probe;
          for (double& v : cand) v += mid;
          (member(cand) ? hi : lo) = mid;
        }
        zf = probe;
        for (double& v : zf) v += hi;
        resolved = true;
      }
    }
    if (!resolved) {
      double lo = 0.0, hi = 1.0;
      while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        std::vector<double> cand(n);
        for (std::size_t i = 0; i < n; ++i)
          cand[i] = probe[i] + mid * (anchor.shares[i] - probe[i]);
        (member(cand) ? hi : lo) = mid;
      }
      zf.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        zf[i] = probe[i] + hi * (anchor.shares[i] - probe[i]);
    }
    if (vec_sum(zf) < ub) {
      ub = vec_sum(zf);
      best = zf;
    }

    // Quasiconcavity puts the feasible set on the ascent side of the
    // production gradient at any boundary point.
    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ContractProfile plus, minus;
      plus.shares = zf;
      minus.shares = zf;
      plus.shares[i] += kCutStep;
      minus.shares[i] = std::max(zf[i] - kCutStep, kShareFloor);
      double width = plus.shares[i] - minus.shares[i];
      grad[i] = (P(plus) - P(minus)) / width;
    }
    double norm1 = 0.0, norm_max = 0.0;
    for (double gi : grad) {
      norm1 += std::fabs(gi);
      norm_max = std::max(norm_max, std::fabs(gi));
    }
    if (norm_max < 1e-12) continue;  // no separating direction here
    double rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) rhs += grad[i] * zf[i];
    lp.add_constraint(grad, LinearProgram::Relation::greater_equal,
                      rhs - 1e-7 * (1.0 + norm1));
    ++out.cuts;
  }
  if (!closed)
    throw std::runtime_error("min_contract: bracket did not close");

  out.objective = ub;
  out.contract.shares = best;
  out.attainable = true;
  out.oracle_queries = queries;
  return out;
}

TeamSweepResult find_optimal_team_contract(const TeamProduction& prod,
                                           double eps) {
  require(eps > 0.0, "team sweep: eps must be positive");
  TeamSweepResult out;
  out.contract.shares.assign(prod.n, 0.0);

  bool done = false;
  for (std::size_t step = 0; step <= 2000000 && !done; ++step) {
    double k = eps * static_cast<double>(step);
    MinContractResult r = min_contract(prod, k, eps);
    out.oracle_queries += r.oracle_queries;
    double utility = (1.0 - r.objective) * k;
    out.rows.push_back({k, r.objective, utility, r.oracle_queries});
    if (!r.attainable) {
      done = true;
      break;
    }
    if (utility >= out.utility) {
      out.utility = utility;
      out.contract = r.contract;
      out.k_at_best = k;
    }
    if (r.objective >= 1.0) done = true;
  }
  if (!done) throw std::runtime_error("team sweep did not terminate");
  return out;
}

double estimate_k_max(const TeamProduction& prod, double eps) {
  require(eps > 0.0, "estimate_k_max: eps must be positive");
  // Posted contracts live on the simplex, and production rises in every
  // share, so the maximum sits on the full-allocation face; the pairwise
  // transfer search locates it to well below any sensible eps.
  auto P = [&](const ContractProfile& b) {
    return production_of_contract(prod, b);
  };
  return face_maximum(P, prod.n, 1.0, kShareFloor).second;
}

}  // namespace pact
