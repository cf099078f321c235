#include "dualgeo/checks.hpp"

#include "dualgeo/categorical.hpp"
#include "dualgeo/datagen.hpp"
#include "dualgeo/diag_gaussian.hpp"
#include "dualgeo/experiments.hpp"
#include "dualgeo/mixture.hpp"
#include "dualgeo/optimizers.hpp"
#include "dualgeo/varinf.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>

namespace dualgeo {

namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Verdict below(double value, double bound, const std::string& what = "max error") {
  return {value < bound, what + " " + sci(value) + " (bound " + sci(bound) + ")"};
}

// A model together with a sampler of interior points.
struct Fixture {
  std::string name;
  std::shared_ptr<const DuallyFlatModel> model;
  std::function<EtaCoords(Rng&)> sample;
  /// Whether eta is an explicit affine function of the distribution (used
  /// by the one-step m-geodesic check).
  bool explicit_eta;
};

Vector random_simplex(Rng& rng, Eigen::Index size, double floor = 0.05) {
  Vector p(size);
  for (Eigen::Index i = 0; i < size; ++i) p[i] = rng.uniform() + floor;
  return p / p.sum();
}

std::vector<Fixture> fixtures(std::uint64_t seed) {
  std::vector<Fixture> out;
  auto cat = std::make_shared<CategoricalModel>(3);
  out.push_back({"categorical", cat, [](Rng& rng) { return EtaCoords(Vector(random_simplex(rng, 4).head(3))); }, true});

  auto mix = std::make_shared<MixtureModel>(MixtureModel::four_arc_instance());
  out.push_back({"mixture", mix, [](Rng& rng) { return EtaCoords(Vector(random_simplex(rng, 4).head(3))); }, true});

  Rng instance_rng = Rng::stream(seed, 991);
  auto bt = std::make_shared<BradleyTerryModel>(BradleyTerryModel::for_observation(random_bt_instance(5, instance_rng)));
  out.push_back({"bradley-terry", bt,
                 [bt](Rng& rng) { return bt->eta_from_theta(ThetaCoords(rng.normal_vector(4))); }, false});

  auto gauss = std::make_shared<DiagGaussianModel>(3);
  out.push_back({"diag-gaussian", gauss,
                 [](Rng& rng) {
                   Vector sigma(3);
                   for (Eigen::Index i = 0; i < 3; ++i) sigma[i] = rng.uniform(0.5, 2.0);
                   return dg_eta_from_musigma(rng.normal_vector(3), sigma);
                 },
                 true});
  return out;
}

double fd_gradient_error(const DuallyFlatModel& model, const DualGradientObjective& f, const Point& p) {
  auto via_theta = [&](const Vector& th) { return f.value(Point::from_theta(model, ThetaCoords(th), p)); };
  auto via_eta = [&](const Vector& e) { return f.value(Point::from_eta(model, EtaCoords(e))); };
  const double e_theta = relative_error(fd_gradient_scaled(via_theta, p.theta().values()), objective_grad_theta(model, f, p));
  const double e_eta = relative_error(fd_gradient_scaled(via_eta, p.eta().values()), objective_grad_eta(model, f, p));
  return std::max(e_theta, e_eta);
}

}  // namespace

double legendre_roundtrip_error(const DuallyFlatModel& model, const std::vector<EtaCoords>& points) {
  double worst = 0.0;
  for (const auto& eta : points) {
    const EtaCoords back = model.eta_from_theta(model.theta_from_eta(eta));
    worst = std::max(worst, (back.values() - eta.values()).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

double metric_hessian_error(const DuallyFlatModel& model, const ThetaCoords& theta) {
  auto eta_map = [&](const Vector& th) { return model.eta_from_theta(ThetaCoords(th)).values(); };
  return relative_error(model.metric_theta(theta), fd_jacobian(eta_map, theta.values()));
}

double metric_eta_error(const DuallyFlatModel& model, const EtaCoords& eta) {
  auto theta_map = [&](const Vector& e) { return model.theta_from_eta(EtaCoords(e)).values(); };
  return relative_error(model.metric_eta(eta), fd_jacobian(theta_map, eta.values()));
}

bool CheckReport::all_passed() const {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

std::vector<CheckResult> CheckReport::failures() const {
  std::vector<CheckResult> out;
  for (const auto& r : results) {
    if (!r.passed) out.push_back(r);
  }
  return out;
}

std::string CheckReport::to_text() const {
  std::string out;
  for (const auto& r : results) {
    char t[32];
    std::snprintf(t, sizeof t, "%.3f", r.seconds);
    out += (r.passed ? "PASS " : "FAIL ") + r.name + " (" + r.detail + ") [" + t + " s]\n";
  }
  std::size_t failed = failures().size();
  out += std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) + " checks passed\n";
  return out;
}

CheckReport run_checks(const ChecksConfig& cfg) {
  CheckReport report;
  std::uint64_t stream_index = 0;
  auto check = [&](const std::string& name, const std::function<Verdict(Rng&)>& body) {
    Rng rng = Rng::stream(cfg.seed, stream_index++);
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult result{name, false, "", 0.0};
    try {
      const Verdict v = body(rng);
      result.passed = v.passed;
      result.detail = v.detail;
    } catch (const std::exception& e) {
      result.detail = std::string("threw: ") + e.what();
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.results.push_back(result);
  };

  const auto models = fixtures(cfg.seed);

  for (const auto& fx : models) {
    check("legendre round-trip " + fx.name, [&](Rng& rng) {
      std::vector<EtaCoords> pts;
      for (int i = 0; i < 100; ++i) pts.push_back(fx.sample(rng));
      return below(legendre_roundtrip_error(*fx.model, pts), 1e-8);
    });
  }

  for (const auto& fx : models) {
    check("metric-hessian " + fx.name, [&](Rng& rng) {
      double worst = 0.0;
      for (int i = 0; i < 10; ++i) {
        const EtaCoords eta = fx.sample(rng);
        worst = std::max(worst, metric_hessian_error(*fx.model, fx.model->theta_from_eta(eta)));
        worst = std::max(worst, metric_eta_error(*fx.model, eta));
      }
      return below(worst, 1e-4, "max relative error");
    });
  }

  check("negative control: perturbed metric is detected", [&](Rng& rng) {
    const PerturbedMetricModel perturbed(*models.front().model, 1e-2);
    const double err = metric_hessian_error(perturbed, perturbed.theta_from_eta(models.front().sample(rng)));
    return Verdict{err >= 1e-4, "relative error " + sci(err) + " must exceed 1e-4"};
  });

  check("bradley-terry grad psi = eta", [&](Rng& rng) {
    const auto& model = *models[2].model;
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Vector th = rng.normal_vector(4);
      auto psi = [&](const Vector& t) { return model.psi(ThetaCoords(t)); };
      worst = std::max(worst, relative_error(fd_gradient_scaled(psi, th), model.eta_from_theta(ThetaCoords(th)).values()));
    }
    return below(worst, 1e-4, "max relative error");
  });

  check("bradley-terry metric positive definite", [&](Rng& rng) {
    const auto& model = *models[2].model;
    double smallest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
      const Matrix g = model.metric_theta(ThetaCoords(rng.normal_vector(4)));
      smallest = std::min(smallest, Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues().minCoeff());
    }
    return Verdict{smallest > 0.0, "smallest eigenvalue " + sci(smallest)};
  });

  for (const auto& fx : models) {
    check("divergence positivity " + fx.name, [&](Rng& rng) {
      double lowest = std::numeric_limits<double>::infinity();
      double self = 0.0;
      for (int i = 0; i < 100; ++i) {
        const Point r = Point::from_eta(*fx.model, fx.sample(rng));
        const Point q = Point::from_eta(*fx.model, fx.sample(rng));
        lowest = std::min(lowest, bregman_divergence(*fx.model, r, q));
        self = std::max(self, std::abs(bregman_divergence(*fx.model, r, r)));
      }
      return Verdict{lowest > 0.0 && self < 1e-12, "min over distinct pairs " + sci(lowest) + ", max |B(r,r)| " + sci(self)};
    });
  }

  for (const auto& fx : models) {
    check("one-step divergence minimization " + fx.name, [&](Rng& rng) {
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) {
        const Point p = Point::from_eta(*fx.model, fx.sample(rng));
        const Point q = Point::from_eta(*fx.model, fx.sample(rng));
        if (fx.explicit_eta) {
          const auto f = divergence_to(*fx.model, q);
          const EtaCoords eta = m_geodesic_step(*fx.model, p.eta(), objective_grad_theta(*fx.model, f, p), 1.0);
          worst = std::max(worst, (eta.values() - q.eta().values()).lpNorm<Eigen::Infinity>());
        }
        const auto h = divergence_from(*fx.model, q);
        const ThetaCoords th = e_geodesic_step(*fx.model, p.theta(), objective_grad_eta(*fx.model, h, p), 1.0);
        const double scale = 1.0 + q.theta().values().lpNorm<Eigen::Infinity>();
        worst = std::max(worst, (th.values() - q.theta().values()).lpNorm<Eigen::Infinity>() / scale);
      }
      return below(worst, 1e-10);
    });
  }

  check("mirror-descent equivalence", [&](Rng& rng) {
    const CategoricalModel model(3);
    double worst = 0.0;
    int accepted = 0;
    while (accepted < 50) {
      const ThetaCoords theta_k(rng.normal_vector(3));
      const Vector grad = rng.normal_vector(3);
      const double t = rng.uniform(0.01, 0.5);
      const EtaCoords eta_k = model.eta_from_theta(theta_k);
      const EtaCoords eta_next = m_geodesic_step(model, eta_k, grad, t);
      if (!model.eta_in_domain(eta_next)) continue;
      ++accepted;
      const ThetaCoords numeric = mirror_descent_step_numeric(model, theta_k, grad, t);
      worst = std::max(worst, (numeric.values() - model.theta_from_eta(eta_next).values()).lpNorm<Eigen::Infinity>());
    }
    return below(worst, 1e-8);
  });

  check("exponentiated gradient equals e-geodesic", [&](Rng& rng) {
    const CategoricalModel model(4);
    const Vector freqs = random_simplex(rng, 5);
    const double N = 500.0;
    const auto nll = categorical_nll(model, freqs, N);
    const double t = 0.3 / N;
    Vector r = Vector::Constant(5, 0.2);
    Point p = Point::from_eta(model, EtaCoords(Vector(r.head(4))));
    double worst = 0.0;
    for (int k = 0; k < 25; ++k) {
      const SimplexStep s = exponentiated_gradient_step(r, Vector(-N * freqs.cwiseQuotient(r)), t);
      if (s.overflow) return Verdict{false, "unexpected overflow"};
      r = s.r;
      p = Point::from_theta(model, e_geodesic_step(model, p.theta(), objective_grad_eta(model, nll, p), t));
      worst = std::max(worst, (p.eta().values() - r.head(4)).lpNorm<Eigen::Infinity>());
    }
    return below(worst, 1e-10);
  });

  check("dual-gradient fd", [&](Rng& rng) {
    double worst = 0.0;
    for (const auto& fx : models) {
      for (int i = 0; i < 5; ++i) {
        const Point p = Point::from_eta(*fx.model, fx.sample(rng));
        const Point q = Point::from_eta(*fx.model, fx.sample(rng));
        worst = std::max(worst, fd_gradient_error(*fx.model, divergence_to(*fx.model, q), p));
        worst = std::max(worst, fd_gradient_error(*fx.model, divergence_from(*fx.model, q), p));
      }
    }
    const CategoricalModel cat(3);
    const MixtureModel mix = MixtureModel::four_arc_instance();
    const BTObservation bt_x = BTObservation::three_player_example();
    const BradleyTerryModel bt = BradleyTerryModel::for_observation(bt_x);
    for (int i = 0; i < 5; ++i) {
      const auto cat_f = categorical_nll(cat, random_simplex(rng, 4), 100.0);
      worst = std::max(worst, fd_gradient_error(cat, cat_f, Point::from_eta(cat, models[0].sample(rng))));
      const auto mix_f = mixture_nll(mix, random_simplex(rng, 8, 0.0), 1000.0);
      worst = std::max(worst, fd_gradient_error(mix, mix_f, Point::from_eta(mix, models[1].sample(rng))));
      const auto bt_f = bt_nll(bt, bt_x);
      worst = std::max(worst, fd_gradient_error(bt, bt_f, Point::from_theta(bt, ThetaCoords(rng.normal_vector(2)))));
    }
    return below(worst, 1e-4, "max relative error");
  });

  check("bradley-terry e-step is the natural-gradient step", [&](Rng& rng) {
    const BTObservation x = random_bt_instance(6, rng);
    const BradleyTerryModel model = BradleyTerryModel::for_observation(x);
    const auto nll = bt_nll(model, x);
    const Vector T = x.sufficient_statistics().head(5);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const Point p = Point::from_theta(model, ThetaCoords(rng.normal_vector(5)));
      const double t = rng.uniform(0.1, 1.0);
      const ThetaCoords step = e_geodesic_step(model, p.theta(), objective_grad_eta(model, nll, p), t);
      const Vector explicit_step =
          p.theta().values() - t * model.metric_theta(p.theta()).fullPivLu().solve(p.eta().values() - T);
      worst = std::max(worst, relative_error(step.values(), explicit_step));
    }
    return below(worst, 1e-10, "max relative error");
  });

  check("one-step MLE on categorical data", [&](Rng& rng) {
    double worst = 0.0;
    for (int d = 0; d < 50; ++d) {
      const auto categories = static_cast<Eigen::Index>(rng.uniform_int(2, 10));
      const auto N = rng.uniform_int(1, 10000);
      const Vector probs = random_simplex(rng, categories, 0.0);
      Vector counts = Vector::Zero(categories);
      for (std::int64_t s = 0; s < N; ++s) {
        double u = rng.uniform();
        Eigen::Index k = 0;
        while (k + 1 < categories && u >= probs[k]) u -= probs[k++];
        counts[k] += 1.0;
      }
      const CategoricalModel model(static_cast<std::size_t>(categories - 1));
      const Vector freqs = counts / static_cast<double>(N);
      const auto nll = categorical_nll(model, freqs, static_cast<double>(N));
      const Point start = Point::from_eta(model, EtaCoords(Vector(random_simplex(rng, categories).head(categories - 1))));
      const EtaCoords eta = m_geodesic_step(model, start.eta(), objective_grad_theta(model, nll, start), 1.0 / static_cast<double>(N));
      worst = std::max(worst, (eta.values() - freqs.head(categories - 1)).lpNorm<Eigen::Infinity>());
    }
    return below(worst, 1e-12);
  });

  check("MM fixed point at the MLE", [&](Rng& rng) {
    double worst = 0.0;
    for (int inst = 0; inst < 3; ++inst) {
      const BTObservation x = inst == 0 ? BTObservation::three_player_example() : random_bt_instance(8, rng);
      const BradleyTerryModel model = BradleyTerryModel::for_observation(x);
      DescentConfig dc;
      dc.connection = Connection::e_geodesic;
      dc.stop.kind = StopKind::grad_norm_pi;
      dc.stop.epsilon = 1e-9;
      dc.stop.monitored_gradient = [&](const Point& p) { return bt_nll_grad_pi(x, bt_pi_from_theta(p.theta())); };
      const auto init = Point::from_theta(model, ThetaCoords(Vector::Zero(static_cast<Eigen::Index>(model.dim()))));
      const RunTrace trace = run_geodesic_descent(model, bt_nll(model, x), init, dc);
      if (trace.outcome != Outcome::converged) return Verdict{false, "MLE run did not converge"};
      const Vector pi = bt_pi_from_theta(ThetaCoords(trace.last()));
      worst = std::max(worst, (bt_mm_step(model, x, pi) - pi).lpNorm<Eigen::Infinity>());
    }
    return below(worst, 1e-12);
  });

  check("diag-gaussian domain predicates agree", [&](Rng& rng) {
    const DiagGaussianModel model(2);
    int mismatches = 0;
    for (int i = 0; i < 200; ++i) {
      const Vector v = 2.0 * rng.normal_vector(4);
      const ThetaCoords th(v);
      if (model.theta_in_domain(th) && !model.eta_in_domain(model.eta_from_theta(th))) ++mismatches;
      const EtaCoords et(v);
      if (model.eta_in_domain(et) && !model.theta_in_domain(model.theta_from_eta(et))) ++mismatches;
      const bool theta_ok = v[2] < 0.0 && v[3] < 0.0;
      if (std::abs(v[2]) > 1e-9 && std::abs(v[3]) > 1e-9 && theta_ok != model.theta_in_domain(th)) ++mismatches;
    }
    return Verdict{mismatches == 0, std::to_string(mismatches) + " mismatches"};
  });

  check("optimizer determinism and domain preservation", [&](Rng& rng) {
    const MixtureModel model = MixtureModel::four_arc_instance();
    const Vector counts = mixture_sample_counts(model, {700, 100, 100, 100}, rng);
    const auto nll = mixture_nll(model, counts / 1000.0, 1000.0);
    const Point start = Point::from_eta(model, EtaCoords(Vector::Constant(3, 0.25)));
    bool ok = true;
    for (Connection c : {Connection::m_geodesic, Connection::e_geodesic}) {
      DescentConfig dc;
      dc.connection = c;
      dc.step_size = 1.5e-3;
      const RunTrace a = run_geodesic_descent(model, nll, start, dc);
      const RunTrace b = run_geodesic_descent(model, nll, start, dc);
      ok = ok && a.iterations == b.iterations && a.iterates.size() == b.iterates.size();
      for (std::size_t k = 0; ok && k < a.iterates.size(); ++k) {
        ok = a.iterates[k] == b.iterates[k] && a.step_sizes_used == b.step_sizes_used;
        ok = ok && (c == Connection::m_geodesic ? model.eta_in_domain(EtaCoords(a.iterates[k]))
                                                : model.theta_in_domain(ThetaCoords(a.iterates[k])));
      }
    }
    return Verdict{ok, ok ? "identical traces, all iterates in domain" : "traces differ or leave the domain"};
  });

  check("domain_and_decrease gives strictly decreasing values", [&](Rng& rng) {
    const CategoricalModel model(2);
    int violations = 0;
    for (int i = 0; i < 20; ++i) {
      const Point q = Point::from_eta(model, EtaCoords(Vector(random_simplex(rng, 3).head(2))));
      DescentConfig dc;
      dc.connection = Connection::e_geodesic;
      dc.halving_rule = HalvingRule::domain_and_decrease;
      dc.record_values = true;
      dc.stop.kind = StopKind::distance_to_target_eta;
      dc.stop.target_eta = q.eta().values();
      const Point start = Point::from_eta(model, EtaCoords{1.0 / 3.0, 1.0 / 3.0});
      const RunTrace tr = run_geodesic_descent(model, divergence_to(model, q), start, dc);
      for (std::size_t k = 1; k < tr.values.size(); ++k) {
        if (!(tr.values[k] < tr.values[k - 1])) ++violations;
      }
    }
    return Verdict{violations == 0, std::to_string(violations) + " non-decreasing steps"};
  });

  check("VI gradients match finite differences", [&](Rng& rng) {
    const VIDataset data = generate(GenConfig{30, 2, 3, 0.0, 1.5, rng.next_u64()});
    const Eigen::Index md = 6;
    const Matrix noise = rng.normal_matrix(50, md);
    const double lambda = 0.7;
    const Vector mu = rng.normal_vector(md);
    const VIState state = VIState::from_mu_rho(mu, rng.normal_vector(md));
    const MuSigmaGradient g = mc_grad_musigma(data, state.mu(), state.sigma(), lambda, noise);
    auto obj = [&](const Vector& m, const Vector& s) { return mc_objective(data, m, s, lambda, noise); };
    double worst = relative_error(fd_gradient_scaled([&](const Vector& m) { return obj(m, state.sigma()); }, state.mu()), g.d_mu);
    worst = std::max(worst, relative_error(fd_gradient_scaled([&](const Vector& s) { return obj(state.mu(), s); }, state.sigma()), g.d_sigma));
    auto via_rho = [&](const Vector& r) { return obj(state.mu(), r.unaryExpr([](double x) { return softplus(x); })); };
    worst = std::max(worst, relative_error(fd_gradient_scaled(via_rho, state.rho()), mc_grad_rho(state, g)));
    const DualGradient dual = musigma_to_dual(state.mu(), state.sigma(), g);
    auto via_theta = [&](const Vector& th) {
      const MuSigma ms = dg_musigma_from_theta(ThetaCoords(th));
      return obj(ms.mu, ms.sigma);
    };
    auto via_eta = [&](const Vector& et) {
      const MuSigma ms = dg_musigma_from_eta(EtaCoords(et));
      return obj(ms.mu, ms.sigma);
    };
    worst = std::max(worst, relative_error(fd_gradient_scaled(via_theta, dg_theta_from_musigma(state.mu(), state.sigma()).values()), dual.d_theta));
    worst = std::max(worst, relative_error(fd_gradient_scaled(via_eta, dg_eta_from_musigma(state.mu(), state.sigma()).values()), dual.d_eta));
    return below(worst, 1e-3, "max relative error");
  });

  check("VI gradient charts agree through the metric", [&](Rng& rng) {
    const Eigen::Index d = 8;
    const DiagGaussianModel model(static_cast<std::size_t>(d));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Vector sigma(d);
      for (Eigen::Index j = 0; j < d; ++j) sigma[j] = rng.uniform(0.2, 3.0);
      const Vector mu = rng.normal_vector(d);
      const MuSigmaGradient g{rng.normal_vector(d), rng.normal_vector(d)};
      const DualGradient dual = musigma_to_dual(mu, sigma, g);
      const Vector mapped = model.metric_theta(dg_theta_from_musigma(mu, sigma)) * dual.d_eta;
      worst = std::max(worst, relative_error(mapped, dual.d_theta));
    }
    return below(worst, 1e-8, "max relative error");
  });

  check("VI with no data recovers the prior", [&](Rng& rng) {
    const double lambda = 4.0;
    const VIDataset empty{Matrix(0, 2), Matrix(0, 2)};
    Matrix noise(2, 4);
    noise.row(0) = Vector::Ones(4).transpose();
    noise.row(1) = -Vector::Ones(4).transpose();
    Vector x(8);
    x.head(4) = rng.normal_vector(4);
    for (Eigen::Index j = 4; j < 8; ++j) x[j] = rng.uniform(0.5, 1.5);
    auto fn = [&](const Vector& v) { return mc_objective(empty, v.head(4), v.tail(4), lambda, noise); };
    auto grad = [&](const Vector& v) {
      const MuSigmaGradient g = mc_grad_musigma(empty, v.head(4), v.tail(4), lambda, noise);
      Vector out(8);
      out << g.d_mu, g.d_sigma;
      return out;
    };
    const RunTrace tr = run_euclidean_gd(fn, grad, x, 0.05, 500);
    Vector expected(8);
    expected << Vector::Zero(4), Vector::Constant(4, 1.0 / std::sqrt(lambda));
    return below((tr.last() - expected).lpNorm<Eigen::Infinity>(), 1e-3, "distance to (0, lambda^-1/2)");
  });

  check("accuracy is one on separable data with a sharp posterior", [&](Rng& rng) {
    const Eigen::Index n = 60;
    VIDataset data{Matrix::Zero(n, 3), Matrix::Zero(n, 3)};
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(rng.uniform_int(0, 2));
      data.X.row(i) = 0.1 * rng.normal_vector(3).transpose();
      data.X(i, k) += 1.0;
      data.Y(i, k) = 1.0;
    }
    Vector mu(9);
    Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(mu.data()) = 5.0 * Eigen::Matrix3d::Identity();
    const VIState state = VIState::from_mu_sigma(mu, Vector::Constant(9, 1e-9));
    const double acc = accuracy(data, state, 10, rng.next_u64());
    return Verdict{acc == 1.0, "accuracy " + sci(acc)};
  });

  check("datagen partition and class counts", [&](Rng& rng) {
    const auto sizes = partition_sizes(7, 3);
    bool ok = sizes == std::vector<std::size_t>{3, 2, 2};
    const GeneratedData g = generate_detailed(GenConfig{101, 4, 5, 0.03, 1.5, rng.next_u64()});
    std::vector<std::size_t> counts(5, 0);
    for (std::size_t c : g.clean_labels) ++counts[c];
    ok = ok && counts == partition_sizes(101, 5);
    std::vector<bool> seen(4, false);
    for (std::size_t k : g.feature_permutation) seen[k] = true;
    for (bool s : seen) ok = ok && s;
    for (const auto& a : g.factors) {
      const Matrix cov = a.transpose() * a;
      ok = ok && cov.isApprox(cov.transpose()) && Eigen::SelfAdjointEigenSolver<Matrix>(cov).eigenvalues().minCoeff() > -1e-12;
    }
    return Verdict{ok, ok ? "sizes, counts, permutation and covariance factors valid" : "datagen invariant violated"};
  });

  check("datagen determinism", [&](Rng& rng) {
    const GenConfig gc{50, 3, 4, 0.0, 1.5, rng.next_u64()};
    const VIDataset a = generate(gc);
    const VIDataset b = generate(gc);
    return Verdict{a.X == b.X && a.Y == b.Y, "same seed gives identical datasets"};
  });

  check("datagen class covariance", [&](Rng& rng) {
    const GeneratedData g = generate_detailed(GenConfig{150000, 3, 3, 0.0, 1.5, rng.next_u64()});
    double worst = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<Eigen::Index> rows;
      for (std::size_t i = 0; i < g.clean_labels.size(); ++i) {
        if (g.clean_labels[i] == j) rows.push_back(static_cast<Eigen::Index>(i));
      }
      Matrix xs(static_cast<Eigen::Index>(rows.size()), 3);
      for (std::size_t r = 0; r < rows.size(); ++r) xs.row(static_cast<Eigen::Index>(r)) = g.data.X.row(rows[r]);
      const Matrix centered = xs.rowwise() - xs.colwise().mean();
      const Matrix sample_cov = centered.transpose() * centered / static_cast<double>(rows.size() - 1);
      const Matrix cov = g.factors[j].transpose() * g.factors[j];
      Matrix permuted(3, 3);
      for (Eigen::Index a = 0; a < 3; ++a) {
        for (Eigen::Index b = 0; b < 3; ++b) {
          permuted(a, b) = cov(static_cast<Eigen::Index>(g.feature_permutation[static_cast<std::size_t>(a)]),
                               static_cast<Eigen::Index>(g.feature_permutation[static_cast<std::size_t>(b)]));
        }
      }
      worst = std::max(worst, (sample_cov - permuted).norm() / permuted.norm());
    }
    return below(worst, 0.1, "max Frobenius relative error");
  });

  check("datagen label-noise rate", [&](Rng& rng) {
    const GeneratedData g = generate_detailed(GenConfig{100000, 2, 2, 0.03, 1.5, rng.next_u64()});
    double flips = 0.0;
    for (bool r : g.relabeled) flips += r ? 1.0 : 0.0;
    const double rate = flips / 100000.0;
    return Verdict{std::abs(rate - 0.03) < 0.005, "rate " + sci(rate)};
  });

  return report;
}

}  // namespace dualgeo
