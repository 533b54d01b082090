#include "subspect/gradcheck.hpp"

#include <cmath>
#include <functional>
#include <ostream>

#include "subspect/loss.hpp"
#include "subspect/model.hpp"

namespace subspect::nn {

namespace {

double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
}

Tensor<double> random_tensor(std::vector<int> shape, Rng& rng, double lo = -1,
                             double hi = 1) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// Max relative error between the model's analytic gradients (input + params)
// and central differences of the projected scalar sum(w .* forward(x)).
double check_model(Sequential<double>& model, const Tensor<double>& x0,
                   Rng& rng) {
  Tensor<double> x = x0;
  const auto y0 = model.forward(x, true);
  Tensor<double> w = random_tensor(y0.shape, rng);
  model.zero_grads();
  const Tensor<double> din = model.backward(w);

  auto scalar = [&](const Tensor<double>& xin) {
    const auto y = model.forward(xin, false);
    double s = 0;
    for (size_t i = 0; i < y.data.size(); i++) s += w.data[i] * y.data[i];
    return s;
  };

  double worst = 0;
  for (int64_t i = 0; i < x.size(); i++) {
    const double keep = x.data[i];
    x.data[i] = keep + kGradCheckEps;
    const double fp = scalar(x);
    x.data[i] = keep - kGradCheckEps;
    const double fm = scalar(x);
    x.data[i] = keep;
    worst = std::max(worst, rel_err(din.data[i], (fp - fm) / (2 * kGradCheckEps)));
  }
  for (auto* p : model.params()) {
    for (int64_t i = 0; i < p->size(); i++) {
      const double keep = p->data[i];
      p->data[i] = keep + kGradCheckEps;
      const double fp = scalar(x);
      p->data[i] = keep - kGradCheckEps;
      const double fm = scalar(x);
      p->data[i] = keep;
      worst = std::max(worst, rel_err(p->grad[i], (fp - fm) / (2 * kGradCheckEps)));
    }
  }
  return worst;
}

GradCheckCase check_bce(int instances, uint64_t seed) {
  GradCheckCase c;
  c.name = "bce-loss";
  c.instances = instances;
  Rng rng(seed);
  for (int inst = 0; inst < instances; inst++) {
    const int n = 3 + static_cast<int>(rng.uniform_int(10));
    Tensor<double> pred({n});
    std::vector<uint8_t> labels(n);
    for (int i = 0; i < n; i++) {
      pred.data[i] = rng.uniform(0.05, 0.95);
      labels[i] = rng.uniform() < 0.4;
    }
    const auto lr = bce_loss(pred, labels);
    for (int i = 0; i < n; i++) {
      const double keep = pred.data[i];
      pred.data[i] = keep + kGradCheckEps;
      const double fp = bce_loss(pred, labels).value;
      pred.data[i] = keep - kGradCheckEps;
      const double fm = bce_loss(pred, labels).value;
      pred.data[i] = keep;
      c.max_rel_err = std::max(
          c.max_rel_err, rel_err(lr.grad.data[i], (fp - fm) / (2 * kGradCheckEps)));
    }
  }
  c.pass = c.max_rel_err < kGradCheckTol;
  return c;
}

GradCheckCase check_masked_ce(int instances, uint64_t seed) {
  GradCheckCase c;
  c.name = "masked-ce-loss";
  c.instances = instances;
  Rng rng(seed);
  for (int inst = 0; inst < instances; inst++) {
    const int n = 3 + static_cast<int>(rng.uniform_int(6));
    const int classes = 2 + static_cast<int>(rng.uniform_int(7));
    Tensor<double> logits = random_tensor({n, classes}, rng, -2, 2);
    std::vector<int> mods(n, 0);
    std::vector<uint8_t> mask(n, 0);
    for (int i = 0; i < n; i++) {
      if (rng.uniform() < 0.6) {
        mask[i] = 1;
        mods[i] = 1 + static_cast<int>(rng.uniform_int(classes - 1));
      }
    }
    const auto lr = masked_ce_loss(logits, mods, mask);
    for (int64_t i = 0; i < logits.size(); i++) {
      const double keep = logits.data[i];
      logits.data[i] = keep + kGradCheckEps;
      const double fp = masked_ce_loss(logits, mods, mask).value;
      logits.data[i] = keep - kGradCheckEps;
      const double fm = masked_ce_loss(logits, mods, mask).value;
      logits.data[i] = keep;
      c.max_rel_err = std::max(
          c.max_rel_err, rel_err(lr.grad.data[i], (fp - fm) / (2 * kGradCheckEps)));
    }
  }
  c.pass = c.max_rel_err < kGradCheckTol;
  return c;
}

// End-to-end: scalar loss gradients w.r.t. all parameters of a tiny model.
GradCheckCase check_arch(const std::string& name, ModelSpec spec, bool bce,
                         int instances, uint64_t seed) {
  GradCheckCase c;
  c.name = name;
  c.instances = instances;
  Rng rng(seed);
  for (int inst = 0; inst < instances; inst++) {
    for (int attempt = 0;; attempt++) {
      if (attempt >= 64) throw Error("gradcheck: no kink-free instance");
      auto model = build_model<double>(spec, rng.next_u64());
      Tensor<double> x =
          random_tensor({spec.bands, spec.in_len, spec.in_ch}, rng, 0, 1);
      std::vector<uint8_t> labels(spec.bands);
      std::vector<int> mods(spec.bands, 0);
      for (int b = 0; b < spec.bands; b++) {
        labels[b] = rng.uniform() < 0.5;
        if (labels[b])
          mods[b] = 1 + static_cast<int>(rng.uniform_int(spec.classes > 1
                                                             ? spec.classes - 1
                                                             : 1));
      }
      auto scalar = [&](bool cache) {
        const auto out = model.forward(x, cache);
        return bce ? bce_loss(out, labels).value
                   : masked_ce_loss(out, mods, labels).value;
      };
      const auto out = model.forward(x, true);
      if (model.min_kink_distance() < 10 * kGradCheckEps) continue;
      const auto lr = bce ? bce_loss(out, labels)
                          : masked_ce_loss(out, mods, labels);
      model.zero_grads();
      model.backward(lr.grad);
      double worst = 0;
      for (auto* p : model.params()) {
        for (int64_t i = 0; i < p->size(); i++) {
          const double keep = p->data[i];
          p->data[i] = keep + kGradCheckEps;
          const double fp = scalar(false);
          p->data[i] = keep - kGradCheckEps;
          const double fm = scalar(false);
          p->data[i] = keep;
          worst = std::max(worst,
                           rel_err(p->grad[i], (fp - fm) / (2 * kGradCheckEps)));
        }
      }
      c.max_rel_err = std::max(c.max_rel_err, worst);
      break;
    }
  }
  c.pass = c.max_rel_err < kGradCheckTol;
  return c;
}

}  // namespace

std::vector<GradCheckCase> run_gradient_checks(int instances_per_case,
                                               uint64_t seed) {
  std::vector<GradCheckCase> cases;
  uint64_t s = seed;

  // Each case draws a (layer stack, input) pair per instance, rejecting draws
  // that land within 10*eps of a relu kink.
  auto coupled_case = [&](const std::string& name, auto&& make_pair) {
    GradCheckCase c;
    c.name = name;
    c.instances = instances_per_case;
    Rng rng(s++);
    for (int i = 0; i < instances_per_case; i++) {
      for (int attempt = 0;; attempt++) {
        if (attempt >= 64) throw Error("gradcheck: no kink-free instance");
        auto [model, x] = make_pair(rng);
        model.forward(x, true);
        if (model.min_kink_distance() < 10 * kGradCheckEps) continue;
        c.max_rel_err = std::max(c.max_rel_err, check_model(model, x, rng));
        break;
      }
    }
    c.pass = c.max_rel_err < kGradCheckTol;
    cases.push_back(c);
  };

  coupled_case("conv-1xw-valid", [](Rng& rng) {
    const int w = 2 + static_cast<int>(rng.uniform_int(3));
    const int ci = 1 + static_cast<int>(rng.uniform_int(3));
    const int co = 1 + static_cast<int>(rng.uniform_int(3));
    const int b = 1 + static_cast<int>(rng.uniform_int(3));
    const int l = w + 3 + static_cast<int>(rng.uniform_int(4));
    Sequential<double> m;
    m.layers.push_back(std::make_unique<Conv1xW<double>>(w, ci, co));
    Rng init = rng.derive(77);
    for (auto& lay : m.layers) lay->init_params(init);
    return std::make_pair(std::move(m), random_tensor({b, l, ci}, rng));
  });

  coupled_case("conv-1x1", [](Rng& rng) {
    const int ci = 1 + static_cast<int>(rng.uniform_int(4));
    const int co = 1 + static_cast<int>(rng.uniform_int(4));
    const int b = 1 + static_cast<int>(rng.uniform_int(3));
    const int l = 2 + static_cast<int>(rng.uniform_int(6));
    Sequential<double> m;
    m.layers.push_back(std::make_unique<Conv1xW<double>>(1, ci, co));
    Rng init = rng.derive(77);
    for (auto& lay : m.layers) lay->init_params(init);
    return std::make_pair(std::move(m), random_tensor({b, l, ci}, rng));
  });

  coupled_case("conv-1xw-same", [](Rng& rng) {
    const int w = 3 + 2 * static_cast<int>(rng.uniform_int(2));  // 3 or 5
    const int ci = 1 + static_cast<int>(rng.uniform_int(3));
    const int co = 1 + static_cast<int>(rng.uniform_int(3));
    const int b = 1 + static_cast<int>(rng.uniform_int(3));
    const int l = w + 2 + static_cast<int>(rng.uniform_int(4));
    Sequential<double> m;
    m.layers.push_back(std::make_unique<Conv1xW<double>>(w, ci, co, true));
    Rng init = rng.derive(77);
    for (auto& lay : m.layers) lay->init_params(init);
    return std::make_pair(std::move(m), random_tensor({b, l, ci}, rng));
  });

  coupled_case("relu", [](Rng& rng) {
    const int b = 1 + static_cast<int>(rng.uniform_int(3));
    const int l = 3 + static_cast<int>(rng.uniform_int(6));
    Sequential<double> m;
    m.layers.push_back(std::make_unique<Relu<double>>());
    return std::make_pair(std::move(m), random_tensor({b, l, 2}, rng));
  });

  coupled_case("sigmoid", [](Rng& rng) {
    const int b = 1 + static_cast<int>(rng.uniform_int(3));
    const int l = 3 + static_cast<int>(rng.uniform_int(6));
    Sequential<double> m;
    m.layers.push_back(std::make_unique<Sigmoid<double>>());
    return std::make_pair(std::move(m), random_tensor({b, l, 2}, rng, -3, 3));
  });

  coupled_case("softmax", [](Rng& rng) {
    const int b = 1 + static_cast<int>(rng.uniform_int(4));
    const int c = 2 + static_cast<int>(rng.uniform_int(7));
    Sequential<double> m;
    m.layers.push_back(std::make_unique<Softmax<double>>());
    return std::make_pair(std::move(m), random_tensor({b, c}, rng, -2, 2));
  });

  coupled_case("custom-pool", [](Rng& rng) {
    const int b = 1 + static_cast<int>(rng.uniform_int(3));
    const int l = 1 + static_cast<int>(rng.uniform_int(8));
    const int c = 1 + static_cast<int>(rng.uniform_int(4));
    Sequential<double> m;
    m.layers.push_back(std::make_unique<CustomPool<double>>());
    return std::make_pair(std::move(m), random_tensor({b, l, c}, rng));
  });

  coupled_case("dense", [](Rng& rng) {
    const int ci = 1 + static_cast<int>(rng.uniform_int(6));
    const int co = 1 + static_cast<int>(rng.uniform_int(4));
    const int b = 1 + static_cast<int>(rng.uniform_int(5));
    Sequential<double> m;
    m.layers.push_back(std::make_unique<DenseLayer<double>>(ci, co));
    Rng init = rng.derive(77);
    for (auto& lay : m.layers) lay->init_params(init);
    return std::make_pair(std::move(m), random_tensor({b, ci}, rng));
  });

  coupled_case("inception-block", [](Rng& rng) {
    InceptionBlock<double>::Split split;
    split.c1 = 2; split.r3 = 2; split.c3 = 2;
    split.r5 = 1; split.c5 = 2; split.cp = 1;
    const int ci = 1 + static_cast<int>(rng.uniform_int(3));
    const int b = 1 + static_cast<int>(rng.uniform_int(2));
    const int l = 6 + static_cast<int>(rng.uniform_int(3));
    Sequential<double> m;
    m.layers.push_back(
        std::make_unique<InceptionBlock<double>>(ci, split.total(), split));
    Rng init = rng.derive(77);
    for (auto& lay : m.layers) lay->init_params(init);
    return std::make_pair(std::move(m), random_tensor({b, l, ci}, rng));
  });

  cases.push_back(check_bce(instances_per_case, s++));
  cases.push_back(check_masked_ce(instances_per_case, s++));

  // End-to-end tiny architectures (learning-path integrity).
  const int arch_instances = std::max(3, instances_per_case / 20);
  {
    ModelSpec spec = ModelSpec::dlwss(3, 14);
    spec.conv_widths = {5, 4, 3};
    spec.conv_filters = {4, 3, 2};
    cases.push_back(check_arch("arch-dlwss", spec, true, arch_instances, s++));
  }
  {
    ModelSpec spec = ModelSpec::ndlmc_baseline(3, 8);
    spec.base_filters = 3;
    spec.classes = 4;
    cases.push_back(
        check_arch("arch-ndlmc-baseline", spec, false, arch_instances, s++));
  }
  {
    ModelSpec spec = ModelSpec::ndlmc_inception(2, 7);
    spec.inception_split = {2, 2, 2, 1, 2, 1};
    spec.classes = 3;
    cases.push_back(
        check_arch("arch-ndlmc-inception", spec, false, arch_instances, s++));
  }
  {
    ModelSpec spec = ModelSpec::wdlmc(3, 12);
    spec.conv_widths = {5, 3, 2};
    spec.conv_filters = {4, 3, 2};
    spec.classes = 4;
    cases.push_back(check_arch("arch-wdlmc", spec, false, arch_instances, s++));
  }
  return cases;
}

bool all_passed(const std::vector<GradCheckCase>& cases) {
  for (const auto& c : cases)
    if (!c.pass) return false;
  return true;
}

void print_report(const std::vector<GradCheckCase>& cases, std::ostream& os) {
  for (const auto& c : cases)
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  instances="
       << c.instances << "  max_rel_err=" << c.max_rel_err << "\n";
}

}  // namespace subspect::nn
