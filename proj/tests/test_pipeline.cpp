#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "subspect/config.hpp"
#include "subspect/experiments.hpp"
#include "subspect/trainer.hpp"

using namespace subspect;
namespace fs = std::filesystem;

namespace {

data::GenCfg quick_gen_cfg() {
  data::GenCfg g;
  g.frame.n_bands = 14;
  g.frame.q = 299;
  g.snr_grid = {0.0, 10.0, 20.0};
  g.l_symbols = 64;
  return g;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("normalize_minmax: endpoints, degenerate frames, monotonicity") {
  nn::Tensor<float> x({2, 3, 1});
  x.data = {-2.0f, 0.0f, 2.0f, 1.0f, -1.0f, 0.5f};
  const auto y = data::normalize_minmax(x);
  CHECK(y.data[0] == 0.0f);
  CHECK(y.data[2] == 1.0f);
  for (auto v : y.data) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  // Order preserved for 100 random pairs.
  Rng rng(4);
  nn::Tensor<float> big({4, 25, 2});
  for (auto& v : big.data) v = static_cast<float>(rng.uniform(-5, 5));
  const auto yb = data::normalize_minmax(big);
  for (int t = 0; t < 100; t++) {
    const auto i = rng.uniform_int(big.data.size());
    const auto j = rng.uniform_int(big.data.size());
    CHECK((big.data[i] < big.data[j]) == (yb.data[i] < yb.data[j]));
  }

  nn::Tensor<float> constant({2, 2, 1});
  for (auto& v : constant.data) v = 3.25f;
  for (auto v : data::normalize_minmax(constant).data) CHECK(v == 0.0f);

  nn::Tensor<float> bad({1, 1, 1});
  bad.data = {std::numeric_limits<float>::quiet_NaN()};
  CHECK_THROWS_AS(data::normalize_minmax(bad), DataError);
}

TEST_CASE("normalize_ap: phase and unit-norm amplitude rows") {
  Eigen::MatrixXcd sym(2, 4);
  sym.row(0) << cplx{1, 0}, cplx{2, 0}, cplx{0.5, 0}, cplx{3, 0};
  sym.row(1) << cplx{-1, 0}, cplx{-2, 0}, cplx{-0.5, 0}, cplx{-3, 0};
  const auto out = data::normalize_ap(sym);
  REQUIRE(out.shape == std::vector<int>{2, 4, 2});
  double norm0 = 0;
  for (int l = 0; l < 4; l++) {
    CHECK(out.at(0, l, 1) == 0.0f);  // positive reals: zero phase
    CHECK(std::abs(std::abs(out.at(1, l, 1)) - 1.0f) < 1e-6);  // arg = +-pi
    norm0 += out.at(0, l, 0) * out.at(0, l, 0);
  }
  CHECK(std::sqrt(norm0) == doctest::Approx(1.0).epsilon(1e-6));

  Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(1, 4);
  const auto z = data::normalize_ap(zero);
  for (auto v : z.data) CHECK(v == 0.0f);
}

TEST_CASE("gen_dwss shapes, labels and seeded checksum") {
  const auto a = sns::default_sensing_matrix();
  const auto cfg = quick_gen_cfg();
  const auto ds = data::gen_dwss(cfg, a, 24, 7);
  CHECK(ds.count() == 24);
  CHECK(ds.bands == 14);
  CHECK(ds.len == 299);
  for (const auto& ex : ds.examples) {
    CHECK(ex.input.shape == std::vector<int>{14, 299, 2});
    int busy = 0;
    for (size_t b = 0; b < ex.s.size(); b++) {
      CHECK((ex.k[b] != 0) == (ex.s[b] != 0));
      busy += ex.s[b];
    }
    CHECK(busy >= 1);
    CHECK(busy <= 4);
    for (auto v : ex.input.data) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
  const auto ds2 = data::gen_dwss(cfg, a, 24, 7);
  CHECK(data::dataset_checksum(ds) == data::dataset_checksum(ds2));
  const auto ds3 = data::gen_dwss(cfg, a, 24, 8);
  CHECK(data::dataset_checksum(ds) != data::dataset_checksum(ds3));
}

TEST_CASE("gen_dnmc: shapes, normalization ranges, vacant rows") {
  const auto a = sns::default_sensing_matrix();
  const auto cfg = quick_gen_cfg();
  const auto iq = data::gen_dnmc(cfg, a, 12, 3, false, sig::ChannelKind::awgn);
  CHECK(iq.kind == data::DatasetKind::dnmc_iq);
  CHECK(iq.len == 64);
  for (const auto& ex : iq.examples) {
    CHECK(ex.input.shape == std::vector<int>{14, 64, 2});
    for (auto v : ex.input.data) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
  const auto ap = data::gen_dnmc(cfg, a, 12, 3, true, sig::ChannelKind::awgn);
  CHECK(ap.kind == data::DatasetKind::dnmc_ap);
  for (const auto& ex : ap.examples) {
    for (int b = 0; b < 14; b++) {
      double norm = 0;
      for (int l = 0; l < 64; l++) norm += ex.input.at(b, l, 0) * ex.input.at(b, l, 0);
      if (ex.s[b])
        CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-5));
      else
        CHECK(norm == 0.0);  // vacant rows are zero before and after DDC
      for (int l = 0; l < 64; l++) {
        CHECK(ex.input.at(b, l, 1) >= -1.0f);
        CHECK(ex.input.at(b, l, 1) <= 1.0f);
      }
    }
  }
}

TEST_CASE("classification pipeline faithfulness (noiseless, AWGN, gt support)") {
  // shape_band -> sample -> support_reconstruct -> ddc recovers the symbols.
  const auto& a = sns::default_sensing_matrix();
  const auto taps = sig::rrc_taps(0.35, 2, 40);
  const int l = 128;
  const int q = l * 2 + static_cast<int>(taps.size()) - 1;
  Rng rng(9);
  const auto symbols = sig::gen_symbols(
      sig::ModScheme::qam16, sig::symbols_needed(q, static_cast<int>(taps.size()), 2), rng);

  sig::WidebandFrame f;
  f.x = Eigen::MatrixXcd::Zero(14, q);
  f.occupancy.assign(14, 0);
  f.mods.assign(14, 0);
  f.occupancy[6] = 1;
  f.mods[6] = 3;
  const auto row = sig::shape_band(symbols, taps, 2, q);
  for (int t = 0; t < q; t++) f.x(6, t) = row[t];

  const auto meas = sns::sample(f, a);
  const auto xhat = rec::support_reconstruct(
      a, meas, rec::Support::from_occupancy(f.occupancy));
  std::vector<cplx> rrow(xhat.row(6).begin(), xhat.row(6).end());
  const auto got = rec::ddc(rrow, taps, 2, l);
  double err = 0, ref = 0;
  for (int i = 0; i < l; i++) {
    err += std::norm(got[i] - symbols[i]);
    ref += std::norm(symbols[i]);
  }
  CHECK(std::sqrt(err / ref) < 1e-3);
}

TEST_CASE("gen_dwmc shapes and labels") {
  const auto a = sns::default_sensing_matrix();
  const auto ds = data::gen_dwmc(quick_gen_cfg(), a, 10, 5,
                                 sig::ChannelKind::rayleigh);
  CHECK(ds.kind == data::DatasetKind::dwmc);
  CHECK(ds.channel == sig::ChannelKind::rayleigh);
  for (const auto& ex : ds.examples) {
    CHECK(ex.input.shape == std::vector<int>{14, 299, 2});
    for (size_t b = 0; b < ex.s.size(); b++)
      CHECK((ex.k[b] != 0) == (ex.s[b] != 0));
  }
}

TEST_CASE("dataset key coverage is near-uniform") {
  const auto a = sns::default_sensing_matrix();
  data::GenCfg cfg = quick_gen_cfg();
  cfg.snr_grid = {0.0, 10.0};
  const auto ds = data::gen_dwss(cfg, a, 400, 13);
  const auto hist = ds.key_histogram();
  CHECK(hist.size() == 14);  // 7 schemes x 2 SNRs
  double total = 0;
  for (const auto& [k, v] : hist) total += v;
  const double mean = total / static_cast<double>(hist.size());
  for (const auto& [k, v] : hist) {
    INFO(k, " count=", v, " mean=", mean);
    CHECK(std::abs(v - mean) <= 0.10 * mean);
  }
}

TEST_CASE("dataset save/load round trip and corruption detection") {
  const auto a = sns::default_sensing_matrix();
  const auto ds = data::gen_dwss(quick_gen_cfg(), a, 16, 21);
  const auto path = (fs::temp_directory_path() / "subspect_ds.snsd").string();
  data::save_dataset(ds, path);
  const auto loaded = data::load_dataset(path);
  CHECK(loaded.count() == 16);
  CHECK(loaded.kind == data::DatasetKind::dwss);
  for (int i = 0; i < 16; i++) {
    CHECK(loaded.examples[i].input.data == ds.examples[i].input.data);
    CHECK(loaded.examples[i].s == ds.examples[i].s);
    CHECK(loaded.examples[i].seed == ds.examples[i].seed);
  }

  // save -> load -> save is byte-identical.
  const auto path2 = (fs::temp_directory_path() / "subspect_ds2.snsd").string();
  data::save_dataset(loaded, path2);
  CHECK(slurp(path) == slurp(path2));

  // One corrupted payload byte fails the checksum.
  auto bytes = slurp(path);
  bytes[bytes.size() / 3] = static_cast<char>(bytes[bytes.size() / 3] ^ 0x11);
  spit(path2, bytes);
  fs::copy_file(path + ".manifest.json", path2 + ".manifest.json",
                fs::copy_options::overwrite_existing);
  CHECK_THROWS_AS(data::load_dataset(path2), IoError);

  // Manifest disagreement is also fatal.
  spit(path2, slurp(path));
  auto manifest = slurp(path + ".manifest.json");
  const auto pos = manifest.find("\"count\": 16");
  REQUIRE(pos != std::string::npos);
  manifest.replace(pos, 11, "\"count\": 17");
  spit(path2 + ".manifest.json", manifest);
  CHECK_THROWS_AS(data::load_dataset(path2), IoError);

  fs::remove(path);
  fs::remove(path2);
  fs::remove(path + ".manifest.json");
  fs::remove(path2 + ".manifest.json");
}

TEST_CASE("metrics match counting oracles") {
  std::vector<std::vector<uint8_t>> labels = {{1, 0, 1, 0}, {0, 0, 1, 1}};
  std::vector<std::vector<uint8_t>> preds = labels;
  CHECK(metrics::sensing_accuracy(preds, labels) == 1.0);
  preds[1][0] = 1;  // one wrong band of 8
  CHECK(metrics::sensing_accuracy(preds, labels) ==
        doctest::Approx(1.0 - 1.0 / 8));

  std::vector<std::vector<int>> ktrue = {{2, 0, 5, 0}, {0, 0, 3, 7}};
  std::vector<std::vector<int>> kpred = ktrue;
  CHECK(metrics::classification_accuracy(kpred, ktrue, labels) == 1.0);
  kpred[0][2] = 4;
  CHECK(metrics::classification_accuracy(kpred, ktrue, labels) ==
        doctest::Approx(0.75));

  const auto c = metrics::confusion_matrix(kpred, ktrue, labels);
  CHECK(c.sum() == 4);
  CHECK(c(5, 4) == 1);
  CHECK(c(2, 2) == 1);
  // Busy-band only: all-vacant occupancy is a contract violation.
  std::vector<std::vector<uint8_t>> vacant = {{0, 0, 0, 0}, {0, 0, 0, 0}};
  CHECK_THROWS_AS(metrics::classification_accuracy(kpred, ktrue, vacant),
                  DataError);

  // Random-instance agreement with an element-wise oracle.
  Rng rng(31);
  std::vector<std::vector<uint8_t>> rp, rl;
  for (int f = 0; f < 20; f++) {
    std::vector<uint8_t> p(14), l(14);
    for (int b = 0; b < 14; b++) {
      p[b] = rng.uniform() < 0.5;
      l[b] = rng.uniform() < 0.3;
    }
    rp.push_back(p);
    rl.push_back(l);
  }
  int64_t agree = 0;
  for (int f = 0; f < 20; f++)
    for (int b = 0; b < 14; b++) agree += rp[f][b] == rl[f][b];
  CHECK(metrics::sensing_accuracy(rp, rl) ==
        doctest::Approx(agree / 280.0).epsilon(1e-12));
}

TEST_CASE("config parsing, overrides and round trips") {
  auto cfg = harness::Config::defaults();
  CHECK(cfg.get_int("frame.n", 0) == 14);
  CHECK(cfg.get_double("learning.beta1", 0) == doctest::Approx(0.9));

  cfg.apply_override("learning.beta1=0.95");
  CHECK(cfg.train_cfg().beta1 == doctest::Approx(0.95));
  cfg.apply_override("count=128");  // bare key shadows dataset.count
  CHECK(cfg.get_int("dataset.count", 0) == 128);

  const auto grid = cfg.snr_grid();
  CHECK(grid.size() == 16);
  CHECK(grid.front() == -10.0);
  CHECK(grid.back() == 20.0);

  CHECK_THROWS_AS(cfg.apply_override("oops"), ConfigError);
  CHECK_THROWS_AS(harness::Config::from_text("[frame\nn=3"), ConfigError);
  CHECK_THROWS_AS(harness::Config::from_text("frame.n 14"), ConfigError);
  CHECK_THROWS_AS(harness::Config::from_file("/nonexistent/x.cfg"), IoError);

  auto bad = harness::Config::defaults();
  bad.apply_override("learning.lr=banana");
  CHECK_THROWS_AS(bad.train_cfg(), ConfigError);

  const auto text = cfg.render();
  CHECK(text.find("learning.beta1 = 0.95") != std::string::npos);
  CHECK(text.find("dataset.count = 128") != std::string::npos);
}

TEST_CASE("training: overfit sanity, determinism, descent" *
          doctest::timeout(1200)) {
  const auto a = sns::default_sensing_matrix();
  data::GenCfg gcfg = quick_gen_cfg();
  gcfg.snr_grid = {20.0};

  SUBCASE("dlwss overfits a tiny high-SNR set; fixed seed reproduces") {
    const auto ds = data::gen_dwss(gcfg, a, 64, 77);
    nn::ModelSpec spec = nn::ModelSpec::dlwss();
    // Desk-size stack for the unit test; the published widths are exercised
    // in the acceptance suite.
    spec.conv_widths = {32, 16, 8};
    spec.conv_filters = {16, 16, 8};
    spec.in_len = 299;
    nn::TrainCfg tc;
    tc.batch = 8;
    tc.max_epochs = 30;
    tc.patience = 30;
    tc.val_fraction = 0.0;
    tc.seed = 5;
    auto model = nn::build_model<float>(spec, 11);
    const auto res = train::train_dlwss(model, ds, tc);
    CHECK(res.history.back().train_acc >= 0.99);
    // Loss after the first epoch beats the untrained model.
    CHECK(res.history.back().train_loss < res.history.front().train_loss);

    auto model2 = nn::build_model<float>(spec, 11);
    const auto res2 = train::train_dlwss(model2, ds, tc);
    REQUIRE(res.history.size() == res2.history.size());
    for (size_t e = 0; e < res.history.size(); e++) {
      CHECK(res.history[e].train_loss == res2.history[e].train_loss);
      CHECK(res.history[e].val_loss == res2.history[e].val_loss);
    }
    // 5-epoch moving average of the training loss is non-increasing.
    std::vector<double> ma;
    for (size_t e = 4; e < res.history.size(); e++) {
      double s = 0;
      for (size_t j = e - 4; j <= e; j++) s += res.history[j].train_loss;
      ma.push_back(s / 5);
    }
    for (size_t i = 1; i < ma.size(); i++) CHECK(ma[i] <= ma[i - 1] + 1e-9);
  }

  SUBCASE("dlmc overfits and honors the mask") {
    gcfg.l_symbols = 64;
    const auto ds = data::gen_dnmc(gcfg, a, 64, 78, false, sig::ChannelKind::awgn);
    nn::ModelSpec spec = nn::ModelSpec::ndlmc_baseline(14, 64);
    nn::TrainCfg tc;
    tc.batch = 8;
    tc.max_epochs = 40;
    tc.patience = 40;
    tc.val_fraction = 0.0;
    tc.seed = 6;
    auto model = nn::build_model<float>(spec, 12);
    const auto res = train::train_dlmc(model, ds, tc);
    CHECK(res.history.back().train_acc >= 0.99);
  }

  SUBCASE("all-vacant dataset: zero loss, zero movement") {
    data::Dataset ds;
    ds.kind = data::DatasetKind::dnmc_iq;
    ds.bands = 4;
    ds.len = 16;
    for (int i = 0; i < 8; i++) {
      data::LabeledExample ex;
      ex.input = nn::Tensor<float>({4, 16, 2});
      ex.s.assign(4, 0);
      ex.k.assign(4, 0);
      ds.examples.push_back(std::move(ex));
    }
    nn::ModelSpec spec = nn::ModelSpec::ndlmc_baseline(4, 16);
    spec.base_filters = 8;
    auto model = nn::build_model<float>(spec, 13);
    std::vector<float> before;
    for (auto* p : model.params())
      before.insert(before.end(), p->data.begin(), p->data.end());
    nn::TrainCfg tc;
    tc.batch = 4;
    tc.max_epochs = 3;
    tc.val_fraction = 0.0;
    const auto res = train::train_dlmc(model, ds, tc);
    CHECK(res.history.back().train_loss == 0.0);
    std::vector<float> after;
    for (auto* p : model.params())
      after.insert(after.end(), p->data.begin(), p->data.end());
    CHECK(before == after);
  }
}

TEST_CASE("inference rules: threshold and vacant forcing") {
  auto model = nn::build_model<float>(nn::ModelSpec::ndlmc_baseline(4, 16), 3);
  nn::Tensor<float> x({4, 16, 2});
  Rng rng(8);
  for (auto& v : x.data) v = static_cast<float>(rng.uniform(0, 1));
  std::vector<uint8_t> occ = {1, 0, 1, 0};
  const auto k = train::infer_modulation(model, x, occ);
  CHECK(k[1] == 0);
  CHECK(k[3] == 0);
  // Shifting all logits of a band leaves its decision unchanged: softmax
  // argmax invariance holds trivially for the argmax reading; verified via
  // the loss path in test_nn.
}

TEST_CASE("somp baseline experiment and sweep CSV output") {
  const auto& a = sns::default_sensing_matrix();
  harness::SompBaselineCfg cfg;
  cfg.snr_grid = {100.0};  // effectively noiseless
  cfg.frames_per_snr = 30;
  cfg.frame.p_max = 3;
  const auto report = harness::run_somp_baseline(cfg, a);
  CHECK(report.sensing_acc[0] == 1.0);

  harness::SompBaselineCfg fixed = cfg;
  fixed.mode = harness::SompBaselineCfg::Mode::fixed;
  fixed.fixed_k = 0;
  const auto rf = harness::run_somp_baseline(fixed, a);
  // Predicting all-vacant scores the vacant fraction.
  Rng seeder(fixed.seed);
  double vacant = 0;
  int64_t all = 0;
  sig::FrameCfg fc = fixed.frame;
  fc.snr_db = 100.0;
  for (int i = 0; i < fixed.frames_per_snr; i++) {
    const auto f = sig::assemble_frame(fc, seeder.next_u64());
    for (auto o : f.occupancy) {
      vacant += o == 0;
      all++;
    }
  }
  CHECK(rf.sensing_acc[0] == doctest::Approx(vacant / all));

  const auto dir = (fs::temp_directory_path() / "subspect_sweep").string();
  harness::write_sweep_csv(report, dir);
  const auto csv = slurp(dir + "/sweep.csv");
  CHECK(csv.find("snr_db,sensing_acc,class_acc") == 0);
  fs::remove_all(dir);
}

TEST_CASE("selftest passes") {
  std::ostringstream os;
  CHECK(harness::run_selftest(os) == 0);
}
