#include "subspect/datasets.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "subspect/crc64.hpp"

namespace subspect::data {

const char* kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::dwss: return "dwss";
    case DatasetKind::dnmc_iq: return "dnmc-iq";
    case DatasetKind::dnmc_ap: return "dnmc-ap";
    case DatasetKind::dwmc: return "dwmc";
  }
  return "?";
}

DatasetKind kind_from_name(const std::string& name) {
  for (DatasetKind k : {DatasetKind::dwss, DatasetKind::dnmc_iq,
                        DatasetKind::dnmc_ap, DatasetKind::dwmc})
    if (name == kind_name(k)) return k;
  throw ConfigError("unknown dataset kind: " + name);
}

std::vector<double> GenCfg::default_snr_grid() {
  std::vector<double> g;
  for (int s = -10; s <= 20; s += 2) g.push_back(s);
  return g;
}

std::map<std::string, int> Dataset::key_histogram() const {
  std::map<std::string, int> hist;
  for (const auto& ex : examples) {
    for (size_t b = 0; b < ex.k.size(); b++) {
      if (!ex.k[b]) continue;
      std::ostringstream key;
      key << sig::scheme_name(sig::scheme_from_index(ex.k[b])) << "@"
          << ex.snr_db;
      hist[key.str()]++;
    }
  }
  return hist;
}

nn::Tensor<float> normalize_minmax(const nn::Tensor<float>& x) {
  float lo = 0, hi = 0;
  bool first = true;
  for (float v : x.data) {
    if (!std::isfinite(v)) throw DataError("normalize_minmax: non-finite input");
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  nn::Tensor<float> out(x.shape);
  const float range = hi - lo;
  if (range <= 0) return out;  // constant frame -> zeros
  for (size_t i = 0; i < x.data.size(); i++) out.data[i] = (x.data[i] - lo) / range;
  return out;
}

nn::Tensor<float> normalize_ap(const Eigen::MatrixXcd& symbols) {
  const int bands = static_cast<int>(symbols.rows());
  const int len = static_cast<int>(symbols.cols());
  nn::Tensor<float> out({bands, len, 2});
  for (int b = 0; b < bands; b++) {
    double norm2 = 0;
    for (int l = 0; l < len; l++) {
      const cplx z = symbols(b, l);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DataError("normalize_ap: non-finite input");
      norm2 += std::norm(z);
    }
    const double scale = norm2 > 0 ? 1.0 / std::sqrt(norm2) : 0.0;
    for (int l = 0; l < len; l++) {
      const cplx z = symbols(b, l);
      out.at(b, l, 0) = static_cast<float>(std::abs(z) * scale);
      out.at(b, l, 1) =
          z == cplx{0.0, 0.0}
              ? 0.0f
              : static_cast<float>(std::arg(z) / std::numbers::pi);
    }
  }
  return out;
}

nn::Tensor<float> split_complex(const Eigen::MatrixXcd& m) {
  nn::Tensor<float> out(
      {static_cast<int>(m.rows()), static_cast<int>(m.cols()), 2});
  for (int r = 0; r < m.rows(); r++)
    for (int c = 0; c < m.cols(); c++) {
      out.at(r, c, 0) = static_cast<float>(m(r, c).real());
      out.at(r, c, 1) = static_cast<float>(m(r, c).imag());
    }
  return out;
}

namespace {

// Deterministic scheme assignment cycling through all M schemes so every
// (scheme, SNR) key of the grid is covered near-uniformly.
struct SchemeCycler {
  int next = 0;
  std::vector<int> take(int count) {
    std::vector<int> out(count);
    for (int i = 0; i < count; i++) {
      out[i] = 1 + next;
      next = (next + 1) % sig::kNumSchemes;
    }
    return out;
  }
};

sig::WidebandFrame make_frame(const GenCfg& cfg, const sig::ChannelKind channel,
                              double snr, SchemeCycler& cycler, Rng& seeder,
                              int q) {
  sig::FrameCfg fc = cfg.frame;
  fc.q = q;
  fc.snr_db = snr;
  fc.channel.kind = channel;
  const uint64_t frame_seed = seeder.next_u64();
  // Random occupancy pattern, stratified scheme assignment.
  Rng occ_rng = seeder.derive(frame_seed);
  const int p = 1 + static_cast<int>(occ_rng.uniform_int(fc.p_max));
  const auto bands = occ_rng.sample_without_replacement(fc.n_bands, p);
  std::vector<uint8_t> occ(fc.n_bands, 0);
  for (int b : bands) occ[b] = 1;
  fc.forced_occupancy = occ;
  fc.forced_mods = cycler.take(p);
  return sig::assemble_frame(fc, frame_seed);
}

}  // namespace

Dataset gen_dwss(const GenCfg& cfg, const sns::SensingMatrix& a, int count,
                 uint64_t seed) {
  Dataset ds;
  ds.kind = DatasetKind::dwss;
  ds.bands = cfg.frame.n_bands;
  ds.len = cfg.frame.q;
  ds.channel = cfg.frame.channel.kind;
  ds.config_text = cfg.config_text;
  const auto& grid = cfg.snr_grid;
  if (grid.empty()) throw ConfigError("gen: empty snr grid");
  Rng seeder(seed);
  SchemeCycler cycler;
  for (int i = 0; i < count; i++) {
    const double snr = grid[i % grid.size()];
    auto frame = make_frame(cfg, ds.channel, snr, cycler, seeder, cfg.frame.q);
    const auto meas = sns::sample(frame, a);
    const auto xt = rec::pseudo_reconstruct(a, meas);
    LabeledExample ex;
    ex.input = normalize_minmax(split_complex(xt));
    ex.s = frame.occupancy;
    ex.k.assign(frame.mods.begin(), frame.mods.end());
    ex.snr_db = static_cast<float>(snr);
    ex.seed = frame.seed;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

namespace {

Dataset gen_classification(const GenCfg& cfg, const sns::SensingMatrix& a,
                           int count, uint64_t seed, DatasetKind kind,
                           sig::ChannelKind channel) {
  const bool ddc_form = kind != DatasetKind::dwmc;
  Dataset ds;
  ds.kind = kind;
  ds.bands = cfg.frame.n_bands;
  ds.channel = channel;
  ds.config_text = cfg.config_text;

  const auto taps =
      sig::rrc_taps(cfg.frame.rolloff, cfg.frame.sps, cfg.frame.span_symbols);
  const int q = ddc_form ? cfg.l_symbols * cfg.frame.sps +
                               static_cast<int>(taps.size()) - 1
                         : cfg.frame.q;
  ds.len = ddc_form ? cfg.l_symbols : cfg.frame.q;

  const auto& grid = cfg.snr_grid;
  if (grid.empty()) throw ConfigError("gen: empty snr grid");
  Rng seeder(seed);
  SchemeCycler cycler;
  for (int i = 0; i < count; i++) {
    const double snr = grid[i % grid.size()];
    auto frame = make_frame(cfg, channel, snr, cycler, seeder, q);
    const auto meas = sns::sample(frame, a);
    const auto support = rec::Support::from_occupancy(frame.occupancy);
    const auto xhat = rec::support_reconstruct(a, meas, support);

    LabeledExample ex;
    if (ddc_form) {
      Eigen::MatrixXcd xbb =
          Eigen::MatrixXcd::Zero(frame.bands(), cfg.l_symbols);
      for (int b : support.indices) {
        std::vector<cplx> row(xhat.row(b).begin(), xhat.row(b).end());
        const auto sym = rec::ddc(row, taps, cfg.frame.sps, cfg.l_symbols);
        for (int l = 0; l < cfg.l_symbols; l++) xbb(b, l) = sym[l];
      }
      ex.input = kind == DatasetKind::dnmc_ap
                     ? normalize_ap(xbb)
                     : normalize_minmax(split_complex(xbb));
    } else {
      ex.input = normalize_minmax(split_complex(xhat));
    }
    ex.s = frame.occupancy;
    ex.k.assign(frame.mods.begin(), frame.mods.end());
    ex.snr_db = static_cast<float>(snr);
    ex.seed = frame.seed;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace

Dataset gen_dnmc(const GenCfg& cfg, const sns::SensingMatrix& a, int count,
                 uint64_t seed, bool ap_form, sig::ChannelKind channel) {
  return gen_classification(
      cfg, a, count, seed,
      ap_form ? DatasetKind::dnmc_ap : DatasetKind::dnmc_iq, channel);
}

Dataset gen_dwmc(const GenCfg& cfg, const sns::SensingMatrix& a, int count,
                 uint64_t seed, sig::ChannelKind channel) {
  return gen_classification(cfg, a, count, seed, DatasetKind::dwmc, channel);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

struct CountingWriter {
  std::ostream& os;
  Crc64 crc;
  void write(const void* buf, size_t n) {
    os.write(static_cast<const char*>(buf), static_cast<std::streamsize>(n));
    crc.update(buf, n);
  }
  template <typename T>
  void put(T v) {
    write(&v, sizeof(T));
  }
};

struct CheckedReader {
  std::istream& is;
  Crc64 crc;
  void read(void* buf, size_t n) {
    is.read(static_cast<char*>(buf), static_cast<std::streamsize>(n));
    if (!is) throw IoError("dataset file truncated");
    crc.update(buf, n);
  }
  template <typename T>
  T take() {
    T v{};
    read(&v, sizeof(T));
    return v;
  }
};

void serialize(const Dataset& ds, CountingWriter& w) {
  w.write("SNSD", 4);
  w.put<uint16_t>(1);
  w.put<uint8_t>(static_cast<uint8_t>(ds.kind));
  w.put<uint32_t>(static_cast<uint32_t>(ds.examples.size()));
  w.put<uint16_t>(static_cast<uint16_t>(ds.bands));
  w.put<uint16_t>(static_cast<uint16_t>(ds.len));
  w.put<uint16_t>(static_cast<uint16_t>(ds.channels));
  for (const auto& ex : ds.examples) {
    w.write(ex.input.data.data(), ex.input.data.size() * sizeof(float));
    w.write(ex.s.data(), ex.s.size());
    w.write(ex.k.data(), ex.k.size());
    w.put<float>(ex.snr_db);
    w.put<uint64_t>(ex.seed);
  }
}

}  // namespace

uint64_t dataset_checksum(const Dataset& ds) {
  struct NullBuf : std::streambuf {
    int overflow(int c) override { return c; }
  } null_buf;
  std::ostream null_os(&null_buf);
  CountingWriter w{null_os};
  serialize(ds, w);
  return w.crc.value();
}

void save_dataset(const Dataset& ds, const std::string& path) {
  for (const auto& ex : ds.examples) {
    if (static_cast<int>(ex.s.size()) != ds.bands ||
        static_cast<int>(ex.k.size()) != ds.bands)
      throw DataError("save_dataset: label length mismatch");
    for (size_t b = 0; b < ex.s.size(); b++)
      if ((ex.k[b] == 0) != (ex.s[b] == 0))
        throw DataError("save_dataset: k[n]=0 iff s[n]=0 violated");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  CountingWriter w{os};
  serialize(ds, w);
  const uint64_t crc = w.crc.value();
  os.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
  if (!os) throw IoError("write failed: " + path);
  os.close();

  nlohmann::json manifest;
  manifest["kind"] = kind_name(ds.kind);
  manifest["channel"] = sig::channel_name(ds.channel);
  manifest["count"] = ds.examples.size();
  manifest["bands"] = ds.bands;
  manifest["len"] = ds.len;
  manifest["channels"] = ds.channels;
  char crc_hex[17];
  std::snprintf(crc_hex, sizeof(crc_hex), "%016llx",
                static_cast<unsigned long long>(crc));
  manifest["crc64"] = crc_hex;
  manifest["key_counts"] = ds.key_histogram();
  manifest["config"] = ds.config_text;
  std::ofstream ms(path + ".manifest.json");
  if (!ms) throw IoError("cannot open for write: " + path + ".manifest.json");
  ms << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  CheckedReader r{is};
  char magic[4];
  r.read(magic, 4);
  if (std::memcmp(magic, "SNSD", 4) != 0) throw IoError("bad dataset magic");
  if (r.take<uint16_t>() != 1) throw IoError("unsupported dataset version");

  Dataset ds;
  ds.kind = static_cast<DatasetKind>(r.take<uint8_t>());
  const uint32_t count = r.take<uint32_t>();
  ds.bands = r.take<uint16_t>();
  ds.len = r.take<uint16_t>();
  ds.channels = r.take<uint16_t>();
  ds.examples.resize(count);
  for (auto& ex : ds.examples) {
    ex.input = nn::Tensor<float>({ds.bands, ds.len, ds.channels});
    r.read(ex.input.data.data(), ex.input.data.size() * sizeof(float));
    ex.s.resize(ds.bands);
    r.read(ex.s.data(), ex.s.size());
    ex.k.resize(ds.bands);
    r.read(ex.k.data(), ex.k.size());
    ex.snr_db = r.take<float>();
    ex.seed = r.take<uint64_t>();
  }
  const uint64_t expected = r.crc.value();
  uint64_t stored = 0;
  is.read(reinterpret_cast<char*>(&stored), sizeof(stored));
  if (!is) throw IoError("dataset file truncated (missing checksum)");
  if (stored != expected)
    throw IoError("dataset checksum mismatch (corrupted payload)");
  is.peek();
  if (!is.eof()) throw IoError("dataset has trailing bytes");

  std::ifstream ms(path + ".manifest.json");
  if (!ms) throw IoError("missing manifest: " + path + ".manifest.json");
  nlohmann::json manifest;
  try {
    ms >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad manifest: ") + e.what());
  }
  ds.channel = [&] {
    const std::string name = manifest.at("channel");
    for (auto k : {sig::ChannelKind::awgn, sig::ChannelKind::rayleigh,
                   sig::ChannelKind::rician})
      if (name == sig::channel_name(k)) return k;
    throw IoError("manifest: unknown channel " + name);
  }();
  ds.config_text = manifest.value("config", "");
  char crc_hex[17];
  std::snprintf(crc_hex, sizeof(crc_hex), "%016llx",
                static_cast<unsigned long long>(stored));
  if (manifest.at("crc64") != std::string(crc_hex))
    throw IoError("manifest checksum disagrees with payload");
  if (manifest.at("count") != ds.examples.size())
    throw IoError("manifest count disagrees with payload");
  const auto recounted = ds.key_histogram();
  const auto declared =
      manifest.at("key_counts").get<std::map<std::string, int>>();
  if (declared != recounted)
    throw IoError("manifest key counts disagree with recomputed histogram");
  return ds;
}

}  // namespace subspect::data
