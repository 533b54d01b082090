#include "subspect/model.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "subspect/crc64.hpp"

namespace subspect::nn {

const char* arch_name(ArchId id) {
  switch (id) {
    case ArchId::dlwss: return "dlwss";
    case ArchId::ndlmc_baseline: return "ndlmc-baseline";
    case ArchId::ndlmc_inception: return "ndlmc-inception";
    case ArchId::wdlmc: return "wdlmc";
  }
  return "?";
}

ArchId arch_from_name(const std::string& name) {
  for (ArchId id : {ArchId::dlwss, ArchId::ndlmc_baseline,
                    ArchId::ndlmc_inception, ArchId::wdlmc})
    if (name == arch_name(id)) return id;
  throw ConfigError("unknown architecture: " + name);
}

ModelSpec ModelSpec::dlwss(int bands, int q) {
  ModelSpec s;
  s.id = ArchId::dlwss;
  s.bands = bands;
  s.in_len = q;
  s.classes = 1;
  return s;
}

ModelSpec ModelSpec::ndlmc_baseline(int bands, int l) {
  ModelSpec s;
  s.id = ArchId::ndlmc_baseline;
  s.bands = bands;
  s.in_len = l;
  return s;
}

ModelSpec ModelSpec::ndlmc_inception(int bands, int l) {
  ModelSpec s;
  s.id = ArchId::ndlmc_inception;
  s.bands = bands;
  s.in_len = l;
  return s;
}

ModelSpec ModelSpec::wdlmc(int bands, int q) {
  ModelSpec s;
  s.id = ArchId::wdlmc;
  s.bands = bands;
  s.in_len = q;
  return s;
}

ModelSpec ModelSpec::for_arch(ArchId id) {
  switch (id) {
    case ArchId::dlwss: return dlwss();
    case ArchId::ndlmc_baseline: return ndlmc_baseline();
    case ArchId::ndlmc_inception: return ndlmc_inception();
    case ArchId::wdlmc: return wdlmc();
  }
  throw ConfigError("bad arch id");
}

namespace {

template <typename T>
typename InceptionBlock<T>::Split to_split(
    const InceptionBlock<float>::Split& s) {
  typename InceptionBlock<T>::Split out;
  out.c1 = s.c1;
  out.r3 = s.r3;
  out.c3 = s.c3;
  out.r5 = s.r5;
  out.c5 = s.c5;
  out.cp = s.cp;
  return out;
}

}  // namespace

template <typename T>
Sequential<T> build_model(const ModelSpec& spec, uint64_t init_seed) {
  Sequential<T> m;
  m.spec = spec;
  auto& L = m.layers;
  switch (spec.id) {
    case ArchId::dlwss: {
      int ch = spec.in_ch;
      for (int i = 0; i < 3; i++) {
        L.push_back(std::make_unique<Conv1xW<T>>(spec.conv_widths[i], ch,
                                                 spec.conv_filters[i]));
        L.push_back(std::make_unique<Relu<T>>());
        ch = spec.conv_filters[i];
      }
      L.push_back(std::make_unique<CustomPool<T>>());
      L.push_back(std::make_unique<DenseLayer<T>>(ch, 1));
      L.push_back(std::make_unique<Sigmoid<T>>());
      break;
    }
    case ArchId::ndlmc_baseline: {
      L.push_back(std::make_unique<Conv1xW<T>>(spec.base_width, spec.in_ch,
                                               spec.base_filters, true));
      L.push_back(std::make_unique<Relu<T>>());
      L.push_back(std::make_unique<Conv1xW<T>>(spec.base_width, spec.base_filters,
                                               spec.base_filters, true));
      L.push_back(std::make_unique<Relu<T>>());
      L.push_back(std::make_unique<Conv1xW<T>>(1, spec.base_filters, spec.classes));
      L.push_back(std::make_unique<CustomPool<T>>());
      break;
    }
    case ArchId::ndlmc_inception: {
      const auto split = to_split<T>(spec.inception_split);
      const int width = split.total();
      L.push_back(std::make_unique<InceptionBlock<T>>(spec.in_ch, width, split));
      L.push_back(std::make_unique<InceptionBlock<T>>(width, width, split));
      L.push_back(std::make_unique<Conv1xW<T>>(1, width, spec.classes));
      L.push_back(std::make_unique<Relu<T>>());
      L.push_back(std::make_unique<CustomPool<T>>());
      break;
    }
    case ArchId::wdlmc: {
      int ch = spec.in_ch;
      for (int i = 0; i < 3; i++) {
        L.push_back(std::make_unique<Conv1xW<T>>(spec.conv_widths[i], ch,
                                                 spec.conv_filters[i]));
        L.push_back(std::make_unique<Relu<T>>());
        ch = spec.conv_filters[i];
      }
      L.push_back(std::make_unique<Conv1xW<T>>(1, ch, spec.classes));
      L.push_back(std::make_unique<Relu<T>>());
      L.push_back(std::make_unique<CustomPool<T>>());
      break;
    }
  }
  Rng rng(init_seed);
  for (auto& l : L) l->init_params(rng);
  return m;
}

template Sequential<float> build_model<float>(const ModelSpec&, uint64_t);
template Sequential<double> build_model<double>(const ModelSpec&, uint64_t);

namespace {

struct ChecksumWriter {
  std::ostream& os;
  Crc64 crc;
  template <typename T>
  void put(T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
    crc.update(&v, sizeof(T));
  }
  void bytes(const void* p, size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    crc.update(p, n);
  }
};

struct ChecksumReader {
  std::istream& is;
  Crc64 crc;
  template <typename T>
  T take() {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("checkpoint truncated");
    crc.update(&v, sizeof(T));
    return v;
  }
};

std::unique_ptr<Layer<float>> make_layer(LayerKind kind,
                                         const std::vector<int32_t>& h) {
  switch (kind) {
    case LayerKind::conv:
      return std::make_unique<Conv1xW<float>>(h.at(0), h.at(1), h.at(2),
                                              h.at(3) != 0);
    case LayerKind::relu: return std::make_unique<Relu<float>>();
    case LayerKind::sigmoid: return std::make_unique<Sigmoid<float>>();
    case LayerKind::softmax: return std::make_unique<Softmax<float>>();
    case LayerKind::custom_pool: return std::make_unique<CustomPool<float>>();
    case LayerKind::dense:
      return std::make_unique<DenseLayer<float>>(h.at(0), h.at(1));
    case LayerKind::inception: {
      InceptionBlock<float>::Split s;
      s.c1 = h.at(2); s.r3 = h.at(3); s.c3 = h.at(4);
      s.r5 = h.at(5); s.c5 = h.at(6); s.cp = h.at(7);
      return std::make_unique<InceptionBlock<float>>(h.at(0), h.at(1), s);
    }
  }
  throw IoError("checkpoint: unknown layer kind");
}

}  // namespace

void save_checkpoint(Sequential<float>& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  ChecksumWriter w{os};
  w.bytes("SNSM", 4);
  w.put<uint16_t>(1);
  w.put<uint8_t>(static_cast<uint8_t>(model.spec.id));
  w.put<uint16_t>(static_cast<uint16_t>(model.spec.bands));
  w.put<uint16_t>(static_cast<uint16_t>(model.spec.in_len));
  w.put<uint16_t>(static_cast<uint16_t>(model.spec.in_ch));
  w.put<uint16_t>(static_cast<uint16_t>(model.spec.classes));
  w.put<uint16_t>(static_cast<uint16_t>(model.layers.size()));
  for (auto& l : model.layers) {
    w.put<uint8_t>(static_cast<uint8_t>(l->kind()));
    std::vector<int32_t> h;
    l->hparams(h);
    w.put<uint8_t>(static_cast<uint8_t>(h.size()));
    for (int32_t v : h) w.put<int32_t>(v);
  }
  for (auto* p : model.params()) {
    for (float v : p->data) w.put<float>(v);
  }
  const uint64_t crc = w.crc.value();
  os.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
  if (!os) throw IoError("write failed: " + path);
}

Sequential<float> load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  ChecksumReader r{is};
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SNSM", 4) != 0)
    throw IoError("bad checkpoint magic");
  r.crc.update(magic, 4);
  if (r.take<uint16_t>() != 1) throw IoError("unsupported checkpoint version");

  Sequential<float> m;
  m.spec.id = static_cast<ArchId>(r.take<uint8_t>());
  m.spec.bands = r.take<uint16_t>();
  m.spec.in_len = r.take<uint16_t>();
  m.spec.in_ch = r.take<uint16_t>();
  m.spec.classes = r.take<uint16_t>();
  const int layer_count = r.take<uint16_t>();
  for (int i = 0; i < layer_count; i++) {
    const auto kind = static_cast<LayerKind>(r.take<uint8_t>());
    const int hcount = r.take<uint8_t>();
    std::vector<int32_t> h(hcount);
    for (auto& v : h) v = r.take<int32_t>();
    m.layers.push_back(make_layer(kind, h));
  }
  for (auto* p : m.params())
    for (auto& v : p->data) v = r.take<float>();
  const uint64_t expected = r.crc.value();
  uint64_t stored = 0;
  is.read(reinterpret_cast<char*>(&stored), sizeof(stored));
  if (!is) throw IoError("checkpoint truncated (missing checksum)");
  if (stored != expected)
    throw IoError("checkpoint checksum mismatch (corrupted file)");
  is.peek();
  if (!is.eof()) throw IoError("checkpoint has trailing bytes");
  return m;
}

}  // namespace subspect::nn
