// Python bindings over the core operations: frame synthesis, multi-coset
// sampling, reconstruction, the layer engine, dataset generation and metrics.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "subspect/experiments.hpp"
#include "subspect/gradcheck.hpp"

namespace py = pybind11;
namespace ss = subspect;

namespace {

using CArray = py::array_t<std::complex<double>>;

Eigen::MatrixXcd to_matrix(const CArray& a) {
  const auto buf = a.request();
  if (buf.ndim != 2) throw ss::ShapeError("expected a 2-D complex array");
  Eigen::MatrixXcd m(buf.shape[0], buf.shape[1]);
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < buf.shape[0]; i++)
    for (py::ssize_t j = 0; j < buf.shape[1]; j++) m(i, j) = r(i, j);
  return m;
}

CArray from_matrix(const Eigen::MatrixXcd& m) {
  CArray out({static_cast<py::ssize_t>(m.rows()),
              static_cast<py::ssize_t>(m.cols())});
  auto w = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < m.rows(); i++)
    for (py::ssize_t j = 0; j < m.cols(); j++) w(i, j) = m(i, j);
  return out;
}

py::array_t<float> from_tensor(const ss::nn::Tensor<float>& t) {
  std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
  py::array_t<float> out(shape);
  std::copy(t.data.begin(), t.data.end(), out.mutable_data());
  return out;
}

ss::nn::Tensor<float> to_tensor(const py::array_t<float, py::array::c_style |
                                                             py::array::forcecast>& a) {
  const auto buf = a.request();
  std::vector<int> shape(buf.ndim);
  for (py::ssize_t i = 0; i < buf.ndim; i++)
    shape[i] = static_cast<int>(buf.shape[i]);
  ss::nn::Tensor<float> t(shape);
  std::copy(a.data(), a.data() + t.size(), t.data.begin());
  return t;
}

ss::sig::FrameCfg frame_cfg_from_kwargs(int n, int q, int p_max, double snr_db,
                                        const std::string& channel,
                                        double doppler, double rician_k,
                                        int num_paths, double rolloff, int sps,
                                        int span) {
  ss::sig::FrameCfg cfg;
  cfg.n_bands = n;
  cfg.q = q;
  cfg.p_max = p_max;
  cfg.snr_db = snr_db;
  for (auto k : {ss::sig::ChannelKind::awgn, ss::sig::ChannelKind::rayleigh,
                 ss::sig::ChannelKind::rician})
    if (channel == ss::sig::channel_name(k)) cfg.channel.kind = k;
  cfg.channel.normalized_doppler = doppler;
  cfg.channel.rician_k = rician_k;
  cfg.channel.num_paths = num_paths;
  cfg.rolloff = rolloff;
  cfg.sps = sps;
  cfg.span_symbols = span;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(subspect, m) {
  m.doc() = "Sub-Nyquist wideband spectrum characterization toolkit";

  py::register_exception<ss::ConfigError>(m, "SubspectConfigError");
  py::register_exception<ss::IoError>(m, "SubspectIoError");
  py::register_exception<ss::Error>(m, "SubspectError");

  // --- signal synthesis -----------------------------------------------------
  m.def(
      "rrc_taps",
      [](double rolloff, int sps, int span) {
        return ss::sig::rrc_taps(rolloff, sps, span);
      },
      py::arg("rolloff"), py::arg("sps"), py::arg("span"));

  m.def(
      "gen_symbols",
      [](int scheme, int count, uint64_t seed) {
        ss::Rng rng(seed);
        return ss::sig::gen_symbols(ss::sig::scheme_from_index(scheme), count,
                                    rng);
      },
      py::arg("scheme"), py::arg("count"), py::arg("seed"));

  m.def(
      "constellation",
      [](int scheme) {
        return ss::sig::constellation(ss::sig::scheme_from_index(scheme));
      },
      py::arg("scheme"));

  m.def(
      "assemble_frame",
      [](uint64_t seed, int n, int q, int p_max, double snr_db,
         const std::string& channel, double doppler, double rician_k,
         int num_paths, double rolloff, int sps, int span) {
        const auto cfg =
            frame_cfg_from_kwargs(n, q, p_max, snr_db, channel, doppler,
                                  rician_k, num_paths, rolloff, sps, span);
        const auto f = ss::sig::assemble_frame(cfg, seed);
        py::dict d;
        d["x"] = from_matrix(f.x);
        d["occupancy"] = f.occupancy;
        d["mods"] = f.mods;
        d["snr_db"] = f.snr_db;
        d["seed"] = f.seed;
        return d;
      },
      py::arg("seed"), py::arg("n") = 14, py::arg("q") = 299,
      py::arg("p_max") = 4, py::arg("snr_db") = 10.0,
      py::arg("channel") = "awgn", py::arg("doppler") = 1e-4,
      py::arg("rician_k") = 4.0, py::arg("num_paths") = 48,
      py::arg("rolloff") = 0.35, py::arg("sps") = 2, py::arg("span") = 40);

  // --- sensing --------------------------------------------------------------
  py::class_<ss::sns::SensingMatrix>(m, "SensingMatrix")
      .def_property_readonly(
          "a", [](const ss::sns::SensingMatrix& s) { return from_matrix(s.a); })
      .def_property_readonly(
          "pinv",
          [](const ss::sns::SensingMatrix& s) { return from_matrix(s.pinv); })
      .def_readonly("coset_offsets", &ss::sns::SensingMatrix::coset_offsets)
      .def("mutual_coherence", &ss::sns::SensingMatrix::mutual_coherence)
      .def_property_readonly("k", &ss::sns::SensingMatrix::k)
      .def_property_readonly("n", &ss::sns::SensingMatrix::n);

  m.def(
      "build_sensing_matrix",
      [](int k, int n, std::optional<std::vector<int>> offsets) {
        return ss::sns::build_sensing_matrix(k, n, std::move(offsets));
      },
      py::arg("k"), py::arg("n"), py::arg("offsets") = py::none());
  m.def("save_sensing_matrix", &ss::sns::save_sensing_matrix, py::arg("matrix"),
        py::arg("path"));
  m.def("load_sensing_matrix", &ss::sns::load_sensing_matrix, py::arg("path"));

  m.def(
      "sample",
      [](const CArray& x, const ss::sns::SensingMatrix& a) {
        ss::sig::WidebandFrame f;
        f.x = to_matrix(x);
        f.occupancy.assign(f.x.rows(), 0);
        f.mods.assign(f.x.rows(), 0);
        return from_matrix(ss::sns::sample(f, a).z);
      },
      py::arg("x"), py::arg("matrix"));

  // --- reconstruction -------------------------------------------------------
  m.def(
      "pseudo_reconstruct",
      [](const CArray& z, const ss::sns::SensingMatrix& a) {
        ss::sns::Measurement meas;
        meas.z = to_matrix(z);
        return from_matrix(ss::rec::pseudo_reconstruct(a, meas));
      },
      py::arg("z"), py::arg("matrix"));

  m.def(
      "support_reconstruct",
      [](const CArray& z, const ss::sns::SensingMatrix& a,
         const std::vector<int>& support) {
        ss::sns::Measurement meas;
        meas.z = to_matrix(z);
        ss::rec::Support s;
        s.indices = support;
        std::sort(s.indices.begin(), s.indices.end());
        return from_matrix(ss::rec::support_reconstruct(a, meas, s));
      },
      py::arg("z"), py::arg("matrix"), py::arg("support"));

  m.def(
      "somp",
      [](const CArray& z, const ss::sns::SensingMatrix& a, int sparsity) {
        ss::sns::Measurement meas;
        meas.z = to_matrix(z);
        const auto r = ss::rec::somp(a, meas, sparsity);
        return py::make_tuple(r.support.indices, r.residual_norms);
      },
      py::arg("z"), py::arg("matrix"), py::arg("sparsity"));

  m.def(
      "ddc",
      [](const std::vector<std::complex<double>>& row,
         const std::vector<double>& taps, int sps, int l) {
        return ss::rec::ddc(row, taps, sps, l);
      },
      py::arg("row"), py::arg("taps"), py::arg("sps"), py::arg("l"));

  // --- datasets ---------------------------------------------------------
  m.def(
      "normalize_minmax",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& x) {
        return from_tensor(ss::data::normalize_minmax(to_tensor(x)));
      },
      py::arg("x"));

  m.def(
      "normalize_ap",
      [](const CArray& symbols) {
        return from_tensor(ss::data::normalize_ap(to_matrix(symbols)));
      },
      py::arg("symbols"));

  m.def(
      "gen_dataset",
      [](const std::string& kind, int count, uint64_t seed,
         const std::string& channel, int n, int p_max, double rolloff, int sps,
         int span, int q, int l_symbols, int k) {
        ss::data::GenCfg gen;
        gen.frame = frame_cfg_from_kwargs(n, q, p_max, 10.0, channel, 1e-4, 4.0,
                                          48, rolloff, sps, span);
        gen.snr_grid = ss::data::GenCfg::default_snr_grid();
        gen.l_symbols = l_symbols;
        const auto a = ss::sns::build_sensing_matrix(k, n);
        const auto dk = ss::data::kind_from_name(kind);
        ss::data::Dataset ds;
        switch (dk) {
          case ss::data::DatasetKind::dwss:
            ds = ss::data::gen_dwss(gen, a, count, seed);
            break;
          case ss::data::DatasetKind::dnmc_iq:
          case ss::data::DatasetKind::dnmc_ap:
            ds = ss::data::gen_dnmc(gen, a, count, seed,
                                    dk == ss::data::DatasetKind::dnmc_ap,
                                    gen.frame.channel.kind);
            break;
          case ss::data::DatasetKind::dwmc:
            ds = ss::data::gen_dwmc(gen, a, count, seed,
                                    gen.frame.channel.kind);
            break;
        }
        py::list ex;
        for (const auto& e : ds.examples) {
          py::dict d;
          d["input"] = from_tensor(e.input);
          d["s"] = e.s;
          d["k"] = e.k;
          d["snr_db"] = e.snr_db;
          ex.append(d);
        }
        return ex;
      },
      py::arg("kind"), py::arg("count"), py::arg("seed"),
      py::arg("channel") = "awgn", py::arg("n") = 14, py::arg("p_max") = 4,
      py::arg("rolloff") = 0.35, py::arg("sps") = 2, py::arg("span") = 40,
      py::arg("q") = 299, py::arg("l_symbols") = 256, py::arg("k") = 7);

  // --- metrics & checks -------------------------------------------------
  m.def("sensing_accuracy", &ss::metrics::sensing_accuracy, py::arg("preds"),
        py::arg("labels"));
  m.def("classification_accuracy", &ss::metrics::classification_accuracy,
        py::arg("preds"), py::arg("labels"), py::arg("occupancy"));

  m.def(
      "run_gradient_checks",
      [](int instances, uint64_t seed) {
        const auto cases = ss::nn::run_gradient_checks(instances, seed);
        py::list out;
        for (const auto& c : cases) {
          py::dict d;
          d["name"] = c.name;
          d["instances"] = c.instances;
          d["max_rel_err"] = c.max_rel_err;
          d["pass"] = c.pass;
          out.append(d);
        }
        return out;
      },
      py::arg("instances") = 5, py::arg("seed") = 1);

  m.def("selftest", []() {
    std::ostringstream os;
    const int failures = ss::harness::run_selftest(os);
    return py::make_tuple(failures, os.str());
  });
}
