#include "esnmor/model_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace esnmor {

namespace {

using nlohmann::json;

template <typename Mat>
json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

template <typename Mat>
Mat matrix_from_json(const json& j) {
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows > 0 ? static_cast<Index>(j.at(0).size()) : 0;
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (static_cast<Index>(row.size()) != cols)
      throw std::runtime_error("model file: ragged matrix");
    for (Index jj = 0; jj < cols; ++jj) m(i, jj) = row.at(jj).get<double>();
  }
  return m;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

json hyper_to_json(const HyperParams& hp) {
  return json{{"reservoir_size", hp.reservoir_size},
              {"leak_rate", hp.leak_rate},
              {"spectral_radius", hp.spectral_radius},
              {"input_scaling", hp.input_scaling},
              {"bias_scaling", hp.bias_scaling},
              {"n_inputs", hp.n_inputs},
              {"n_outputs", hp.n_outputs},
              {"seed", hp.seed}};
}

HyperParams hyper_from_json(const json& j) {
  HyperParams hp;
  hp.reservoir_size = j.at("reservoir_size").get<Index>();
  hp.leak_rate = j.at("leak_rate").get<double>();
  hp.spectral_radius = j.at("spectral_radius").get<double>();
  hp.input_scaling = j.at("input_scaling").get<double>();
  hp.bias_scaling = j.at("bias_scaling").get<double>();
  hp.n_inputs = j.at("n_inputs").get<Index>();
  hp.n_outputs = j.at("n_outputs").get<Index>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return json::parse(in);
}

json pod_to_json(const PodEsn& pe) {
  return json{{"format_version", kModelFormatVersion},
              {"kind", "pod_esn"},
              {"gamma", pe.gamma},
              {"m", pe.size()},
              {"energy_kept", pe.energy_kept},
              {"T", matrix_to_json(pe.t)},
              {"sigma", vector_to_json(pe.sigma)},
              {"w_rr_t", matrix_to_json(pe.w_rr_t)},
              {"w_ir", matrix_to_json(pe.w_ir)},
              {"w_br", vector_to_json(pe.w_br)},
              {"w_ro_t", matrix_to_json(pe.w_ro_t)}};
}

PodEsn pod_from_json(const json& j) {
  PodEsn pe;
  pe.gamma = j.at("gamma").get<double>();
  pe.energy_kept = j.at("energy_kept").get<double>();
  pe.t = matrix_from_json<RowMatrix>(j.at("T"));
  pe.tt = pe.t.transpose();
  pe.sigma = vector_from_json(j.at("sigma"));
  pe.w_rr_t = matrix_from_json<RowMatrix>(j.at("w_rr_t"));
  pe.w_ir = matrix_from_json<RowMatrix>(j.at("w_ir"));
  pe.w_br = vector_from_json(j.at("w_br"));
  pe.w_ro_t = matrix_from_json<RowMatrix>(j.at("w_ro_t"));
  if (j.at("m").get<Index>() != pe.size())
    throw std::runtime_error("model file: m does not match T");
  return pe;
}

void check_version_kind(const json& j, const std::string& kind,
                        const std::string& path) {
  if (j.at("format_version").get<int>() != kModelFormatVersion)
    throw std::runtime_error("unsupported model format version in " + path);
  if (j.at("kind").get<std::string>() != kind)
    throw std::runtime_error("expected kind '" + kind + "' in " + path);
}

}  // namespace

void save_model(const EchoStateNetwork& esn, const std::string& path) {
  json doc{{"format_version", kModelFormatVersion},
           {"kind", "esn"},
           {"hyper", hyper_to_json(esn.hyper)},
           {"w_rr", matrix_to_json(esn.w_rr)},
           {"w_ir", matrix_to_json(esn.w_ir)},
           {"w_br", vector_to_json(esn.w_br)},
           {"w_ro", matrix_to_json(esn.w_ro)}};
  write_json_file(doc, path);
}

void save_model(const PodEsn& pe, const std::string& path) {
  write_json_file(pod_to_json(pe), path);
}

void save_model(const DeimEsn& de, const std::string& path) {
  json doc = pod_to_json(de.base);
  doc["kind"] = "deim_esn";
  doc["deim_cutoff"] = de.deim_cutoff;
  doc["m_d"] = de.points();
  doc["pivots"] = de.ops.pivots;
  doc["U"] = matrix_to_json(de.ops.u);
  doc["T2"] = matrix_to_json(de.ops.t2);
  write_json_file(doc, path);
}

EchoStateNetwork load_esn(const std::string& path) {
  const json j = read_json_file(path);
  check_version_kind(j, "esn", path);
  EchoStateNetwork esn;
  esn.hyper = hyper_from_json(j.at("hyper"));
  esn.w_rr = matrix_from_json<RowMatrix>(j.at("w_rr"));
  esn.w_ir = matrix_from_json<RowMatrix>(j.at("w_ir"));
  esn.w_br = vector_from_json(j.at("w_br"));
  esn.w_ro = matrix_from_json<RowMatrix>(j.at("w_ro"));
  return esn;
}

PodEsn load_pod_esn(const std::string& path) {
  const json j = read_json_file(path);
  check_version_kind(j, "pod_esn", path);
  return pod_from_json(j);
}

DeimEsn load_deim_esn(const std::string& path) {
  const json j = read_json_file(path);
  check_version_kind(j, "deim_esn", path);
  const PodEsn pe = pod_from_json(j);
  const Matrix u = matrix_from_json<Matrix>(j.at("U"));
  const auto pivots = j.at("pivots").get<std::vector<Index>>();
  DeimEsn de = deim_assemble(pe, deim_operators_from(u, pivots),
                             j.at("deim_cutoff").get<double>());
  // T2 is stored for diagnostics; cross-check it against the rebuilt value.
  const Matrix t2 = matrix_from_json<Matrix>(j.at("T2"));
  if ((t2 - de.ops.t2).cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("model file: stored T2 inconsistent with U/pivots");
  return de;
}

AnyModel load_model(const std::string& path) {
  const json j = read_json_file(path);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "esn") return load_esn(path);
  if (kind == "pod_esn") return load_pod_esn(path);
  if (kind == "deim_esn") return load_deim_esn(path);
  throw std::runtime_error("unknown model kind '" + kind + "' in " + path);
}

}  // namespace esnmor
