#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gaitmask/errors.hpp"
#include "gaitmask/features.hpp"
#include "gaitmask/io.hpp"
#include "gaitmask/pca.hpp"
#include "gaitmask/scaler.hpp"
#include "gaitmask/svm.hpp"

namespace gaitmask {

// Fitted recognition stack bound to one feature encoding.
struct TrainedPipeline {
  Encoding encoding = Encoding::flatten;
  ScalerModel scaler;
  PCAModel pca;
  SVMModel svm;
  std::vector<std::string> class_names;  // class index -> label

  std::vector<int> predict(const Eigen::MatrixXd& raw_features) const {
    return svm.predict(pca.transform(scaler.apply(raw_features)));
  }
};

namespace detail {

inline json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  return v;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  return m;
}

}  // namespace detail

inline constexpr int kModelFormatVersion = 1;

inline json trained_pipeline_to_json(const TrainedPipeline& tp) {
  json j;
  j["format"] = "gaitmask-trained-pipeline";
  j["version"] = kModelFormatVersion;
  j["encoding"] = encoding_name(tp.encoding);
  j["classes"] = tp.class_names;
  j["scaler"]["mean"] = detail::vector_to_json(tp.scaler.mean);
  j["scaler"]["stddev"] = detail::vector_to_json(tp.scaler.stddev);
  j["pca"]["mean"] = detail::vector_to_json(tp.pca.mean);
  j["pca"]["components"] = detail::matrix_to_json(tp.pca.components);
  j["pca"]["explained_variance"] = detail::vector_to_json(tp.pca.explained_variance);
  j["pca"]["total_variance"] = tp.pca.total_variance;
  j["pca"]["k"] = tp.pca.k;
  json machines = json::array();
  for (const auto& m : tp.svm.machines) {
    json jm;
    jm["positive_class"] = m.positive_class;
    jm["negative_class"] = m.negative_class;
    jm["bias"] = m.bias;
    jm["support_vectors"] = detail::matrix_to_json(m.support_vectors);
    jm["coeff"] = detail::vector_to_json(m.sv_coeff);
    machines.push_back(std::move(jm));
  }
  j["svm"]["C"] = tp.svm.C;
  j["svm"]["gamma"] = tp.svm.gamma;
  j["svm"]["classes"] = tp.svm.classes;
  j["svm"]["machines"] = std::move(machines);
  return j;
}

inline TrainedPipeline trained_pipeline_from_json(const json& j) {
  if (j.value("format", "") != "gaitmask-trained-pipeline")
    raise(Errc::io_error, "not a gaitmask model container");
  if (j.value("version", 0) != kModelFormatVersion)
    raise(Errc::io_error, "unsupported model container version");
  TrainedPipeline tp;
  tp.encoding = encoding_from_name(j.at("encoding").get<std::string>());
  tp.class_names = j.at("classes").get<std::vector<std::string>>();
  tp.scaler.mean = detail::vector_from_json(j.at("scaler").at("mean"));
  tp.scaler.stddev = detail::vector_from_json(j.at("scaler").at("stddev"));
  tp.pca.mean = detail::vector_from_json(j.at("pca").at("mean"));
  tp.pca.components = detail::matrix_from_json(j.at("pca").at("components"));
  tp.pca.explained_variance = detail::vector_from_json(j.at("pca").at("explained_variance"));
  tp.pca.total_variance = j.at("pca").at("total_variance").get<double>();
  tp.pca.k = j.at("pca").at("k").get<int>();
  tp.svm.C = j.at("svm").at("C").get<double>();
  tp.svm.gamma = j.at("svm").at("gamma").get<double>();
  tp.svm.classes = j.at("svm").at("classes").get<std::vector<int>>();
  for (const auto& jm : j.at("svm").at("machines")) {
    BinarySvm m;
    m.positive_class = jm.at("positive_class").get<int>();
    m.negative_class = jm.at("negative_class").get<int>();
    m.bias = jm.at("bias").get<double>();
    m.support_vectors = detail::matrix_from_json(jm.at("support_vectors"));
    m.sv_coeff = detail::vector_from_json(jm.at("coeff"));
    m.gamma = tp.svm.gamma;
    m.C = tp.svm.C;
    tp.svm.machines.push_back(std::move(m));
  }
  return tp;
}

inline void save_trained_pipeline(const fs::path& path, const TrainedPipeline& tp) {
  write_text_file(path, trained_pipeline_to_json(tp).dump() + "\n");
}

inline TrainedPipeline load_trained_pipeline(const fs::path& path) {
  return trained_pipeline_from_json(json::parse(read_text_file(path)));
}

}  // namespace gaitmask
