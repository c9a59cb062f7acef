#include "sessionscreen/serialize.hpp"

#include "sessionscreen/error.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace sessionscreen {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
    throw ParseError(0, "matrix data length does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

ordered_json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from(const json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace

std::string pipeline_to_json(const FittedPipeline& p) {
  ordered_json j;
  j["format"] = "sessionscreen-model";
  j["version"] = kModelFormatVersion;
  j["experiment"] = std::string(to_string(p.experiment));
  if (p.vocabulary) {
    j["vocabulary"] = {{"orders", p.vocabulary->orders()}, {"grams", p.vocabulary->grams()}};
  }
  if (p.svd) {
    j["svd"] = {{"components", matrix_json(p.svd->components)},
                {"singular_values", vector_json(p.svd->singular_values)}};
  }
  if (p.standardizer) {
    j["standardizer"] = {{"means", vector_json(p.standardizer->means)}, {"stds", vector_json(p.standardizer->stds)}};
  }
  if (p.kpca) {
    const auto& k = *p.kpca;
    ordered_json kernel;
    kernel["type"] = k.kernel.type == Kernel::Type::rbf ? "rbf" : "linear";
    kernel["gamma"] = k.kernel.gamma;
    j["kpca"] = {{"kernel", kernel},
                 {"training_points", matrix_json(k.training_points)},
                 {"centered_eigenvectors", matrix_json(k.centered_eigenvectors)},
                 {"eigenvalues", vector_json(k.eigenvalues)},
                 {"kernel_column_means", vector_json(k.kernel_column_means)},
                 {"kernel_grand_mean", k.kernel_grand_mean}};
  }
  if (p.nb) {
    const auto& m = *p.nb;
    j["naive_bayes"] = {{"prior_positive", m.prior_positive},
                        {"prior_negative", m.prior_negative},
                        {"mean_positive", vector_json(m.mean_positive)},
                        {"mean_negative", vector_json(m.mean_negative)},
                        {"var_positive", vector_json(m.var_positive)},
                        {"var_negative", vector_json(m.var_negative)},
                        {"variance_floor", m.variance_floor}};
  }
  if (p.svm) {
    const auto& m = *p.svm;
    j["svm"] = {{"weights", vector_json(m.weights)},
                {"bias", m.bias},
                {"C", m.C},
                {"objective", m.objective},
                {"epochs", m.epochs}};
  }
  return j.dump() + "\n";
}

FittedPipeline pipeline_from_json(const std::string& json_text) {
  FittedPipeline p;
  try {
    const json j = json::parse(json_text);
    if (j.at("format").get<std::string>() != "sessionscreen-model") throw ParseError(0, "not a model bundle");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ParseError(0, "unsupported model bundle version " + j.at("version").dump());
    }
    p.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    if (j.contains("vocabulary")) {
      const auto& v = j.at("vocabulary");
      p.vocabulary = Vocabulary(v.at("grams").get<std::vector<Gram>>(), v.at("orders").get<std::set<int>>());
    }
    if (j.contains("svd")) {
      SvdModel s;
      s.components = matrix_from(j.at("svd").at("components"));
      s.singular_values = vector_from(j.at("svd").at("singular_values"));
      p.svd = std::move(s);
    }
    if (j.contains("standardizer")) {
      Standardizer s;
      s.means = vector_from(j.at("standardizer").at("means"));
      s.stds = vector_from(j.at("standardizer").at("stds"));
      p.standardizer = std::move(s);
    }
    if (j.contains("kpca")) {
      const auto& kj = j.at("kpca");
      KpcaModel k;
      const auto type = kj.at("kernel").at("type").get<std::string>();
      k.kernel = type == "rbf" ? Kernel::rbf(kj.at("kernel").at("gamma").get<double>()) : Kernel::linear();
      k.training_points = matrix_from(kj.at("training_points"));
      k.centered_eigenvectors = matrix_from(kj.at("centered_eigenvectors"));
      k.eigenvalues = vector_from(kj.at("eigenvalues"));
      k.kernel_column_means = vector_from(kj.at("kernel_column_means"));
      k.kernel_grand_mean = kj.at("kernel_grand_mean").get<double>();
      p.kpca = std::move(k);
    }
    if (j.contains("naive_bayes")) {
      const auto& nj = j.at("naive_bayes");
      NbModel m;
      m.prior_positive = nj.at("prior_positive").get<double>();
      m.prior_negative = nj.at("prior_negative").get<double>();
      m.mean_positive = vector_from(nj.at("mean_positive"));
      m.mean_negative = vector_from(nj.at("mean_negative"));
      m.var_positive = vector_from(nj.at("var_positive"));
      m.var_negative = vector_from(nj.at("var_negative"));
      m.variance_floor = nj.at("variance_floor").get<double>();
      p.nb = std::move(m);
    }
    if (j.contains("svm")) {
      const auto& sj = j.at("svm");
      SvmModel m;
      m.weights = vector_from(sj.at("weights"));
      m.bias = sj.at("bias").get<double>();
      m.C = sj.at("C").get<double>();
      m.objective = sj.at("objective").get<double>();
      m.epochs = sj.at("epochs").get<int>();
      p.svm = std::move(m);
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("model bundle: ") + e.what());
  }
  return p;
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace sessionscreen
