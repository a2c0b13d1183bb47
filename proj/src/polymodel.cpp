#include "avac/polymodel.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include <json.hpp>

#include "avac/kernels.hpp"

namespace avac {

namespace {

void gen_exponents(int dim, int pos, int remaining, std::vector<uint8_t>& cur,
                   std::vector<uint8_t>& out) {
  if (pos == dim - 1) {
    cur[static_cast<size_t>(pos)] = static_cast<uint8_t>(remaining);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[static_cast<size_t>(pos)] = static_cast<uint8_t>(e);
    gen_exponents(dim, pos + 1, remaining - e, cur, out);
  }
}

}  // namespace

size_t MonomialBasis::expected_size(int dimension, int degree) {
  // C(dimension + degree, degree)
  size_t num = 1, den = 1;
  for (int i = 1; i <= degree; ++i) {
    num *= static_cast<size_t>(dimension + i);
    den *= static_cast<size_t>(i);
  }
  return num / den;
}

MonomialBasis::MonomialBasis(int dimension, int degree)
    : dimension_(dimension), degree_(degree) {
  if (dimension < 1 || degree < 0)
    throw std::invalid_argument("MonomialBasis: bad dimension/degree");
  std::vector<uint8_t> cur(static_cast<size_t>(dimension), 0);
  for (int total = 0; total <= degree; ++total)
    gen_exponents(dimension, 0, total, cur, exps_);
  count_ = exps_.size() / static_cast<size_t>(dimension);
  if (count_ != expected_size(dimension, degree))
    throw std::logic_error("MonomialBasis: term count mismatch");
  for (size_t t = 0; t < count_; ++t) {
    auto e = exponents(t);
    index_.emplace(std::vector<uint8_t>(e.begin(), e.end()), t);
  }
}

size_t MonomialBasis::index_of(std::span<const int> exponents) const {
  if (exponents.size() != static_cast<size_t>(dimension_))
    throw std::invalid_argument("index_of: dimension mismatch");
  std::vector<uint8_t> key(exponents.size());
  for (size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0 || exponents[i] > degree_)
      throw std::invalid_argument("index_of: exponent out of range");
    key[i] = static_cast<uint8_t>(exponents[i]);
  }
  auto it = index_.find(key);
  if (it == index_.end())
    throw std::invalid_argument("index_of: monomial not in basis");
  return it->second;
}

const MonomialBasis& MonomialBasis::shared(int dimension, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<MonomialBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dimension, degree);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<MonomialBasis>(dimension, degree))
             .first;
  return *it->second;
}

void PolyModel::validate() const {
  if (target != "PG" && target != "EG")
    throw std::invalid_argument("model: target must be PG or EG");
  if (degree != 3 && degree != 5)
    throw std::invalid_argument("model: degree must be 3 or 5");
  if (dimension != 10)
    throw std::invalid_argument("model: dimension must be 10");
  if (coefficients.size() != MonomialBasis::expected_size(dimension, degree))
    throw std::invalid_argument("model: coefficient count mismatch");
  for (double c : coefficients)
    if (!std::isfinite(c))
      throw std::invalid_argument("model: non-finite coefficient");
  if (!(normalizers.burst_scale > 0) || !(normalizers.rep_scale > 0) ||
      !(normalizers.cv_cap > 0))
    throw std::invalid_argument("model: normalizers must be positive");
}

namespace {

// Powers of each variable up to the basis degree.
struct PowerTable {
  double p[10][6];

  PowerTable(const FeatureVector& fv, int degree) {
    for (int v = 0; v < 10; ++v) {
      p[v][0] = 1.0;
      for (int e = 1; e <= degree; ++e)
        p[v][static_cast<size_t>(e)] = p[v][e - 1] * fv[static_cast<size_t>(v)];
    }
  }
};

double eval_with_table(const MonomialBasis& basis,
                       std::span<const double> coeffs, const PowerTable& pt) {
  double acc = 0.0;
  for (size_t t = 0; t < basis.size(); ++t) {
    double term = coeffs[t];
    auto e = basis.exponents(t);
    for (int v = 0; v < 10; ++v) {
      uint8_t ev = e[static_cast<size_t>(v)];
      if (ev) term *= pt.p[v][ev];
    }
    acc += term;
  }
  return acc;
}

}  // namespace

double PolyModel::predict(const FeatureVector& fv) const {
  const MonomialBasis& basis = MonomialBasis::shared(dimension, degree);
  PowerTable pt(fv, degree);
  return eval_with_table(basis, coefficients, pt);
}

std::array<double, 2> PolyModel::grad_wb(const FeatureVector& fv) const {
  const MonomialBasis& basis = MonomialBasis::shared(dimension, degree);
  PowerTable pt(fv, degree);
  std::array<double, 2> g{0.0, 0.0};
  for (size_t t = 0; t < basis.size(); ++t) {
    auto e = basis.exponents(t);
    for (int which = 0; which < 2; ++which) {
      size_t dv = which == 0 ? kFvWaitBuffer : kFvBatch;
      uint8_t ed = e[dv];
      if (!ed) continue;
      double term = coefficients[t] * ed;
      for (size_t v = 0; v < 10; ++v) {
        uint8_t ev = e[v];
        if (v == dv) ev = static_cast<uint8_t>(ev - 1);
        if (ev) term *= pt.p[v][ev];
      }
      g[static_cast<size_t>(which)] += term;
    }
  }
  return g;
}

void Dataset::validate() const {
  if (fv.size() != pg.size() || fv.size() != eg.size())
    throw std::invalid_argument("dataset: column sizes differ");
  for (const auto& v : fv)
    for (double x : v)
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("dataset: feature outside [0,1]");
  for (size_t i = 0; i < pg.size(); ++i)
    if (!std::isfinite(pg[i]) || !std::isfinite(eg[i]))
      throw std::invalid_argument("dataset: non-finite target");
}

namespace {

void fill_design_column_major(const MonomialBasis& basis,
                              std::span<const FeatureVector> points,
                              std::vector<double>& phi) {
  const size_t rows = points.size();
  const size_t cols = basis.size();
  phi.assign(rows * cols, 0.0);
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < rows; ++i) {
    PowerTable pt(points[i], basis.degree());
    for (size_t t = 0; t < cols; ++t) {
      double term = 1.0;
      auto e = basis.exponents(t);
      for (int v = 0; v < 10; ++v) {
        uint8_t ev = e[static_cast<size_t>(v)];
        if (ev) term *= pt.p[v][ev];
      }
      phi[t * rows + i] = term;
    }
  }
}

double rmse_of(const PolyModel& m, std::span<const FeatureVector> points,
               std::span<const double> y) {
  std::vector<double> pred(points.size());
  predict_batch(m, points, pred);
  double ss = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    double d = pred[i] - y[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(pred.size()));
}

}  // namespace

std::pair<PolyModel, PolyModel> fit_models(const Dataset& data, int degree,
                                           double ridge,
                                           const FeatureNormalizers& norms,
                                           FitReport* report) {
  data.validate();
  if (data.size() < 1) throw std::invalid_argument("fit: empty dataset");
  if (degree != 3 && degree != 5)
    throw std::invalid_argument("fit: degree must be 3 or 5");
  if (ridge < 0.0) throw std::invalid_argument("fit: ridge must be >= 0");

  const MonomialBasis& basis = MonomialBasis::shared(10, degree);
  const size_t rows = data.size();
  const size_t cols = basis.size();

  std::vector<double> phi;
  fill_design_column_major(basis, data.fv, phi);

  std::vector<double> gram(cols * cols);
  kernels::gram_matrix(phi.data(), rows, cols, ridge, gram.data());
  std::vector<double> rhs_pg(cols), rhs_eg(cols);
  kernels::design_rhs(phi.data(), rows, cols, data.pg.data(), rhs_pg.data());
  kernels::design_rhs(phi.data(), rows, cols, data.eg.data(), rhs_eg.data());

  kernels::PivotedCholesky f = kernels::pivoted_cholesky(std::move(gram), cols);
  if (f.rank < cols) {
    if (ridge == 0.0)
      throw std::runtime_error(
          "fit: normal equations are singular; refit with ridge > 0");
    throw std::runtime_error("fit: normal equations are numerically singular");
  }

  PolyModel pg_model, eg_model;
  pg_model.target = "PG";
  eg_model.target = "EG";
  pg_model.degree = eg_model.degree = degree;
  pg_model.dimension = eg_model.dimension = 10;
  pg_model.normalizers = eg_model.normalizers = norms;
  pg_model.coefficients = kernels::cholesky_solve(f, rhs_pg);
  eg_model.coefficients = kernels::cholesky_solve(f, rhs_eg);
  pg_model.validate();
  eg_model.validate();

  if (report) {
    report->rmse_pg = rmse_of(pg_model, data.fv, data.pg);
    report->rmse_eg = rmse_of(eg_model, data.fv, data.eg);
  }
  return {std::move(pg_model), std::move(eg_model)};
}

void predict_batch_serial(const PolyModel& model,
                          std::span<const FeatureVector> points,
                          std::span<double> out) {
  if (out.size() != points.size())
    throw std::invalid_argument("predict_batch: size mismatch");
  const MonomialBasis& basis = MonomialBasis::shared(model.dimension, model.degree);
  for (size_t i = 0; i < points.size(); ++i) {
    PowerTable pt(points[i], model.degree);
    out[i] = eval_with_table(basis, model.coefficients, pt);
  }
}

void predict_batch(const PolyModel& model, std::span<const FeatureVector> points,
                   std::span<double> out) {
  if (out.size() != points.size())
    throw std::invalid_argument("predict_batch: size mismatch");
  const MonomialBasis& basis = MonomialBasis::shared(model.dimension, model.degree);
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < points.size(); ++i) {
    PowerTable pt(points[i], model.degree);
    out[i] = eval_with_table(basis, model.coefficients, pt);
  }
}

void save_model(const PolyModel& model, const std::string& path) {
  model.validate();
  nlohmann::json j;
  j["target"] = model.target;
  j["degree"] = model.degree;
  j["dimension"] = model.dimension;
  j["monomial_order"] = "grlex";
  j["coefficients"] = model.coefficients;
  j["normalizers"] = {{"burst_scale", model.normalizers.burst_scale},
                      {"rep_scale", model.normalizers.rep_scale},
                      {"cv_cap", model.normalizers.cv_cap}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

PolyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("model file " + path + ": " + e.what());
  }
  PolyModel m;
  try {
    m.target = j.at("target").get<std::string>();
    m.degree = j.at("degree").get<int>();
    m.dimension = j.at("dimension").get<int>();
    if (j.at("monomial_order").get<std::string>() != "grlex")
      throw std::runtime_error("unsupported monomial order");
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    const auto& n = j.at("normalizers");
    m.normalizers.burst_scale = n.at("burst_scale").get<double>();
    m.normalizers.rep_scale = n.at("rep_scale").get<double>();
    m.normalizers.cv_cap = n.at("cv_cap").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("model file " + path + ": " + e.what());
  }
  m.validate();
  return m;
}

}  // namespace avac
