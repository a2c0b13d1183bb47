#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "avac/features.hpp"

namespace avac {

// All monomials of total degree <= degree in `dimension` variables, in graded
// lexicographic order: ascending total degree, ties broken lexicographically
// with the first variable most significant (descending exponent first).
class MonomialBasis {
 public:
  MonomialBasis(int dimension, int degree);

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  size_t size() const { return count_; }
  std::span<const uint8_t> exponents(size_t term) const {
    return {exps_.data() + term * static_cast<size_t>(dimension_),
            static_cast<size_t>(dimension_)};
  }
  // Index of the monomial with the given exponents; throws if absent.
  size_t index_of(std::span<const int> exponents) const;

  // Process-wide cache; basis objects are immutable.
  static const MonomialBasis& shared(int dimension, int degree);

  static size_t expected_size(int dimension, int degree);  // C(n+d, d)

 private:
  int dimension_;
  int degree_;
  size_t count_;
  std::vector<uint8_t> exps_;
  std::map<std::vector<uint8_t>, size_t> index_;
};

// Polynomial surrogate over the 10-dimensional feature vector.
struct PolyModel {
  std::string target;  // "PG" or "EG"
  int degree = 5;      // 3 or 5
  int dimension = 10;
  std::vector<double> coefficients;  // basis order
  FeatureNormalizers normalizers;

  void validate() const;  // throws on malformed models
  double predict(const FeatureVector& fv) const;
  // Analytic partials with respect to the normalized W and B components.
  std::array<double, 2> grad_wb(const FeatureVector& fv) const;
};

struct Dataset {
  std::vector<FeatureVector> fv;
  std::vector<double> pg;
  std::vector<double> eg;

  size_t size() const { return fv.size(); }
  void validate() const;
};

struct FitReport {
  double rmse_pg = 0.0;
  double rmse_eg = 0.0;
};

// Least squares with ridge penalty lambda*||coeffs||^2, solved by normal
// equations and a pivoted Cholesky factorization shared by both targets.
// A singular system with ridge == 0 throws advising ridge > 0.
std::pair<PolyModel, PolyModel> fit_models(const Dataset& data, int degree,
                                           double ridge,
                                           const FeatureNormalizers& norms,
                                           FitReport* report = nullptr);

// Batch evaluation; parallel variant is bit-identical to the serial one.
void predict_batch_serial(const PolyModel& model,
                          std::span<const FeatureVector> points,
                          std::span<double> out);
void predict_batch(const PolyModel& model, std::span<const FeatureVector> points,
                   std::span<double> out);

// Model file round-trip (JSON; decimal-exact coefficient round-trip).
void save_model(const PolyModel& model, const std::string& path);
PolyModel load_model(const std::string& path);

}  // namespace avac
