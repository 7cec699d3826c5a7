#include "shasta/metrics.hpp"

#include "shasta/linalg.hpp"
#include "shasta/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace shasta {

double subspace_error(const Matrix& u_hat, const Matrix& u) {
  if (u_hat.rows() != u.rows() || u_hat.cols() != u.cols()) {
    throw std::invalid_argument("subspace_error: shape mismatch");
  }
  constexpr double kTol = 1e-8;
  if (orthonormality_defect(u_hat) > kTol || orthonormality_defect(u) > kTol) {
    throw std::invalid_argument("subspace_error: inputs must have orthonormal columns");
  }
  const auto k = static_cast<double>(u.cols());
  const double overlap = (u_hat.transpose() * u).squaredNorm();
  return std::max(0.0, 2.0 * (k - overlap) / k);
}

double loglik_gap(const FactorMatrix& f, const NoiseVariances& v,
                  std::span<const ObservedSample> data, const FactorMatrix& f_star,
                  const NoiseVariances& v_star) {
  return dataset_log_likelihood(f, v, data) - dataset_log_likelihood(f_star, v_star, data);
}

Vector variance_error(const NoiseVariances& v_hat, const NoiseVariances& v_star) {
  if (v_hat.size() != v_star.size()) throw std::invalid_argument("variance_error: length mismatch");
  if (!(v_star.array() > 0.0).all()) throw std::invalid_argument("variance_error: v* must be positive");
  return ((v_hat - v_star).array().abs() / v_star.array()).matrix();
}

void MetricTrace::append(MetricRecord record) {
  if (!records_.empty() && record.t <= records_.back().t) {
    throw std::invalid_argument("metric trace sample indices must increase");
  }
  if (record.subspace_error && !(*record.subspace_error >= 0.0 && *record.subspace_error <= 2.0 + 1e-12)) {
    throw std::invalid_argument("subspace error outside [0, 2]");
  }
  if (record.v_estimates && record.v_estimates->size() != groups_) {
    throw std::invalid_argument("variance estimates have the wrong length");
  }
  records_.push_back(std::move(record));
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void MetricTrace::write_csv(std::ostream& out) const {
  out << "t,subspace_error,loglik_gap";
  for (int l = 1; l <= groups_; ++l) out << ",v_" << l;
  out << ",elapsed_s\n";
  for (const auto& r : records_) {
    out << r.t << ',';
    if (r.subspace_error) out << format_double(*r.subspace_error);
    out << ',';
    if (r.loglik_gap) out << format_double(*r.loglik_gap);
    for (int l = 0; l < groups_; ++l) {
      out << ',';
      if (r.v_estimates) out << format_double((*r.v_estimates)[l]);
    }
    out << ',' << format_double(r.elapsed_seconds) << '\n';
  }
}

void MetricTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace shasta
