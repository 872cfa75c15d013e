#include "vflsim/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vflsim {

AccuracyTriple reconstruction_accuracy(const Matrix& recon, const Matrix& truth,
                                       const Schema& schema, const MetricConfig& cfg) {
  if (recon.rows() != truth.rows() || recon.cols() != truth.cols())
    throw std::invalid_argument("reconstruction_accuracy: shape mismatch");
  if (recon.cols() != schema.encoded_width())
    throw std::invalid_argument("reconstruction_accuracy: width does not match schema");
  if (recon.rows() == 0) throw std::invalid_argument("reconstruction_accuracy: empty batch");

  long disc_hits = 0, disc_cells = 0, cont_hits = 0, cont_cells = 0;
  Index off = 0;
  for (const Column& col : schema.columns) {
    if (col.kind == ColumnKind::Categorical) {
      Index k = col.encoded_size();
      for (Index r = 0; r < recon.rows(); ++r) {
        Index ra = 0, ta = 0;
        for (Index j = 1; j < k; ++j) {
          if (recon(r, off + j) > recon(r, off + ra)) ra = j;
          if (truth(r, off + j) > truth(r, off + ta)) ta = j;
        }
        disc_hits += (ra == ta);
      }
      disc_cells += recon.rows();
      off += k;
    } else {
      for (Index r = 0; r < recon.rows(); ++r) {
        double v = std::clamp(recon(r, off), -1.0, 1.0);
        cont_hits += (std::abs(v - truth(r, off)) <= cfg.epsilon);
      }
      cont_cells += recon.rows();
      off += 1;
    }
  }

  AccuracyTriple out;
  double nan = std::numeric_limits<double>::quiet_NaN();
  out.discrete = disc_cells ? 100.0 * static_cast<double>(disc_hits) / disc_cells : nan;
  out.continuous = cont_cells ? 100.0 * static_cast<double>(cont_hits) / cont_cells : nan;
  out.overall =
      100.0 * static_cast<double>(disc_hits + cont_hits) / static_cast<double>(disc_cells + cont_cells);
  return out;
}

double psnr(const Matrix& recon, const Matrix& truth, double data_range) {
  if (recon.rows() != truth.rows() || recon.cols() != truth.cols())
    throw std::invalid_argument("psnr: shape mismatch");
  if (recon.size() == 0) throw std::invalid_argument("psnr: empty input");
  double mse = (recon - truth).squaredNorm() / static_cast<double>(recon.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(data_range * data_range / mse);
}

namespace {

double ssim_window(const Matrix& a, const Matrix& b, double c1, double c2) {
  double n = static_cast<double>(a.size());
  double mu_a = a.mean();
  double mu_b = b.mean();
  double var_a = (a.array() - mu_a).square().sum() / n;
  double var_b = (b.array() - mu_b).square().sum() / n;
  double cov = ((a.array() - mu_a) * (b.array() - mu_b)).sum() / n;
  return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

}  // namespace

double ssim_image(const Matrix& a, const Matrix& b, double data_range) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("ssim: shape mismatch");
  if (a.size() == 0) throw std::invalid_argument("ssim: empty image");
  double c1 = (0.01 * data_range) * (0.01 * data_range);
  double c2 = (0.03 * data_range) * (0.03 * data_range);
  if (a.rows() < 16 || a.cols() < 16) return ssim_window(a, b, c1, c2);
  const Index w = 8;
  double sum = 0.0;
  long count = 0;
  for (Index i = 0; i + w <= a.rows(); ++i) {
    for (Index j = 0; j + w <= a.cols(); ++j) {
      sum += ssim_window(a.block(i, j, w, w), b.block(i, j, w, w), c1, c2);
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

double mean_ssim(const Matrix& recon_rows, const Matrix& truth_rows, Index height,
                 Index width, double data_range) {
  if (recon_rows.rows() != truth_rows.rows() || recon_rows.cols() != truth_rows.cols())
    throw std::invalid_argument("mean_ssim: shape mismatch");
  if (recon_rows.cols() != height * width)
    throw std::invalid_argument("mean_ssim: rows are not height*width long");
  double sum = 0.0;
  for (Index r = 0; r < recon_rows.rows(); ++r) {
    Matrix a = recon_rows.row(r).reshaped<Eigen::RowMajor>(height, width);
    Matrix b = truth_rows.row(r).reshaped<Eigen::RowMajor>(height, width);
    sum += ssim_image(a, b, data_range);
  }
  return sum / static_cast<double>(recon_rows.rows());
}

double roc_auc(const std::vector<int>& labels, const Vector& scores) {
  if (static_cast<Index>(labels.size()) != scores.size())
    throw std::invalid_argument("roc_auc: label/score size mismatch");
  std::size_t n = labels.size();
  if (n == 0) throw std::invalid_argument("roc_auc: empty input");
  long pos = std::count(labels.begin(), labels.end(), 1);
  long neg = static_cast<long>(n) - pos;
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("roc_auc: needs both classes present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return scores(static_cast<Index>(i)) < scores(static_cast<Index>(j));
  });

  // midranks over tied score groups
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores(static_cast<Index>(order[j + 1])) ==
                            scores(static_cast<Index>(order[i])))
      ++j;
    double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  double p = static_cast<double>(pos);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double classification_accuracy(const std::vector<int>& labels, const Matrix& probabilities) {
  if (static_cast<Index>(labels.size()) != probabilities.rows())
    throw std::invalid_argument("classification_accuracy: size mismatch");
  if (labels.empty()) throw std::invalid_argument("classification_accuracy: empty input");
  long hits = 0;
  for (Index r = 0; r < probabilities.rows(); ++r) {
    int pred;
    if (probabilities.cols() == 1) {
      pred = probabilities(r, 0) >= 0.5 ? 1 : 0;
    } else {
      Index best;
      probabilities.row(r).maxCoeff(&best);
      pred = static_cast<int>(best);
    }
    hits += (pred == labels[static_cast<std::size_t>(r)]);
  }
  return static_cast<double>(hits) / static_cast<double>(probabilities.rows());
}

}  // namespace vflsim
