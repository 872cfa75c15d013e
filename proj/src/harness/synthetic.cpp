#include "vflsim/harness/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vflsim/rng.hpp"

namespace vflsim {

namespace {

// How a continuous column fills its encoded range.
enum class ContFlavor {
  UniformWide,  // near-uniform across most of [-1, 1]
  GaussTight,   // centered bell, most mass well inside the range
  Bimodal,      // two tight clusters away from zero, one far likelier
};

struct Profile {
  std::vector<Index> cat_cards;
  // Category probabilities decay geometrically by this ratio, mirroring the
  // skewed marginals of real tabular benchmarks (one dominant level per
  // column).  1.0 would mean equal-probability bins.
  double cat_skew = 0.2;
  std::vector<ContFlavor> cont_flavors;
  double cont_scale = 0.2;     // GaussTight std / Bimodal cluster half-width
  double bimodal_shift = 1.0;  // cluster-sign threshold; P(main) = Phi(shift)
  int latent_rank = 6;
  double cat_noise = 0.3;    // jitter on the latent projection before binning
  double cont_noise = 0.3;   // same, for continuous columns
  double label_scale = 2.0;  // logit magnitude
  double label_noise = 0.8;  // logistic noise temperature
  double label_bias = 0.0;   // shifts prevalence
};

Profile profile_for(const std::string& name) {
  Profile p;
  if (name == "bank-like") {
    p.cat_cards = {3, 4, 2, 5, 3, 4, 2, 6, 3, 4};
    p.cat_skew = 0.10;
    p.cont_flavors.assign(10, ContFlavor::GaussTight);
    p.cont_scale = 0.115;
    p.latent_rank = 6;
    p.cat_noise = 0.32;
    p.cont_noise = 0.35;
    p.label_scale = 2.4;
    p.label_noise = 0.6;
    p.label_bias = -1.9;  // skewed positives, like a campaign-outcome column
  } else if (name == "income-like") {
    p.cat_cards = {5, 4, 3, 4, 2, 3, 5, 4};
    p.cat_skew = 0.19;
    p.cont_flavors.assign(6, ContFlavor::GaussTight);
    p.cont_scale = 0.165;
    p.latent_rank = 5;
    p.cat_noise = 0.22;
    p.cont_noise = 0.25;
    p.label_scale = 3.0;
    p.label_noise = 0.45;
    p.label_bias = -0.6;
  } else if (name == "credit-like") {
    p.cat_cards = {4, 3, 5, 3, 4, 2, 4, 3, 5};
    p.cat_skew = 0.07;
    p.cont_flavors.assign(14, ContFlavor::Bimodal);
    p.cont_scale = 0.08;
    p.bimodal_shift = 1.405;
    p.latent_rank = 6;
    p.cat_noise = 0.27;
    p.cont_noise = 0.3;
    p.label_scale = 1.7;
    p.label_noise = 1.0;
    p.label_bias = -1.0;
  } else {
    throw ConfigError("unknown synthetic dataset '" + name +
                      "' (expected bank-like, income-like or credit-like)");
  }
  return p;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Acklam's rational approximation of the standard normal quantile,
// |relative error| < 1.2e-9 — plenty for bin boundaries.
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Bin boundaries in latent space so bin j gets probability ~ skew^j.
std::vector<double> skewed_cuts(Index cards, double skew) {
  std::vector<double> probs(static_cast<std::size_t>(cards));
  double total = 0.0;
  for (Index j = 0; j < cards; ++j) {
    probs[static_cast<std::size_t>(j)] = std::pow(skew, static_cast<double>(j));
    total += probs[static_cast<std::size_t>(j)];
  }
  std::vector<double> cuts;
  double cum = 0.0;
  for (Index j = 0; j + 1 < cards; ++j) {
    cum += probs[static_cast<std::size_t>(j)] / total;
    cuts.push_back(normal_quantile(cum));
  }
  return cuts;
}

}  // namespace

bool is_synthetic_tabular_name(const std::string& name) {
  return name == "bank-like" || name == "income-like" || name == "credit-like";
}

EncodedDataset make_synthetic_tabular(const std::string& name, Index rows,
                                      std::uint64_t seed) {
  if (rows <= 0) throw ConfigError("synthetic dataset needs a positive row count");
  Profile p = profile_for(name);
  Index n_cat = static_cast<Index>(p.cat_cards.size());
  Index n_cont = static_cast<Index>(p.cont_flavors.size());
  Index n_cols = n_cat + n_cont;
  int r = p.latent_rank;

  Schema schema;
  schema.name = name;
  schema.delimiter = ',';
  schema.has_header = true;
  for (Index c = 0; c < n_cat; ++c) {
    Column col;
    col.name = "d" + std::to_string(c);
    col.kind = ColumnKind::Categorical;
    for (Index k = 0; k < p.cat_cards[static_cast<std::size_t>(c)]; ++k)
      col.categories.push_back("c" + std::to_string(k));
    schema.columns.push_back(std::move(col));
  }
  for (Index c = 0; c < n_cont; ++c) {
    Column col;
    col.name = "x" + std::to_string(c);
    col.kind = ColumnKind::Continuous;
    col.min = -1.0;
    col.max = 1.0;
    schema.columns.push_back(std::move(col));
  }
  schema.label = LabelSpec{"y", {"neg", "pos"}};
  schema.validate();

  std::vector<std::vector<double>> cuts(static_cast<std::size_t>(n_cat));
  for (Index c = 0; c < n_cat; ++c)
    cuts[static_cast<std::size_t>(c)] =
        skewed_cuts(p.cat_cards[static_cast<std::size_t>(c)], p.cat_skew);

  RngStream root(seed);
  RngStream structure = root.split("structure");
  // Fixed projection directions, one per column, plus the label readout.
  std::vector<std::vector<double>> w(static_cast<std::size_t>(n_cols));
  for (auto& wc : w) {
    wc.resize(static_cast<std::size_t>(r));
    double norm = 0.0;
    for (double& v : wc) {
      v = structure.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : wc) v /= norm;
  }
  std::vector<double> beta(static_cast<std::size_t>(r));
  {
    double norm = 0.0;
    for (double& v : beta) {
      v = structure.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : beta) v /= norm;
  }

  RawDataset raw;
  raw.schema = schema;
  raw.has_labels = true;
  raw.cells.resize(rows, n_cols);

  RngStream draws = root.split("rows");
  std::vector<double> z(static_cast<std::size_t>(r));
  for (Index i = 0; i < rows; ++i) {
    for (double& v : z) v = draws.normal();
    for (Index c = 0; c < n_cols; ++c) {
      double t = 0.0;
      const auto& wc = w[static_cast<std::size_t>(c)];
      for (int k = 0; k < r; ++k) t += wc[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
      if (c < n_cat) {
        t += p.cat_noise * draws.normal();
        t /= std::sqrt(1.0 + p.cat_noise * p.cat_noise);  // keep t ~ N(0,1)
        const auto& cc = cuts[static_cast<std::size_t>(c)];
        Index bin = 0;
        while (bin < static_cast<Index>(cc.size()) &&
               t >= cc[static_cast<std::size_t>(bin)])
          ++bin;
        // Rotate which level dominates so the modal category varies by column.
        raw.cells(i, c) = static_cast<double>(
            (bin + c) % p.cat_cards[static_cast<std::size_t>(c)]);
      } else {
        t += p.cont_noise * draws.normal();
        t /= std::sqrt(1.0 + p.cont_noise * p.cont_noise);
        double v = 0.0;
        switch (p.cont_flavors[static_cast<std::size_t>(c - n_cat)]) {
          case ContFlavor::UniformWide:
            v = (2.0 * normal_cdf(t) - 1.0) * 0.95;
            break;
          case ContFlavor::GaussTight:
            v = std::clamp(p.cont_scale * t, -0.999, 0.999);
            break;
          case ContFlavor::Bimodal: {
            double sign = t + p.bimodal_shift >= 0.0 ? 1.0 : -1.0;
            v = sign * (0.6 + p.cont_scale * (2.0 * draws.uniform() - 1.0));
            break;
          }
        }
        raw.cells(i, c) = v;
      }
    }
    double logit = 0.0;
    for (int k = 0; k < r; ++k) logit += beta[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
    logit = p.label_scale * logit + p.label_bias;
    // Logistic noise: flips get likelier the closer the logit sits to zero.
    double noise = p.label_noise * std::log(draws.uniform() / (1.0 - draws.uniform()));
    raw.labels.push_back(logit + noise > 0.0 ? 1 : 0);
    raw.row_ids.push_back(i);
  }
  return encode(raw);
}

EncodedDataset make_synthetic_image_dataset(Index side, Index n, std::uint64_t seed) {
  if (side < 8 || side > 32)
    throw ConfigError("image side must lie in [8, 32], got " + std::to_string(side));
  if (n <= 0) throw ConfigError("image dataset needs a positive row count");

  Schema schema;
  schema.name = "image-" + std::to_string(side);
  schema.delimiter = ',';
  schema.has_header = true;
  // Pixel-column-major flattening: feature index = c * side + r, so the first
  // half of the columns is the left half of the image.
  for (Index c = 0; c < side; ++c)
    for (Index r = 0; r < side; ++r) {
      Column col;
      col.name = "px_c" + std::to_string(c) + "_r" + std::to_string(r);
      col.kind = ColumnKind::Continuous;
      col.min = -1.0;
      col.max = 1.0;
      schema.columns.push_back(std::move(col));
    }
  schema.label = LabelSpec{"center", {"left", "right"}};
  schema.validate();

  RawDataset raw;
  raw.schema = schema;
  raw.has_labels = true;
  raw.cells.resize(n, side * side);

  RngStream rng = RngStream(seed).split("images");
  Index min_extent = std::max<Index>(2, side / 4);
  for (Index i = 0; i < n; ++i) {
    Index w = min_extent + static_cast<Index>(rng.below(
                  static_cast<std::uint64_t>(side - min_extent)));
    Index h = min_extent + static_cast<Index>(rng.below(
                  static_cast<std::uint64_t>(side - min_extent)));
    Index x0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(side - w + 1)));
    Index y0 = static_cast<Index>(rng.below(static_cast<std::uint64_t>(side - h + 1)));
    for (Index c = 0; c < side; ++c)
      for (Index r = 0; r < side; ++r) {
        bool inside = c >= x0 && c < x0 + w && r >= y0 && r < y0 + h;
        double v = (inside ? 0.55 : -0.85) + 0.12 * rng.normal();
        raw.cells(i, c * side + r) = std::clamp(v, -1.0, 1.0);
      }
    double center = static_cast<double>(x0) + static_cast<double>(w) / 2.0;
    raw.labels.push_back(center >= static_cast<double>(side) / 2.0 ? 1 : 0);
    raw.row_ids.push_back(i);
  }
  return encode(raw);
}

}  // namespace vflsim
