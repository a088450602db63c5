#include "newsamp/data.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace newsamp {

void SpikedModelSpec::validate() const {
  if (n < 1 || p < 1) throw InvalidInput("spiked model needs n >= 1, p >= 1");
  if (r_spikes < 0 || r_spikes >= p)
    throw InvalidInput("spiked model needs r_spikes < p");
  if (static_cast<Index>(spike_values.size()) != r_spikes)
    throw InvalidInput("spike list length must equal r_spikes");
  if (noise_floor <= 0.0) throw InvalidInput("noise floor must be positive");
  for (std::size_t j = 0; j < spike_values.size(); ++j) {
    if (spike_values[j] <= noise_floor)
      throw InvalidInput("spike values must exceed the noise floor");
    if (j > 0 && spike_values[j] >= spike_values[j - 1])
      throw InvalidInput("spike values must be strictly decreasing");
  }
}

SpikedModelSpec::LabelModel label_model_from_name(const std::string& name) {
  if (name == "logistic-planted")
    return SpikedModelSpec::LabelModel::logistic_planted;
  if (name == "linear-gaussian")
    return SpikedModelSpec::LabelModel::linear_gaussian;
  if (name == "sign-planted") return SpikedModelSpec::LabelModel::sign_planted;
  throw InvalidInput("unknown label model '" + name + "'");
}

std::string label_model_name(SpikedModelSpec::LabelModel model) {
  switch (model) {
    case SpikedModelSpec::LabelModel::logistic_planted:
      return "logistic-planted";
    case SpikedModelSpec::LabelModel::linear_gaussian:
      return "linear-gaussian";
    case SpikedModelSpec::LabelModel::sign_planted:
      return "sign-planted";
  }
  return "unknown";
}

Dataset generate_spiked(const SpikedModelSpec& spec) {
  spec.validate();
  const Index p = spec.p;
  const Index r = spec.r_spikes;

  // Seeded random orthonormal spike directions via thin QR.
  Matrix directions(p, r);
  if (r > 0) {
    Rng dir_rng = Rng::keyed(spec.seed, 1);
    Matrix g(p, r);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < r; ++j) g(i, j) = dir_rng.normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    directions = Matrix(qr.householderQ()).leftCols(r);
  }

  Rng theta_rng = Rng::keyed(spec.seed, 2);
  Vector theta_true(p);
  for (Index j = 0; j < p; ++j) theta_true[j] = theta_rng.normal();
  theta_true.normalize();

  // Row draw: x = Sigma^{1/2} z = sqrt(floor) z + V (sqrt(spike)-sqrt(floor)) V^T z.
  const double root_floor = std::sqrt(spec.noise_floor);
  Vector root_gap(r);
  for (Index j = 0; j < r; ++j)
    root_gap[j] = std::sqrt(spec.spike_values[j]) - root_floor;

  Rng row_rng = Rng::keyed(spec.seed, 3);
  Rng label_rng = Rng::keyed(spec.seed, 4);
  Dataset ds;
  ds.X.resize(static_cast<Index>(spec.n), p);
  ds.y.resize(static_cast<Index>(spec.n));
  Vector z(p);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (Index j = 0; j < p; ++j) z[j] = row_rng.normal();
    Vector x = root_floor * z;
    if (r > 0) {
      Vector coeffs = directions.transpose() * z;
      x += directions * root_gap.cwiseProduct(coeffs);
    }
    ds.X.row(static_cast<Index>(i)) = x;
    double signal = x.dot(theta_true);
    switch (spec.label_model) {
      case SpikedModelSpec::LabelModel::logistic_planted: {
        double prob = 1.0 / (1.0 + std::exp(-signal));
        ds.y[static_cast<Index>(i)] = label_rng.uniform() < prob ? 1.0 : 0.0;
        break;
      }
      case SpikedModelSpec::LabelModel::linear_gaussian:
        ds.y[static_cast<Index>(i)] = signal + label_rng.normal();
        break;
      case SpikedModelSpec::LabelModel::sign_planted:
        ds.y[static_cast<Index>(i)] = signal >= 0.0 ? 1.0 : -1.0;
        break;
    }
  }
  return ds;
}

namespace {

double parse_double(const std::string& token, std::size_t line_no) {
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || end != begin + token.size())
    throw ParseError("cannot parse number '" + token + "'", line_no);
  return v;
}

void apply_label_map(Vector& y, LabelMap map) {
  if (map == LabelMap::none) return;
  std::set<double> distinct(y.begin(), y.end());
  if (distinct.size() != 2) {
    if (map == LabelMap::automatic) return;
    throw InvalidInput("label mapping needs exactly two distinct values, saw " +
                       std::to_string(distinct.size()));
  }
  double lo = *distinct.begin();
  double hi = *distinct.rbegin();
  double lo_to = map == LabelMap::zero_one ? 0.0 : -1.0;
  double hi_to = 1.0;
  for (Index i = 0; i < y.size(); ++i)
    y[i] = y[i] == lo ? lo_to : hi_to;
  (void)hi;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(line);
  while (std::getline(in, token, sep)) out.push_back(token);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_csv(const std::string& path, Index label_column, LabelMap map) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tokens = split(line, ',');
    std::vector<double> row;
    row.reserve(tokens.size());
    for (const auto& tok : tokens) row.push_back(parse_double(tok, line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ShapeError("row " + std::to_string(line_no) + " has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ShapeError("'" + path + "' contains no data rows");
  const Index width = static_cast<Index>(rows.front().size());
  if (label_column < 0 || label_column >= width)
    throw InvalidInput("label column " + std::to_string(label_column) +
                       " outside [0, " + std::to_string(width - 1) + "]");
  if (width < 2)
    throw ShapeError("need at least one feature column besides the label");
  Dataset ds;
  ds.X.resize(static_cast<Index>(rows.size()), width - 1);
  ds.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Index col = 0;
    for (Index j = 0; j < width; ++j) {
      if (j == label_column) {
        ds.y[static_cast<Index>(i)] = rows[i][static_cast<std::size_t>(j)];
      } else {
        ds.X(static_cast<Index>(i), col++) =
            rows[i][static_cast<std::size_t>(j)];
      }
    }
  }
  apply_label_map(ds.y, map);
  ds.validate();
  return ds;
}

Dataset load_libsvm(const std::string& path, Index dim, LabelMap map) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  struct Row {
    double label;
    std::vector<std::pair<Index, double>> entries;
  };
  std::vector<Row> rows;
  Index max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;  // blank line
    Row row;
    row.label = parse_double(token, line_no);
    while (ls >> token) {
      auto colon = token.find(':');
      if (colon == std::string::npos)
        throw ParseError("expected idx:value, got '" + token + "'", line_no);
      double idx_raw = parse_double(token.substr(0, colon), line_no);
      Index idx = static_cast<Index>(idx_raw);
      if (idx < 1 || static_cast<double>(idx) != idx_raw)
        throw ParseError("feature index must be a positive integer, got '" +
                             token.substr(0, colon) + "'",
                         line_no);
      double value = parse_double(token.substr(colon + 1), line_no);
      row.entries.emplace_back(idx, value);
      max_index = std::max(max_index, idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ShapeError("'" + path + "' contains no data rows");
  Index width = dim > 0 ? dim : max_index;
  if (width < 1) throw ShapeError("no feature indices present");
  if (dim > 0 && max_index > dim)
    throw ShapeError("feature index " + std::to_string(max_index) +
                     " exceeds the declared dimension " + std::to_string(dim));
  Dataset ds;
  ds.X = Matrix::Zero(static_cast<Index>(rows.size()), width);
  ds.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.y[static_cast<Index>(i)] = rows[i].label;
    for (const auto& [idx, value] : rows[i].entries)
      ds.X(static_cast<Index>(i), idx - 1) = value;
  }
  apply_label_map(ds.y, map);
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (Index i = 0; i < ds.n(); ++i) {
    for (Index j = 0; j < ds.p(); ++j)
      out << format_double(ds.X(i, j)) << ',';
    out << format_double(ds.y[i]) << '\n';
  }
}

void save_libsvm(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (Index i = 0; i < ds.n(); ++i) {
    out << format_double(ds.y[i]);
    for (Index j = 0; j < ds.p(); ++j) {
      if (ds.X(i, j) != 0.0)
        out << ' ' << (j + 1) << ':' << format_double(ds.X(i, j));
    }
    out << '\n';
  }
}

Dataset standardize(const Dataset& ds) {
  ds.validate();
  Dataset out = ds;
  const double n = static_cast<double>(ds.n());
  for (Index j = 0; j < ds.p(); ++j) {
    KahanSum mean_acc;
    for (Index i = 0; i < ds.n(); ++i) mean_acc.add(ds.X(i, j));
    double mean = mean_acc.value() / n;
    KahanSum var_acc;
    for (Index i = 0; i < ds.n(); ++i) {
      double d = ds.X(i, j) - mean;
      var_acc.add(d * d);
    }
    double sd = std::sqrt(var_acc.value() / n);
    if (sd < 1e-12 * std::max(1.0, std::abs(mean))) continue;  // constant
    for (Index i = 0; i < ds.n(); ++i) out.X(i, j) = (ds.X(i, j) - mean) / sd;
  }
  return out;
}

}  // namespace newsamp
