#include "netmoments/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace netmoments {

namespace {

void check_bounds_pair(double w, const Bounds& b, std::size_t i,
                       std::size_t j) {
  if (!(w >= b.w_min && w <= b.w_max)) {
    throw ValidationError(
        ValidationError::Kind::OutOfBounds,
        "weight[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
            format_double(w) + " outside [" + format_double(b.w_min) + ", " +
            format_double(b.w_max) + "]",
        static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j));
  }
}

void check_bounds_sane(const Bounds& b) {
  if (!(b.w_min > 0.0) || !(b.w_max >= b.w_min) || !std::isfinite(b.w_max)) {
    throw ValidationError(ValidationError::Kind::BoundViolation,
                          "bounds must satisfy 0 < w_min <= w_max, got [" +
                              format_double(b.w_min) + ", " +
                              format_double(b.w_max) + "]");
  }
}

}  // namespace

WeightedNetwork WeightedNetwork::validate_flat(std::span<const double> raw,
                                               std::size_t n, Bounds bounds) {
  check_bounds_sane(bounds);
  if (n < 2) {
    throw ValidationError(ValidationError::Kind::TooSmall,
                          "network needs at least 2 nodes, got " +
                              std::to_string(n));
  }
  if (raw.size() != n * n) {
    throw ValidationError(ValidationError::Kind::NonSquare,
                          "expected " + std::to_string(n * n) +
                              " entries for an " + std::to_string(n) + "x" +
                              std::to_string(n) + " matrix, got " +
                              std::to_string(raw.size()));
  }
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = raw[i * n + i];
    if (!(std::abs(d) <= 1e-12)) {
      throw ValidationError(ValidationError::Kind::NonzeroDiagonal,
                            "diagonal entry [" + std::to_string(i) + "][" +
                                std::to_string(i) + "] = " + format_double(d) +
                                " must be zero",
                            static_cast<std::ptrdiff_t>(i));
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = raw[i * n + j];
      const double b = raw[j * n + i];
      if (!(std::abs(a - b) <= kSymmetryTol)) {
        throw ValidationError(
            ValidationError::Kind::AsymmetricEntry,
            "entries [" + std::to_string(i) + "][" + std::to_string(j) +
                "] = " + format_double(a) + " and [" + std::to_string(j) +
                "][" + std::to_string(i) + "] = " + format_double(b) +
                " differ by more than " + format_double(kSymmetryTol),
            static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j));
      }
      check_bounds_pair(a, bounds, i, j);
      // upper triangle is canonical; mirroring keeps symmetry exact
      w[i * n + j] = a;
      w[j * n + i] = a;
    }
  }
  return WeightedNetwork(n, std::move(w), bounds);
}

WeightedNetwork WeightedNetwork::validate(
    const std::vector<std::vector<double>>& raw, Bounds bounds) {
  const std::size_t n = raw.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : raw) {
    if (row.size() != n) {
      throw ValidationError(ValidationError::Kind::NonSquare,
                            "matrix has " + std::to_string(n) +
                                " rows but a row of length " +
                                std::to_string(row.size()));
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return validate_flat(flat, n, bounds);
}

WeightedNetwork WeightedNetwork::uniform(std::size_t n, double w,
                                         Bounds bounds) {
  check_bounds_sane(bounds);
  if (n < 2) {
    throw ValidationError(ValidationError::Kind::TooSmall,
                          "network needs at least 2 nodes, got " +
                              std::to_string(n));
  }
  if (!(w >= bounds.w_min && w <= bounds.w_max)) {
    throw ValidationError(ValidationError::Kind::BoundViolation,
                          "uniform weight " + format_double(w) +
                              " outside bounds [" + format_double(bounds.w_min) +
                              ", " + format_double(bounds.w_max) + "]");
  }
  std::vector<double> weights(n * n, w);
  for (std::size_t i = 0; i < n; ++i) weights[i * n + i] = 0.0;
  return WeightedNetwork(n, std::move(weights), bounds);
}

WeightedNetwork WeightedNetwork::from_upper_triangle(
    std::size_t n, std::span<const double> upper, Bounds bounds) {
  check_bounds_sane(bounds);
  if (n < 2) {
    throw ValidationError(ValidationError::Kind::TooSmall,
                          "network needs at least 2 nodes, got " +
                              std::to_string(n));
  }
  if (upper.size() != upper_size(n)) {
    throw ValidationError(ValidationError::Kind::NonSquare,
                          "expected " + std::to_string(upper_size(n)) +
                              " upper-triangle entries, got " +
                              std::to_string(upper.size()));
  }
  std::vector<double> w(n * n, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      check_bounds_pair(upper[k], bounds, i, j);
      w[i * n + j] = upper[k];
      w[j * n + i] = upper[k];
    }
  }
  return WeightedNetwork(n, std::move(w), bounds);
}

double WeightedNetwork::max_weight() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      m = std::max(m, weights_[i * n_ + j]);
  return m;
}

std::vector<double> WeightedNetwork::upper_triangle() const {
  std::vector<double> upper;
  upper.reserve(upper_size(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      upper.push_back(weights_[i * n_ + j]);
  return upper;
}

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string WeightedNetwork::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["w_min"] = bounds_.w_min;
  j["w_max"] = bounds_.w_max;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < n_; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < n_; ++k) row.push_back(weights_[i * n_ + k]);
    rows.push_back(std::move(row));
  }
  j["weights"] = std::move(rows);
  return j.dump();
}

WeightedNetwork WeightedNetwork::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DecodeError(std::string("network JSON parse failed: ") + e.what());
  }
  try {
    const auto n = j.at("n").get<std::size_t>();
    Bounds b;
    b.w_min = j.at("w_min").get<double>();
    b.w_max = j.at("w_max").get<double>();
    const auto& rows = j.at("weights");
    if (!rows.is_array() || rows.size() != n)
      throw DecodeError("network JSON: 'weights' must be an array of n rows");
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != n)
        throw DecodeError("network JSON: each weights row must have n values");
      for (const auto& v : row) {
        if (!v.is_number())
          throw DecodeError("network JSON: weights must be numbers");
        flat.push_back(v.get<double>());
      }
    }
    return validate_flat(flat, n, b);
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("network JSON missing or mistyped field: ") +
                      e.what());
  }
}

std::string WeightedNetwork::to_csv() const {
  std::string out;
  out += std::to_string(n_);
  out += ',';
  out += format_double(bounds_.w_min);
  out += ',';
  out += format_double(bounds_.w_max);
  out += '\n';
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < n_; ++k) {
      if (k) out += ',';
      out += format_double(weights_[i * n_ + k]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_csv_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw DecodeError("network CSV line " + std::to_string(line_no) +
                      ": cannot parse number '" + s + "'");
  }
  return v;
}

}  // namespace

WeightedNetwork WeightedNetwork::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw DecodeError("network CSV: empty input");
  auto header = split_csv_line(line);
  if (header.size() != 3)
    throw DecodeError("network CSV line 1: expected 'n,w_min,w_max'");
  const double n_val = parse_csv_double(header[0], 1);
  const auto n = static_cast<std::size_t>(n_val);
  if (n_val != static_cast<double>(n))
    throw DecodeError("network CSV line 1: n must be an integer");
  Bounds b;
  b.w_min = parse_csv_double(header[1], 1);
  b.w_max = parse_csv_double(header[2], 1);
  std::vector<double> flat;
  flat.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw DecodeError("network CSV: expected " + std::to_string(n) +
                        " matrix rows, got " + std::to_string(i));
    auto fields = split_csv_line(line);
    if (fields.size() != n)
      throw DecodeError("network CSV line " + std::to_string(i + 2) +
                        ": expected " + std::to_string(n) + " values, got " +
                        std::to_string(fields.size()));
    for (const auto& f : fields) flat.push_back(parse_csv_double(f, i + 2));
  }
  return validate_flat(flat, n, b);
}

WeightedNetwork WeightedNetwork::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DecodeError("cannot open network file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".csv") return from_csv(buf.str());
  return from_json(buf.str());
}

void WeightedNetwork::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write network file: " + path.string());
  out << (path.extension() == ".csv" ? to_csv() : to_json());
  if (path.extension() != ".csv") out << '\n';
}

}  // namespace netmoments
