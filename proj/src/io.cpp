#include "ergodix/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ergodix/error.hpp"

namespace ergodix {

namespace {

Json element_or_scalar(const GroupElement& g) {
  if (g.rank() == 1) return g[0];
  return element_to_json(g);
}

Json elements(const std::vector<GroupElement>& gs) {
  Json out = Json::array();
  for (const auto& g : gs) out.push_back(element_or_scalar(g));
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("expected a complex number as [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError("matrix rows must have equal length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a nonempty vector");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

Json element_to_json(const GroupElement& g) { return Json(g.coords()); }

GroupElement element_from_json(const Json& j, std::size_t q) {
  if (j.is_number_integer()) {
    if (q != 1) throw ConfigError("scalar group element given for rank " + std::to_string(q));
    return GroupElement{j.get<std::int64_t>()};
  }
  if (!j.is_array() || j.size() != q) {
    throw ConfigError("group element must have " + std::to_string(q) + " integer coordinates");
  }
  std::vector<std::int64_t> c;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw ConfigError("group element coordinates must be integers");
    c.push_back(x.get<std::int64_t>());
  }
  return GroupElement(std::move(c));
}

std::string statistic_csv(const std::vector<StatisticPoint>& points) {
  std::string out = "n,window_size,value\n";
  for (const auto& p : points) {
    out += std::to_string(p.n) + "," + std::to_string(p.window_size) + "," +
           format_double(p.value) + "\n";
  }
  return out;
}

std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw InvalidArgument("row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  return out;
}

Json report_object() {
  Json j = Json::object();
  j["schema"] = kSchema;
  return j;
}

Json to_json(const MixingStatistic& s) {
  Json j = Json::object();
  Json values = Json::array();
  for (const auto& p : s.per_window) values.push_back(Json::array({p.n, p.window_size, p.value}));
  j["values"] = std::move(values);
  j["verdict_threshold"] = s.verdict_threshold;
  j["verdict"] = to_string(s.verdict);
  return j;
}

Json to_json(const VdcReport& r) {
  Json j = report_object();
  Json gamma = Json::array();
  for (const auto& g : r.gamma) {
    gamma.push_back(Json::array({element_or_scalar(g.h), g.value.real(), g.value.imag()}));
  }
  j["gamma_window"] = r.gamma_window;
  j["gamma"] = std::move(gamma);
  Json stat = Json::array();
  for (const auto& p : r.difference_set_statistic) stat.push_back(Json::array({p.n, p.value}));
  j["prop28_statistic"] = std::move(stat);
  Json dbl = Json::array();
  for (const auto& p : r.double_average) dbl.push_back(Json::array({p.n, p.value}));
  j["double_average"] = std::move(dbl);
  Json avg = Json::array();
  for (const auto& p : r.averages) avg.push_back(Json::array({p.n, p.value}));
  j["averages"] = std::move(avg);
  j["verdict"] = {{"tolerance", r.tolerance},
                  {"hypothesis_satisfied", r.hypothesis_satisfied},
                  {"averages_vanish", r.averages_vanish},
                  {"label", r.label}};
  return j;
}

Json to_json(const EpsilonNetCertificate& c) {
  Json j = Json::object();
  j["epsilon"] = c.epsilon;
  j["kind"] = c.kind == EpsilonNetCertificate::Kind::separated_maximal ? "separated-maximal" : "net";
  j["elements"] = elements(c.elements);
  j["count"] = c.elements.size();
  j["scan_size"] = c.scan_window.size();
  j["covering_radius"] = c.covering_radius;
  if (c.elements.size() > 1) j["separation"] = c.separation;
  return j;
}

Json to_json(const ReturnSet& r) {
  Json j = Json::object();
  j["epsilon"] = r.epsilon;
  j["exponents"] = r.exponents;
  j["scan_size"] = r.scan_window.size();
  j["members"] = elements(r.members);
  j["chain_certificate"] = r.chain_certificate;
  j["gap_witness"] = r.gap_witness ? Json(elements(*r.gap_witness)) : Json(nullptr);
  return j;
}

Json to_json(const CompactSzemerediReport& r) {
  Json j = report_object();
  j["epsilon"] = r.epsilon;
  j["return_threshold"] = r.return_threshold;
  j["exponents"] = r.exponents;
  j["E_members"] = elements(r.e_members);
  j["candidates"] = elements(r.candidates);
  Json shifts = Json::array();
  Json averages = Json::array();
  Json density = Json::array();
  for (const auto& w : r.per_window) {
    shifts.push_back(Json::array({w.n, element_or_scalar(w.shift)}));
    averages.push_back(Json::array({w.n, w.average}));
    density.push_back(Json::array({w.n, w.e_density}));
  }
  j["shifts_per_window"] = std::move(shifts);
  j["E_density_per_window"] = std::move(density);
  j["averages"] = std::move(averages);
  j["tail_min"] = r.tail_min;
  j["scope"] = r.scope;
  return j;
}

Json to_json(const DichotomyVerdict& v) {
  Json j = report_object();
  j["ergodic"] = v.ergodic;
  j["dim_H1"] = v.dim_h1;
  j["dim_H0"] = v.dim_h0;
  j["factor_dim"] = v.factor_dim;
  j["verdict"] = to_string(v.kind);
  j["trivial"] = v.trivial;
  j["label"] = v.label;
  return j;
}

Json to_json(const SzemerediDriverReport& r) {
  Json j = report_object();
  j["ergodic"] = r.ergodic;
  j["dim_H1"] = r.dim_h1;
  j["dim_H0"] = r.dim_h0;
  j["factor_dim"] = r.factor_dim;
  j["branch"] = r.branch;
  j["szemeredi_tail_min"] = r.tail_min;
  j["reference"] = r.reference;
  Json averages = Json::array();
  for (const auto& p : r.per_window) averages.push_back(Json::array({p.n, p.average}));
  j["averages"] = std::move(averages);
  if (r.branch == "weakly-mixing") {
    j["boundary_constant"] = r.boundary_constant;
    j["bound_holds"] = r.bound_holds;
  }
  if (r.compact) j["compact"] = to_json(*r.compact);
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ergodix
