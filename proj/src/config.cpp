#include "ttsa/config.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorKind::Parse, what);
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    parse_error(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* name) {
  if (!j.is_number()) parse_error(std::string(name) + " must be a number");
  return j.get<double>();
}

std::uint64_t count(const json& j, const char* name) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    parse_error(std::string(name) + " must be a nonnegative integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0) parse_error(std::string(name) + " must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

ScheduleParams schedule_from_json(const json& j, const char* name) {
  if (!j.is_object()) parse_error(std::string(name) + " must be an object");
  return {number(require(j, "base"), "base"), number(require(j, "tau"), "tau"),
          number(require(j, "alpha"), "alpha")};
}

json schedule_to_json(const ScheduleParams& p) {
  return {{"base", p.base}, {"tau", p.tau}, {"alpha", p.alpha}};
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RunParams run_from_json(const json& j) {
  RunParams r;
  if (!j.is_object()) parse_error("run must be an object");
  if (j.contains("replicas")) r.replicas = count(j["replicas"], "replicas");
  if (j.contains("steps")) r.steps = count(j["steps"], "steps");
  if (j.contains("seed")) r.seed = count(j["seed"], "seed");
  if (j.contains("stride")) r.stride = count(j["stride"], "stride");
  if (j.contains("jobs"))
    r.jobs = static_cast<unsigned>(count(j["jobs"], "jobs"));
  if (j.contains("out")) {
    if (!j["out"].is_string()) parse_error("out must be a string");
    r.out = j["out"].get<std::string>();
  }
  if (j.contains("checkpoints")) {
    if (!j["checkpoints"].is_array()) parse_error("checkpoints must be an array");
    for (const auto& c : j["checkpoints"])
      r.checkpoints.push_back(count(c, "checkpoint"));
  }
  return r;
}

json run_to_json(const RunParams& r) {
  return {{"replicas", r.replicas}, {"steps", r.steps},
          {"checkpoints", r.checkpoints}, {"seed", r.seed},
          {"stride", r.stride}, {"jobs", r.jobs}, {"out", r.out}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_error("'" + path + "': " + e.what());
  }
}

void write_flat(std::ostream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << ',' << format_double(m(i, j));
}

void flat_header(std::ostream& os, const char* name, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << ',' << name << '_' << i << '_' << j;
}

}  // namespace

Matrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty())
    parse_error(std::string(name) + " must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty())
    parse_error(std::string(name) + " rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      parse_error(std::string(name) + " is ragged");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = number(row[static_cast<std::size_t>(c)], name);
  }
  return m;
}

Vector vector_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty())
    parse_error(std::string(name) + " must be a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = number(j[i], name);
  return v;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    out.push_back(std::move(row));
  }
  return out;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return a11 == o.a11 && a12 == o.a12 && a21 == o.a21 && a22 == o.a22 &&
         b1 == o.b1 && b2 == o.b2 && gamma11 == o.gamma11 &&
         gamma12 == o.gamma12 && gamma22 == o.gamma22 &&
         distribution == o.distribution && beta == o.beta && gamma == o.gamma &&
         init_theta == o.init_theta && init_r == o.init_r && run == o.run;
}

SystemSpec RunConfig::system() const {
  return SystemSpec(a11, a12, a21, a22, b1, b2,
                    NoiseSpec{gamma11, gamma12, gamma22, distribution});
}

SchedulePair RunConfig::schedules() const {
  return SchedulePair(StepSchedule(beta), StepSchedule(gamma));
}

InitialState RunConfig::initial_state() const {
  InitialState s{Vector::Zero(a11.rows()), Vector::Zero(a22.rows())};
  if (init_theta) s.theta = *init_theta;
  if (init_r) s.r = *init_r;
  return s;
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) parse_error("config must be a JSON object");
  RunConfig c;
  const auto n = count(require(j, "n"), "n");
  const auto m = count(require(j, "m"), "m");
  if (n == 0 || m == 0) parse_error("n and m must be positive");
  c.a11 = matrix_from_json(require(j, "A11"), "A11");
  c.a12 = matrix_from_json(require(j, "A12"), "A12");
  c.a21 = matrix_from_json(require(j, "A21"), "A21");
  c.a22 = matrix_from_json(require(j, "A22"), "A22");
  c.b1 = j.contains("b1") ? vector_from_json(j["b1"], "b1")
                          : Vector::Zero(static_cast<Eigen::Index>(n));
  c.b2 = j.contains("b2") ? vector_from_json(j["b2"], "b2")
                          : Vector::Zero(static_cast<Eigen::Index>(m));
  const auto& noise = require(j, "noise");
  c.gamma11 = matrix_from_json(require(noise, "Gamma11"), "Gamma11");
  c.gamma12 = noise.contains("Gamma12")
                  ? matrix_from_json(noise["Gamma12"], "Gamma12")
                  : Matrix::Zero(static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(m));
  c.gamma22 = matrix_from_json(require(noise, "Gamma22"), "Gamma22");
  if (noise.contains("distribution")) {
    if (!noise["distribution"].is_string())
      parse_error("distribution must be a string");
    c.distribution = parse_distribution(noise["distribution"].get<std::string>());
  }
  c.beta = schedule_from_json(require(j, "beta"), "beta");
  c.gamma = schedule_from_json(require(j, "gamma"), "gamma");
  if (j.contains("init")) {
    const auto& init = j["init"];
    if (init.contains("theta")) c.init_theta = vector_from_json(init["theta"], "init.theta");
    if (init.contains("r")) c.init_r = vector_from_json(init["r"], "init.r");
  }
  if (j.contains("run")) c.run = run_from_json(j["run"]);

  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  auto shape = [](const Matrix& x, Eigen::Index r, Eigen::Index cc, const char* nm) {
    if (x.rows() != r || x.cols() != cc)
      parse_error(std::string(nm) + " has shape " + std::to_string(x.rows()) +
                  "x" + std::to_string(x.cols()) + ", expected " +
                  std::to_string(r) + "x" + std::to_string(cc));
  };
  shape(c.a11, ni, ni, "A11");
  shape(c.a12, ni, mi, "A12");
  shape(c.a21, mi, ni, "A21");
  shape(c.a22, mi, mi, "A22");
  shape(c.b1, ni, 1, "b1");
  shape(c.b2, mi, 1, "b2");
  shape(c.gamma11, ni, ni, "Gamma11");
  shape(c.gamma12, ni, mi, "Gamma12");
  shape(c.gamma22, mi, mi, "Gamma22");
  if (c.init_theta) shape(*c.init_theta, ni, 1, "init.theta");
  if (c.init_r) shape(*c.init_r, mi, 1, "init.r");
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    parse_error(e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_json_file(path));
}

json to_json(const RunConfig& c) {
  json j;
  j["n"] = c.a11.rows();
  j["m"] = c.a22.rows();
  j["A11"] = matrix_to_json(c.a11);
  j["A12"] = matrix_to_json(c.a12);
  j["A21"] = matrix_to_json(c.a21);
  j["A22"] = matrix_to_json(c.a22);
  j["b1"] = vector_to_json(c.b1);
  j["b2"] = vector_to_json(c.b2);
  j["noise"] = {{"Gamma11", matrix_to_json(c.gamma11)},
                {"Gamma12", matrix_to_json(c.gamma12)},
                {"Gamma22", matrix_to_json(c.gamma22)},
                {"distribution", to_string(c.distribution)}};
  j["beta"] = schedule_to_json(c.beta);
  j["gamma"] = schedule_to_json(c.gamma);
  if (c.init_theta || c.init_r) {
    j["init"] = json::object();
    if (c.init_theta) j["init"]["theta"] = vector_to_json(*c.init_theta);
    if (c.init_r) j["init"]["r"] = vector_to_json(*c.init_r);
  }
  j["run"] = run_to_json(c.run);
  return j;
}

AveragingConfig parse_averaging_config(const json& j) {
  if (!j.is_object()) parse_error("averaging config must be a JSON object");
  AveragingConfig c;
  c.a = matrix_from_json(require(j, "A"), "A");
  const auto d = c.a.rows();
  if (c.a.cols() != d) parse_error("A must be square");
  c.b = j.contains("b") ? vector_from_json(j["b"], "b") : Vector::Zero(d);
  c.gamma = j.contains("Gamma") ? matrix_from_json(j["Gamma"], "Gamma")
                                : Matrix::Identity(d, d);
  if (c.b.size() != d) parse_error("b must have the dimension of A");
  if (c.gamma.rows() != d || c.gamma.cols() != d)
    parse_error("Gamma must have the shape of A");
  if (j.contains("gamma")) c.fast = schedule_from_json(j["gamma"], "gamma");
  if (j.contains("run")) c.run = run_from_json(j["run"]);
  return c;
}

AveragingConfig load_averaging_config(const std::string& path) {
  return parse_averaging_config(read_json_file(path));
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_matrix_rows(std::ostream& os, const std::string& name,
                       const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << name << ',' << i << ',' << j << ',' << format_double(m(i, j)) << '\n';
}

std::vector<std::pair<std::string, Matrix>> read_matrix_rows(std::istream& is) {
  struct Entry {
    Eigen::Index row, col;
    double value;
  };
  std::vector<std::pair<std::string, std::vector<Entry>>> raw;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line.rfind("name,", 0) == 0) continue;
    std::istringstream ls(line);
    std::string name, row, col, value;
    if (!std::getline(ls, name, ',') || !std::getline(ls, row, ',') ||
        !std::getline(ls, col, ',') || !std::getline(ls, value))
      parse_error("malformed matrix row: " + line);
    Entry e{};
    try {
      e = {std::stol(row), std::stol(col), std::stod(value)};
    } catch (const std::exception&) {
      parse_error("malformed matrix row: " + line);
    }
    auto it = std::find_if(raw.begin(), raw.end(),
                           [&](const auto& p) { return p.first == name; });
    if (it == raw.end()) {
      raw.emplace_back(name, std::vector<Entry>{});
      it = std::prev(raw.end());
    }
    it->second.push_back(e);
  }
  std::vector<std::pair<std::string, Matrix>> out;
  for (const auto& [name, entries] : raw) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& e : entries) {
      rows = std::max(rows, e.row + 1);
      cols = std::max(cols, e.col + 1);
    }
    Matrix m = Matrix::Zero(rows, cols);
    for (const auto& e : entries) m(e.row, e.col) = e.value;
    out.emplace_back(name, std::move(m));
  }
  return out;
}

void write_prediction_csv(std::ostream& os, const PredictionBundle& p) {
  os << "name,row,col,value\n";
  write_matrix_rows(os, "Sigma11", p.full.sigma11);
  write_matrix_rows(os, "Sigma12", p.full.sigma12);
  write_matrix_rows(os, "Sigma22", p.full.sigma22);
  write_matrix_rows(os, "Sigma11_reduced", p.sigma11_reduced);
  write_matrix_rows(os, "Delta", p.full.delta);
  write_matrix_rows(os, "Q", p.full.q);
  write_matrix_rows(os, "Sigma11_opt", p.optimal.sigma11);
  write_matrix_rows(os, "G1_opt", p.optimal.g1);
  write_matrix_rows(os, "G_opt", p.optimal.g);
  write_matrix_rows(os, "beta_bar", Matrix::Constant(1, 1, p.full.beta_bar));
}

PredictionBundle read_prediction_csv(std::istream& is) {
  PredictionBundle p;
  bool seen_beta_bar = false;
  for (auto& [name, m] : read_matrix_rows(is)) {
    if (name == "Sigma11") p.full.sigma11 = std::move(m);
    else if (name == "Sigma12") p.full.sigma12 = std::move(m);
    else if (name == "Sigma22") p.full.sigma22 = std::move(m);
    else if (name == "Sigma11_reduced") p.sigma11_reduced = std::move(m);
    else if (name == "Delta") p.full.delta = std::move(m);
    else if (name == "Q") p.full.q = std::move(m);
    else if (name == "Sigma11_opt") p.optimal.sigma11 = std::move(m);
    else if (name == "G1_opt") p.optimal.g1 = std::move(m);
    else if (name == "G_opt") p.optimal.g = std::move(m);
    else if (name == "beta_bar") {
      p.full.beta_bar = m(0, 0);
      seen_beta_bar = true;
    }
  }
  if (!seen_beta_bar || p.full.sigma11.size() == 0)
    parse_error("prediction CSV is missing blocks");
  return p;
}

json prediction_to_json(const PredictionBundle& p) {
  return {{"Sigma11", matrix_to_json(p.full.sigma11)},
          {"Sigma12", matrix_to_json(p.full.sigma12)},
          {"Sigma22", matrix_to_json(p.full.sigma22)},
          {"Sigma11_reduced", matrix_to_json(p.sigma11_reduced)},
          {"Delta", matrix_to_json(p.full.delta)},
          {"Q", matrix_to_json(p.full.q)},
          {"Sigma11_opt", matrix_to_json(p.optimal.sigma11)},
          {"G1_opt", matrix_to_json(p.optimal.g1)},
          {"G_opt", matrix_to_json(p.optimal.g)},
          {"beta_bar", p.full.beta_bar}};
}

void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryState>& states) {
  if (states.empty()) return;
  os << 'k';
  for (Eigen::Index i = 0; i < states[0].theta.size(); ++i) os << ",theta_" << i;
  for (Eigen::Index i = 0; i < states[0].r.size(); ++i) os << ",r_" << i;
  os << '\n';
  for (const auto& s : states) {
    os << s.k;
    write_flat(os, s.theta);
    write_flat(os, s.r);
    os << '\n';
  }
}

void write_propagation_csv(std::ostream& os,
                           const std::vector<CovarianceCheckpoint>& rows) {
  if (rows.empty()) return;
  os << "k,beta_k,gamma_k";
  flat_header(os, "S11", rows[0].sigma11);
  flat_header(os, "S12", rows[0].sigma12);
  flat_header(os, "S22", rows[0].sigma22);
  os << '\n';
  for (const auto& r : rows) {
    os << r.k << ',' << format_double(r.beta) << ',' << format_double(r.gamma);
    write_flat(os, r.sigma11);
    write_flat(os, r.sigma12);
    write_flat(os, r.sigma22);
    os << '\n';
  }
}

void write_ensemble_csv(std::ostream& os,
                        const std::vector<EnsembleStatsRow>& rows) {
  if (rows.empty()) return;
  const auto& e0 = rows[0].estimate;
  os << "k,beta_k,gamma_k";
  flat_header(os, "S11", e0.sigma11);
  flat_header(os, "S12", e0.sigma12);
  flat_header(os, "S22", e0.sigma22);
  if (rows[0].se) {
    flat_header(os, "se11", e0.sigma11);
    flat_header(os, "se12", e0.sigma12);
    flat_header(os, "se22", e0.sigma22);
  }
  os << '\n';
  for (const auto& r : rows) {
    os << r.k << ',' << format_double(r.beta) << ',' << format_double(r.gamma);
    write_flat(os, r.estimate.sigma11);
    write_flat(os, r.estimate.sigma12);
    write_flat(os, r.estimate.sigma22);
    if (r.se) {
      write_flat(os, r.se->sigma11);
      write_flat(os, r.se->sigma12);
      write_flat(os, r.se->sigma22);
    }
    os << '\n';
  }
}

}  // namespace ttsa
