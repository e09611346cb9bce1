#include "mjls/config.hpp"

#include "mjls/chain.hpp"
#include "mjls/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mjls {

namespace {

using nlohmann::json;

struct Collector {
  std::vector<std::string> errors;

  void add(const std::string& msg) { errors.push_back(msg); }

  void finish(const std::string& source) const {
    if (errors.empty()) return;
    std::ostringstream out;
    out << source << ": " << errors.size() << " validation error(s):";
    for (const std::string& e : errors) out << "\n  - " << e;
    throw InvalidInputError(out.str());
  }
};

bool read_scalar(const json& j, const char* field, double& out,
                 Collector& errs) {
  if (!j.contains(field)) {
    errs.add(std::string("missing field \"") + field + "\"");
    return false;
  }
  if (!j.at(field).is_number()) {
    errs.add(std::string("field \"") + field + "\" must be a number");
    return false;
  }
  out = j.at(field).get<double>();
  return true;
}

bool read_vector(const json& j, const char* field, Vector& out,
                 Collector& errs, bool required = true) {
  if (!j.contains(field)) {
    if (required) errs.add(std::string("missing field \"") + field + "\"");
    return false;
  }
  const json& v = j.at(field);
  if (!v.is_array()) {
    errs.add(std::string("field \"") + field + "\" must be an array of numbers");
    return false;
  }
  out.resize(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      errs.add(std::string("field \"") + field + "\" entry " +
               std::to_string(i) + " is not a number");
      return false;
    }
    out[static_cast<Index>(i)] = v[i].get<double>();
  }
  return true;
}

bool read_matrix(const json& j, const char* field, Matrix& out,
                 Collector& errs) {
  if (!j.contains(field)) {
    errs.add(std::string("missing field \"") + field + "\"");
    return false;
  }
  const json& m = j.at(field);
  if (!m.is_array() || m.empty() || !m[0].is_array()) {
    errs.add(std::string("field \"") + field +
             "\" must be a nonempty array of rows");
    return false;
  }
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  out.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!m[i].is_array() || m[i].size() != cols) {
      errs.add(std::string("field \"") + field + "\" row " +
               std::to_string(i) + " has " + std::to_string(m[i].size()) +
               " entries, expected " + std::to_string(cols));
      return false;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!m[i][c].is_number()) {
        errs.add(std::string("field \"") + field + "\" entry (" +
                 std::to_string(i) + "," + std::to_string(c) +
                 ") is not a number");
        return false;
      }
      out(static_cast<Index>(i), static_cast<Index>(c)) =
          m[i][c].get<double>();
    }
  }
  return true;
}

void check_stochastic(const Matrix& P, const char* field, Collector& errs) {
  for (Index i = 0; i < P.rows(); ++i) {
    for (Index c = 0; c < P.cols(); ++c) {
      if (!(P(i, c) >= 0.0) || P(i, c) > 1.0) {
        errs.add(std::string("field \"") + field + "\" entry (" +
                 std::to_string(i) + "," + std::to_string(c) + ") = " +
                 std::to_string(P(i, c)) + " outside [0, 1]");
      }
    }
    const double s = P.row(i).sum();
    if (std::abs(s - 1.0) > 1e-12) {
      errs.add(std::string("field \"") + field + "\" row " +
               std::to_string(i) + " sums to " + std::to_string(s) +
               ", expected 1");
    }
  }
}

void read_alphas(const json& j, ProblemConfig& cfg, Collector& errs) {
  if (!j.contains("alpha")) {
    errs.add("missing field \"alpha\" (number or array of numbers)");
    return;
  }
  const json& a = j.at("alpha");
  if (a.is_number()) {
    cfg.alphas = {a.get<double>()};
  } else if (a.is_array()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number()) {
        errs.add("field \"alpha\" entry " + std::to_string(i) +
                 " is not a number");
        return;
      }
      cfg.alphas.push_back(a[i].get<double>());
    }
    if (cfg.alphas.empty()) errs.add("field \"alpha\" must not be empty");
  } else {
    errs.add("field \"alpha\" must be a number or an array of numbers");
    return;
  }
  for (double alpha : cfg.alphas) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      errs.add("field \"alpha\" value " + std::to_string(alpha) +
               " must be finite and nonnegative");
    }
  }
}

void read_mc(const json& j, ProblemConfig& cfg, Collector& errs) {
  if (!j.contains("mc")) return;
  const json& m = j.at("mc");
  if (!m.is_object()) {
    errs.add("field \"mc\" must be an object");
    return;
  }
  if (m.contains("trajectories")) {
    if (!m.at("trajectories").is_number_integer() ||
        m.at("trajectories").get<long long>() < 1) {
      errs.add("field \"mc.trajectories\" must be a positive integer");
    } else {
      cfg.mc.trajectories = m.at("trajectories").get<long long>();
    }
  }
  if (m.contains("seed")) {
    if (!m.at("seed").is_number_integer()) {
      errs.add("field \"mc.seed\" must be an integer");
    } else {
      cfg.mc.seed = m.at("seed").get<std::uint64_t>();
    }
  }
  if (m.contains("record_steps")) {
    const json& rs = m.at("record_steps");
    if (!rs.is_array()) {
      errs.add("field \"mc.record_steps\" must be an array of step indices");
    } else {
      for (std::size_t i = 0; i < rs.size(); ++i) {
        if (!rs[i].is_number_integer()) {
          errs.add("field \"mc.record_steps\" entry " + std::to_string(i) +
                   " is not an integer");
          return;
        }
        cfg.mc.record_steps.push_back(rs[i].get<int>());
      }
      for (std::size_t i = 0; i < cfg.mc.record_steps.size(); ++i) {
        const int k = cfg.mc.record_steps[i];
        if (k < 0 || k > cfg.horizon) {
          errs.add("field \"mc.record_steps\" entry " + std::to_string(k) +
                   " outside [0, horizon]");
        }
        if (i > 0 && k <= cfg.mc.record_steps[i - 1]) {
          errs.add("field \"mc.record_steps\" must be strictly increasing");
        }
      }
    }
  }
}

void parse_raw(const json& j, ProblemConfig& cfg, Collector& errs) {
  double n_val = 0.0;
  double d_val = 0.0;
  if (read_scalar(j, "n", n_val, errs)) cfg.n = static_cast<Index>(n_val);
  if (read_scalar(j, "d", d_val, errs)) cfg.d = static_cast<Index>(d_val);
  if (cfg.n < 1) errs.add("field \"n\" must be a positive mode count");
  if (cfg.d < 1) errs.add("field \"d\" must be a positive state dimension");

  if (j.contains("A") && j.at("A").is_array()) {
    const json& arr = j.at("A");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      json wrapper;
      wrapper["A"] = arr[i];
      Matrix Ai;
      const std::string name = "A[" + std::to_string(i) + "]";
      Collector sub;
      if (read_matrix(wrapper, "A", Ai, sub)) {
        if (Ai.rows() != cfg.d || Ai.cols() != cfg.d) {
          errs.add("field \"" + name + "\" is " + std::to_string(Ai.rows()) +
                   "x" + std::to_string(Ai.cols()) + ", expected " +
                   std::to_string(cfg.d) + "x" + std::to_string(cfg.d));
        }
        cfg.A.push_back(std::move(Ai));
      } else {
        errs.add("field \"" + name + "\" must be a " + std::to_string(cfg.d) +
                 "x" + std::to_string(cfg.d) + " matrix of numbers");
      }
    }
    if (static_cast<Index>(cfg.A.size()) != cfg.n &&
        static_cast<Index>(arr.size()) != cfg.n) {
      errs.add("field \"A\" has " + std::to_string(arr.size()) +
               " matrices, expected n = " + std::to_string(cfg.n));
    }
  } else {
    errs.add("missing field \"A\" (array of d x d matrices)");
  }

  if (j.contains("b") && j.at("b").is_array()) {
    const json& arr = j.at("b");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      json wrapper;
      wrapper["b"] = arr[i];
      Vector bi;
      Collector sub;
      if (read_vector(wrapper, "b", bi, sub)) {
        if (bi.size() != cfg.d) {
          errs.add("field \"b[" + std::to_string(i) + "]\" has length " +
                   std::to_string(bi.size()) + ", expected d = " +
                   std::to_string(cfg.d));
        }
        cfg.b.push_back(std::move(bi));
      } else {
        errs.add("field \"b[" + std::to_string(i) +
                 "]\" must be an array of numbers");
      }
    }
    if (static_cast<Index>(arr.size()) != cfg.n) {
      errs.add("field \"b\" has " + std::to_string(arr.size()) +
               " vectors, expected n = " + std::to_string(cfg.n));
    }
  } else {
    errs.add("missing field \"b\" (array of d-vectors)");
  }

  if (read_matrix(j, "P", cfg.P, errs)) {
    if (cfg.P.rows() != cfg.n || cfg.P.cols() != cfg.n) {
      errs.add("field \"P\" is " + std::to_string(cfg.P.rows()) + "x" +
               std::to_string(cfg.P.cols()) + ", expected " +
               std::to_string(cfg.n) + "x" + std::to_string(cfg.n));
    } else {
      check_stochastic(cfg.P, "P", errs);
    }
  }

  if (read_vector(j, "p0", cfg.p0, errs, /*required=*/false)) {
    if (cfg.p0.size() != cfg.n) {
      errs.add("field \"p0\" has length " + std::to_string(cfg.p0.size()) +
               ", expected n = " + std::to_string(cfg.n));
    } else {
      double sum = 0.0;
      for (Index i = 0; i < cfg.p0.size(); ++i) {
        if (!(cfg.p0[i] >= 0.0)) {
          errs.add("field \"p0\" entry " + std::to_string(i) + " is negative");
        }
        sum += cfg.p0[i];
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        errs.add("field \"p0\" sums to " + std::to_string(sum) +
                 ", expected 1");
      }
    }
  }

  if (read_vector(j, "xi0", cfg.xi0, errs, /*required=*/false)) {
    if (cfg.xi0.size() != cfg.d) {
      errs.add("field \"xi0\" has length " + std::to_string(cfg.xi0.size()) +
               ", expected d = " + std::to_string(cfg.d));
    }
  } else if (cfg.d >= 1) {
    cfg.xi0 = Vector::Zero(cfg.d);
  }
}

void parse_mdp(const json& j, ProblemConfig& cfg, Collector& errs) {
  double ns_val = 0.0;
  if (read_scalar(j, "n_s", ns_val, errs)) cfg.n_s = static_cast<Index>(ns_val);
  if (cfg.n_s < 1) errs.add("field \"n_s\" must be a positive state count");

  if (read_matrix(j, "P_s", cfg.P_s, errs)) {
    if (cfg.P_s.rows() != cfg.n_s || cfg.P_s.cols() != cfg.n_s) {
      errs.add("field \"P_s\" is " + std::to_string(cfg.P_s.rows()) + "x" +
               std::to_string(cfg.P_s.cols()) + ", expected " +
               std::to_string(cfg.n_s) + "x" + std::to_string(cfg.n_s));
    } else {
      check_stochastic(cfg.P_s, "P_s", errs);
    }
  }
  if (read_vector(j, "r", cfg.r, errs)) {
    if (cfg.r.size() != cfg.n_s) {
      errs.add("field \"r\" has length " + std::to_string(cfg.r.size()) +
               ", expected n_s = " + std::to_string(cfg.n_s));
    }
  }
  if (read_scalar(j, "gamma", cfg.gamma, errs)) {
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) {
      errs.add("field \"gamma\" = " + std::to_string(cfg.gamma) +
               " outside [0, 1)");
    }
  }
  if (read_matrix(j, "Phi", cfg.Phi, errs)) {
    if (cfg.Phi.rows() != cfg.n_s) {
      errs.add("field \"Phi\" has " + std::to_string(cfg.Phi.rows()) +
               " rows, expected n_s = " + std::to_string(cfg.n_s));
    }
  }

  if (read_vector(j, "theta0", cfg.theta0, errs, /*required=*/false)) {
    if (cfg.Phi.size() > 0 && cfg.theta0.size() != cfg.Phi.cols()) {
      errs.add("field \"theta0\" has length " +
               std::to_string(cfg.theta0.size()) + ", expected " +
               std::to_string(cfg.Phi.cols()));
    }
  } else if (cfg.Phi.size() > 0) {
    cfg.theta0 = Vector::Zero(cfg.Phi.cols());
  }
}

}  // namespace

ProblemConfig parse_config(const std::string& text,
                           const std::string& source_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(source_name + ": parse error at byte " +
                            std::to_string(e.byte) + ": " + e.what());
  }

  Collector errs;
  ProblemConfig cfg;
  if (!j.is_object()) {
    errs.add("top level must be an object");
    errs.finish(source_name);
  }

  if (!j.contains("kind") || !j.at("kind").is_string()) {
    errs.add("missing field \"kind\" (\"raw\" or \"mdp\")");
  } else {
    cfg.kind = j.at("kind").get<std::string>();
    if (cfg.kind != "raw" && cfg.kind != "mdp") {
      errs.add("field \"kind\" must be \"raw\" or \"mdp\", got \"" + cfg.kind +
               "\"");
    }
  }

  if (j.contains("horizon")) {
    if (!j.at("horizon").is_number_integer() ||
        j.at("horizon").get<long long>() < 0) {
      errs.add("field \"horizon\" must be a nonnegative integer");
    } else {
      cfg.horizon = j.at("horizon").get<int>();
    }
  }

  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    if (s.is_string() && s.get<std::string>() == "iid") {
      cfg.sampling = SamplingMode::kIID;
    } else if (s.is_string() && s.get<std::string>() == "markov") {
      cfg.sampling = SamplingMode::kMarkov;
    } else {
      errs.add("field \"sampling\" must be \"markov\" or \"iid\"");
    }
  }

  if (j.contains("out")) {
    if (!j.at("out").is_string()) {
      errs.add("field \"out\" must be a path string");
    } else {
      cfg.out_dir = j.at("out").get<std::string>();
    }
  }

  read_alphas(j, cfg, errs);
  read_mc(j, cfg, errs);

  if (cfg.kind == "raw") {
    parse_raw(j, cfg, errs);
  } else if (cfg.kind == "mdp") {
    parse_mdp(j, cfg, errs);
  }

  errs.finish(source_name);
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInputError("cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string dump_config(const ProblemConfig& cfg) {
  json j;
  j["kind"] = cfg.kind;
  auto vec_to_json = [](const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
  };
  auto mat_to_json = [](const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
      rows.push_back(row);
    }
    return rows;
  };
  if (cfg.kind == "raw") {
    j["n"] = cfg.n;
    j["d"] = cfg.d;
    json As = json::array();
    for (const Matrix& Ai : cfg.A) As.push_back(mat_to_json(Ai));
    j["A"] = As;
    json bs = json::array();
    for (const Vector& bi : cfg.b) bs.push_back(vec_to_json(bi));
    j["b"] = bs;
    j["P"] = mat_to_json(cfg.P);
    if (cfg.p0.size() > 0) j["p0"] = vec_to_json(cfg.p0);
    j["xi0"] = vec_to_json(cfg.xi0);
  } else {
    j["n_s"] = cfg.n_s;
    j["P_s"] = mat_to_json(cfg.P_s);
    j["r"] = vec_to_json(cfg.r);
    j["gamma"] = cfg.gamma;
    j["Phi"] = mat_to_json(cfg.Phi);
    j["theta0"] = vec_to_json(cfg.theta0);
  }
  if (cfg.alphas.size() == 1) {
    j["alpha"] = cfg.alphas[0];
  } else {
    j["alpha"] = cfg.alphas;
  }
  j["horizon"] = cfg.horizon;
  j["sampling"] = cfg.sampling == SamplingMode::kIID ? "iid" : "markov";
  j["mc"] = {{"trajectories", cfg.mc.trajectories},
             {"seed", cfg.mc.seed}};
  if (!cfg.mc.record_steps.empty()) {
    j["mc"]["record_steps"] = cfg.mc.record_steps;
  }
  j["out"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

JumpLinearSystem make_system(const ProblemConfig& cfg, double alpha,
                             Vector* xi0_out, Vector* theta_star_out,
                             std::vector<std::string>* warnings) {
  JumpLinearSystem sys = [&] {
    if (cfg.kind == "raw") {
      if (xi0_out != nullptr) *xi0_out = cfg.xi0;
      return build_generic(cfg.A, cfg.b, MarkovChain(cfg.P, cfg.p0), alpha,
                           warnings);
    }
    const PolicyEvalProblem problem(cfg.P_s, cfg.r, cfg.gamma, cfg.Phi);
    TDJumpModel model = build_td0(problem, alpha);
    if (theta_star_out != nullptr) *theta_star_out = model.theta_star;
    if (xi0_out != nullptr) *xi0_out = cfg.theta0 - model.theta_star;
    return std::move(model.sys);
  }();

  if (cfg.sampling == SamplingMode::kIID) {
    const ChainAnalysis ca = stationary_distribution(sys.chain);
    const Matrix P_iid =
        Vector::Ones(sys.num_modes()) * ca.p_inf.transpose();
    return JumpLinearSystem(MarkovChain(P_iid, ca.p_inf), sys.A, sys.b,
                            alpha);
  }
  return sys;
}

}  // namespace mjls
