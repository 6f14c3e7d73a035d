#include "philr/cli.hpp"

#include <cmath>
#include <iostream>

#include "philr/cond.hpp"
#include "philr/eda.hpp"
#include "philr/error.hpp"
#include "philr/io.hpp"
#include "philr/kernels.hpp"
#include "philr/linalg.hpp"
#include "philr/lowrank.hpp"
#include "philr/phikernel.hpp"
#include "philr/scr.hpp"
#include "philr/synthetic.hpp"
#include "philr/verify.hpp"

namespace philr::cli {

namespace {

using Eigen::MatrixXd;
using json = nlohmann::ordered_json;

ToleranceMode tolerance_mode(const std::string& s) {
  if (s == "auto") return ToleranceMode::automatic;
  if (s == "absolute") return ToleranceMode::absolute;
  if (s == "relative") return ToleranceMode::relative;
  fail(ErrorKind::dimension_mismatch, "unknown --tol-mode '" + s + "'");
}

ScrOptions scr_options(const Options& o) {
  ScrOptions s;
  s.tol_col = s.tol_row = o.tol;
  s.max_rank = o.max_rank;
  s.mode = tolerance_mode(o.tol_mode);
  return s;
}

SparseMatrix load_sparse(const Options& o) {
  require(!o.input.empty(), ErrorKind::io_failure, "--in is required");
  return io::as_sparse(io::read_matrix_market(std::filesystem::path(o.input)));
}

void require_square(const SparseMatrix& a) {
  require(a.rows() == a.cols(), ErrorKind::dimension_mismatch,
          "input must be square, got " + std::to_string(a.rows()) + " x " +
              std::to_string(a.cols()));
}

json index_list(const std::vector<Index>& v) {
  json out = json::array();
  for (Index i : v) out.push_back(i);
  return out;
}

json column_major(const MatrixXd& m) {
  json out = json::array();
  for (Index i = 0; i < m.size(); ++i) out.push_back(m.data()[i]);
  return out;
}

json estimate_json(const CondEstimate& e) {
  json j;
  j["strategy"] = std::string(to_string(e.strategy));
  j["ell"] = e.ell;
  j["absolute"] = e.absolute;
  j["relative"] = e.relative;
  j["norm_a"] = e.norm_a;
  j["phi_norm"] = e.phi_norm;
  j["converged"] = e.converged;
  j["diagnostics"] = json::object();
  for (const auto& [k, v] : e.diagnostics) j["diagnostics"][k] = v;
  return j;
}

struct Approximation {
  LowRankPhiFamily family;
  ScrFactors factors;
  bool zero_input = false;
};

// A zero matrix has no SCR, but its phi family is exactly I / ell!.
Approximation approximate(const SparseMatrix& a, int p, const Options& o, RunReport& report) {
  Approximation ap;
  Stopwatch sw;
  if (a.nnz() == 0) {
    ap.zero_input = true;
    ap.family = zero_phi_family(a.rows(), p);
  } else {
    ap.factors = scr_approximate(a, scr_options(o));
    report.timing("scr", sw.seconds());
    Stopwatch sf;
    ap.family = build_phi_family(ap.factors, p);
    report.timing("phi_family", sf.seconds());
  }
  report.outputs["rank"] = ap.family.rank();
  report.outputs["eps_col"] = ap.factors.eps_col;
  report.outputs["eps_row"] = ap.factors.eps_row;
  return ap;
}

void record_common_inputs(const Options& o, RunReport& r) {
  r.inputs["in"] = o.input;
  r.inputs["tol"] = o.tol;
  r.inputs["tol_mode"] = o.tol_mode;
  r.inputs["max_rank"] = o.max_rank;
}

}  // namespace

Outcome cmd_scr(const Options& o) {
  Outcome out;
  auto& r = out.report;
  r.command = "scr";
  record_common_inputs(o, r);
  r.inputs["factors_prefix"] = o.factors_prefix;
  const SparseMatrix a = load_sparse(o);
  Stopwatch sw;
  const ScrFactors f = scr_approximate(a, scr_options(o));
  r.timing("scr", sw.seconds());
  Stopwatch sr;
  const double resid = scr_residual(a, f);
  r.timing("residual", sr.seconds());
  r.outputs["rows"] = a.rows();
  r.outputs["cols"] = a.cols();
  r.outputs["nnz"] = a.nnz();
  r.outputs["rank"] = f.rank;
  r.outputs["eps_col"] = f.eps_col;
  r.outputs["eps_row"] = f.eps_row;
  r.outputs["residual"] = resid;
  r.outputs["bound"] = std::hypot(f.eps_col, f.eps_row);
  r.outputs["norm_fro"] = a.frobenius_norm();
  r.outputs["converged"] = f.converged;
  r.outputs["column_indices"] = index_list(f.column_indices);
  r.outputs["row_indices"] = index_list(f.row_indices);
  if (!o.factors_prefix.empty()) {
    io::write_matrix_market(std::filesystem::path(o.factors_prefix + "X.mtx"), f.x);
    io::write_matrix_market(std::filesystem::path(o.factors_prefix + "Y.mtx"), f.y);
    io::write_matrix_market(std::filesystem::path(o.factors_prefix + "T.mtx"), f.t);
    r.outputs["files"] = {o.factors_prefix + "X.mtx", o.factors_prefix + "Y.mtx",
                          o.factors_prefix + "T.mtx"};
  }
  return out;
}

Outcome cmd_phi(const Options& o) {
  Outcome out;
  auto& r = out.report;
  r.command = "phi";
  record_common_inputs(o, r);
  const int p = o.p.value_or(o.ell);
  r.inputs["ell"] = o.ell;
  r.inputs["p"] = p;
  r.inputs["mode"] = o.mode;
  r.inputs["vector"] = o.vector;
  r.inputs["result"] = o.result;
  require(o.ell >= 0 && o.ell <= p, ErrorKind::dimension_mismatch, "--ell must lie in 0..p");
  require(o.mode == "materialize" || o.mode == "apply", ErrorKind::dimension_mismatch,
          "--mode must be materialize or apply");

  const SparseMatrix a = load_sparse(o);
  require_square(a);
  const Approximation ap = approximate(a, p, o, r);
  const auto eta = norm_estimate_eta(ap.family, o.ell);
  r.outputs["eta"] = eta.eta;
  r.outputs["eta_lower"] = eta.lower;
  r.outputs["eta_upper"] = eta.upper;
  const bool check = a.rows() <= 400;

  if (o.mode == "materialize") {
    Stopwatch sw;
    const DenseMatrix phi = materialize(ap.family, o.ell);
    r.timing("materialize", sw.seconds());
    if (!o.result.empty()) io::write_matrix_market(std::filesystem::path(o.result), phi);
    if (a.rows() <= 16) r.outputs["result"] = column_major(phi.eigen());
    if (check) {
      const MatrixXd oracle = phi_family(a.to_dense(), o.ell).back();
      r.outputs["rel_err_f"] = (phi.eigen() - oracle).norm() / oracle.norm();
    }
  } else {
    require(!o.vector.empty(), ErrorKind::io_failure, "--mode apply needs --vector");
    const DenseMatrix v = io::as_dense(io::read_matrix_market(std::filesystem::path(o.vector)));
    require(v.cols() == 1 && v.rows() == a.rows(), ErrorKind::dimension_mismatch,
            "--vector must be an n x 1 array");
    Stopwatch sw;
    const Eigen::VectorXd w = apply(ap.family, o.ell, v.eigen().col(0));
    r.timing("apply", sw.seconds());
    if (!o.result.empty()) io::write_matrix_market(std::filesystem::path(o.result), DenseMatrix(MatrixXd(w)));
    r.outputs["result"] = column_major(w);
    if (check) {
      const Eigen::VectorXd oracle = phi_family(a.to_dense(), o.ell).back() * v.eigen().col(0);
      const double on = oracle.norm();
      r.outputs["rel_err_f"] = (w - oracle).norm() / (on > 0.0 ? on : 1.0);
    }
  }
  return out;
}

Outcome cmd_cond(const Options& o) {
  Outcome out;
  auto& r = out.report;
  r.command = "cond";
  record_common_inputs(o, r);
  r.inputs["ell"] = o.ell;
  r.inputs["strategy"] = o.strategy;
  r.inputs["seed"] = o.seed;
  const auto& s = o.strategy;
  require(s == "one" || s == "two" || s == "both" || s == "exact" || s == "all",
          ErrorKind::dimension_mismatch, "--strategy must be one, two, both, exact or all");
  require(o.ell >= 0, ErrorKind::dimension_mismatch, "--ell must be >= 0");

  const SparseMatrix a = load_sparse(o);
  require_square(a);
  const bool want_exact = s == "exact" || s == "all";
  const bool want_one = s == "one" || s == "both" || s == "all";
  const bool want_two = s == "two" || s == "both" || s == "all";
  if (want_exact) {
    require(a.rows() <= kKroneckerColumnLimit, ErrorKind::dimension_mismatch,
            "exact condition number requires n <= " + std::to_string(kKroneckerColumnLimit) +
                ", got n = " + std::to_string(a.rows()));
  }

  json estimates = json::array();
  if (want_one || want_two) {
    const Approximation ap = approximate(a, o.ell, o, r);
    const NormReport na = norm2_estimate(a);
    r.outputs["norm_a"] = na.value;
    r.outputs["norm_a_iterations"] = na.iterations;
    PowerMethodOptions pm;
    pm.seed = o.seed;
    if (want_one) {
      Stopwatch sw;
      estimates.push_back(estimate_json(strategy_one(ap.family, o.ell, na.value)));
      r.timing("strategy_one", sw.seconds());
    }
    if (want_two) {
      Stopwatch sw;
      estimates.push_back(estimate_json(strategy_two(ap.family, o.ell, na.value, pm)));
      r.timing("strategy_two", sw.seconds());
    }
  }
  if (want_exact) {
    Stopwatch sw;
    estimates.push_back(estimate_json(cond_exact_small(DenseMatrix(a.to_dense()), o.ell)));
    r.timing("exact", sw.seconds());
  }
  r.outputs["estimates"] = estimates;
  return out;
}

Outcome cmd_eda(const Options& o) {
  Outcome out;
  auto& r = out.report;
  r.command = "eda";
  r.inputs["in"] = o.input;
  r.inputs["label_column"] = o.label_column;
  r.inputs["label_name"] = o.label_name;
  r.inputs["scale_columns"] = o.scale_columns;
  r.inputs["factors_prefix"] = o.factors_prefix;
  require(!o.input.empty(), ErrorKind::io_failure, "--in is required");
  io::CsvOptions csv;
  csv.label_column = o.label_column;
  if (!o.label_name.empty()) csv.label_name = o.label_name;
  auto table = io::read_labeled_csv(std::filesystem::path(o.input), csv);
  const LabeledData data(std::move(table.samples), table.labels, o.scale_columns);

  Stopwatch sw;
  const ScatterFactors sf = scatter_factors(data);
  const LowRankPhiFamily exp_b = exp_scatter(sf.h_b);
  const LowRankPhiFamily exp_w = exp_scatter(sf.h_w);
  r.timing("factored", sw.seconds());

  const Index n = data.features();
  r.outputs["features"] = n;
  r.outputs["samples"] = data.samples();
  r.outputs["classes"] = data.classes();
  r.outputs["class_sizes"] = index_list(sf.class_sizes);
  r.outputs["norm_hb"] = sf.h_b.frobenius_norm();
  r.outputs["norm_hw"] = sf.h_w.frobenius_norm();
  r.outputs["exp_sb_identity"] = sf.h_b.frobenius_norm() == 0.0;
  r.outputs["exp_sw_identity"] = sf.h_w.frobenius_norm() == 0.0;
  r.outputs["eta_b"] = norm_estimate_eta(exp_b, 0).eta;
  r.outputs["eta_w"] = norm_estimate_eta(exp_w, 0).eta;

  if (n <= 600) {
    auto err = [](const LowRankPhiFamily& fam, const DenseMatrix& h) {
      const MatrixXd oracle = expm(MatrixXd(h.eigen() * h.eigen().transpose()));
      return (materialize(fam, 0).eigen() - oracle).norm() / oracle.norm();
    };
    Stopwatch sd;
    r.outputs["err_b"] = err(exp_b, sf.h_b);
    r.outputs["err_w"] = err(exp_w, sf.h_w);
    r.timing("dense_check", sd.seconds());
  }
  if (!o.factors_prefix.empty()) {
    const auto& p = o.factors_prefix;
    io::write_matrix_market(std::filesystem::path(p + "HB.mtx"), sf.h_b);
    io::write_matrix_market(std::filesystem::path(p + "HW.mtx"), sf.h_w);
    io::write_matrix_market(std::filesystem::path(p + "phi1_ZB.mtx"), exp_b.phi_z(1));
    io::write_matrix_market(std::filesystem::path(p + "phi1_ZW.mtx"), exp_w.phi_z(1));
    r.outputs["files"] = {p + "HB.mtx", p + "HW.mtx", p + "phi1_ZB.mtx", p + "phi1_ZW.mtx"};
  }
  return out;
}

Outcome cmd_verify(const Options& o) {
  Outcome out;
  auto& r = out.report;
  r.command = "verify";
  r.inputs["suite"] = o.suite;
  r.inputs["seed"] = o.seed;
  Stopwatch sw;
  const auto results = verify::run(o.suite, o.seed);
  r.timing("total", sw.seconds());
  json suites = json::array();
  bool all = true;
  for (const auto& s : results) {
    json js;
    js["suite"] = s.suite;
    js["passed"] = s.passed();
    js["checks"] = json::array();
    for (const auto& c : s.checks) {
      js["checks"].push_back({{"name", c.name},
                              {"measured", c.measured},
                              {"bound", c.bound},
                              {"slack", c.slack},
                              {"passed", c.passed}});
    }
    all = all && s.passed();
    suites.push_back(std::move(js));
  }
  r.outputs["suites"] = std::move(suites);
  r.outputs["passed"] = all;
  out.exit_code = all ? kSuccess : kVerificationFailure;
  return out;
}

Outcome cmd_bench(const Options& o) {
  Outcome out;
  auto& r = out.report;
  r.command = "bench";
  r.inputs["size"] = o.bench_size;
  r.inputs["seed"] = o.seed;
  require(o.bench_size >= 16, ErrorKind::dimension_mismatch, "--size must be >= 16");
  const Index n = o.bench_size;
  const Index k = 40;
  const SparseMatrix a = synthetic::sparsify(synthetic::gaussian(n, n, o.seed), 0.01);
  const MatrixXd b = synthetic::gaussian(n, k, o.seed + 1);
  const SparseMatrix y = synthetic::sparsify(synthetic::gaussian(n, k, o.seed + 2), 0.05);
  const MatrixXd w = synthetic::gaussian(k, n, o.seed + 3);

  auto time = [&](const std::string& name, auto&& fn) {
    for (Exec e : {Exec::serial, Exec::parallel}) {
      Stopwatch sw;
      fn(e);
      r.timing(name + (e == Exec::serial ? ".serial" : ".parallel"), sw.seconds());
    }
  };
  time("spmm", [&](Exec e) { (void)kernels::spmm(a, b, e); });
  time("spmm_transposed", [&](Exec e) { (void)kernels::spmm_transposed(a, b, e); });
  time("lowrank_outer", [&](Exec e) { (void)kernels::lowrank_outer(b, y, 1.0, e); });
  time("lowrank_residual_sq", [&](Exec e) { (void)kernels::lowrank_residual_sq(a, y, w, e); });
  r.outputs["threads"] = max_threads();
  return out;
}

Outcome dispatch(const std::string& command, const Options& o) {
  try {
    if (command == "scr") return cmd_scr(o);
    if (command == "phi") return cmd_phi(o);
    if (command == "cond") return cmd_cond(o);
    if (command == "eda") return cmd_eda(o);
    if (command == "verify") return cmd_verify(o);
    if (command == "bench") return cmd_bench(o);
    fail(ErrorKind::dimension_mismatch, "unknown command '" + command + "'");
  } catch (const ComputationError& e) {
    Outcome out;
    out.report.command = command;
    out.report.outputs["error"] = {{"kind", std::string(to_string(e.kind()))},
                                   {"message", e.context()}};
    out.exit_code = kInputError;
    return out;
  }
}

}  // namespace philr::cli
