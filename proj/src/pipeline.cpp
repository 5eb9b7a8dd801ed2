#include "rhlab/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rhlab/eigensolver.hpp"
#include "rhlab/elliptic_operator.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/fp_calibration.hpp"
#include "rhlab/norms.hpp"
#include "rhlab/potentials.hpp"
#include "rhlab/rhi.hpp"

namespace rhlab {

namespace {

using json = nlohmann::json;

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json point(const Point& p, int dim) {
  json a = json::array();
  for (int d = 0; d < dim; ++d) a.push_back(p[d]);
  return a;
}

std::string csv_number(double v) { return std::isnan(v) ? "nan" : format_number(v); }

json calibration_record(const CnEstimate& est, const CalibrationConfig& cal, double cn, double max_quotient) {
  json j;
  j["value"] = cn;
  j["estimate"] = est.value;
  j["safety_factor"] = cal.safety_factor;
  j["r"] = est.r;
  j["n"] = est.n;
  j["bank_seed"] = est.bank_seed;
  j["bank_size"] = est.bank_size;
  j["test_index"] = est.test_index;
  j["test_label"] = est.test_label;
  j["weight"] = est.potential;
  j["weight_norm"] = est.weight_norm;
  j["degenerate"] = est.degenerate;
  j["max_weighted_quotient"] = max_quotient;
  j["grid"] = {{"nodes_per_axis", cal.nodes_per_axis}, {"half_width", cal.half_width}};
  return j;
}

}  // namespace

struct Pipeline::State {
  RunConfig config;
  Command command;
  Grid grid;
  DomainRef mask;
  CoefficientField coefficient;
  PotentialSpec potential;
};

Pipeline::Pipeline(const RunConfig& config, Command command) : state_(std::make_unique<State>()) {
  validate(config, command);
  State& s = *state_;
  s.config = config;
  s.command = command;
  s.grid = make_grid(config);
  s.mask = build_domain(s.grid, make_shape(config));
  s.coefficient = make_coefficient(config);
  s.potential = make_potential(config, s.grid);
}

Pipeline::~Pipeline() = default;

PipelineResult Pipeline::execute(bool dump_matrix, std::ostream* log) {
  const State& s = *state_;
  const RunConfig& cfg = s.config;
  const int dim = s.grid.dim;
  const Command cmd = s.command;
  PipelineResult result;
  json report;
  report["command"] = to_string(cmd);
  report["config"] = serialize(cfg);

  json domain;
  domain["dimension"] = dim;
  domain["shape"] = cfg.domain.shape;
  domain["lower"] = point(cfg.domain.lower, dim);
  domain["upper"] = point(cfg.domain.upper, dim);
  if (cfg.domain.shape == "ball") {
    domain["center"] = point(cfg.domain.center, dim);
    domain["radius"] = cfg.domain.radius;
  }
  domain["nodes_per_axis"] = s.grid.nodes_per_axis;
  domain["spacing"] = point(s.grid.spacing, dim);
  domain["h"] = s.grid.max_spacing();
  domain["interior_nodes"] = s.mask->interior_count();
  domain["measure"] = s.mask->measure();
  domain["diameter"] = s.mask->diameter();
  report["domain"] = domain;
  json pot;
  pot["description"] = describe(s.potential);
  pot["singular_centers"] = json::array();
  for (const auto& sing : singularities(s.potential)) {
    pot["singular_centers"].push_back({{"center", point(sing.center, dim)}, {"exponent", sing.exponent}});
  }
  report["potential"] = pot;

  std::optional<SparseOperator> op;
  std::optional<EigenPair> pair;
  std::optional<MCNormEstimate> mc;
  std::optional<double> cn;
  std::optional<BoundConstants> constants;
  bool failed = false;

  auto stage = [&](const char* name, const std::function<void()>& body) {
    if (failed) return;
    const auto start = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const Error& e) {
      failed = true;
      result.exit_code = exit_code(e.kind());
      json err;
      err["stage"] = name;
      err["kind"] = to_string(e.kind());
      err["message"] = e.what();
      if (const auto* se = dynamic_cast<const SolverError*>(&e)) err["final_residual"] = number(se->final_residual());
      report["error"] = err;
    } catch (const std::exception& e) {
      failed = true;
      result.exit_code = 1;
      report["error"] = {{"stage", name}, {"kind", "internal"}, {"message", e.what()}};
    }
    if (log) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      *log << "stage " << name << ": " << secs << " s" << (failed ? " (failed)" : "") << '\n';
    }
  };

  auto assemble_stage = [&] {
    stage("assemble", [&] {
      const ScalarField v = sample_potential(s.potential, *s.mask);
      op.emplace(assemble(s.mask, s.coefficient, v));
      const CsrMatrix& a = op->matrix();
      json j;
      j["coefficient"] = s.coefficient.description;
      j["symmetric"] = op->symmetric();
      j["ellipticity"] = op->ellipticity();
      j["nonzeros"] = a.nonzeros();
      j["size"] = a.rows();
      j["z_matrix"] = a.is_z_matrix();
      j["max_asymmetry_relative"] = a.max_asymmetry() / a.max_abs();
      report["operator"] = j;
      if (dump_matrix) {
        std::ostringstream m;
        a.write_matrix_market(m);
        result.files["matrix.mtx"] = m.str();
      }
    });
  };

  auto eigen_stage = [&] {
    stage("eigensolve", [&] {
      const EigenResult er = smallest_eigenpairs(*op, cfg.eigenpairs, cfg.solver);
      json j;
      j["converged"] = er.converged;
      j["failure"] = er.failure;
      j["shift"] = er.shift;
      j["tolerance"] = cfg.solver.tolerance;
      j["selected_index"] = cfg.eigen_index;
      j["pairs"] = json::array();
      for (std::size_t k = 0; k < er.pairs.size(); ++k) {
        const EigenPair& p = er.pairs[k];
        j["pairs"].push_back(
            {{"index", k}, {"lambda", p.lambda}, {"residual", p.residual}, {"iterations", p.iterations}});
      }
      report["eigen"] = j;
      if (!er.converged || static_cast<int>(er.pairs.size()) <= cfg.eigen_index) {
        throw SolverError(er.failure.empty() ? "selected eigenpair missing" : er.failure,
                          er.pairs.empty() ? std::nan("") : er.pairs.back().residual);
      }
      pair = er.pairs[static_cast<std::size_t>(cfg.eigen_index)];
      if (cfg.eigen_csv) {
        std::ostringstream csv;
        csv << "node,x,y,z,u\n";
        for (std::size_t i = 0; i < pair->u.size(); ++i) {
          const Point x = s.mask->coordinate(i);
          csv << i << ',' << csv_number(x[0]) << ',' << csv_number(x[1]) << ',' << csv_number(x[2]) << ','
              << csv_number(pair->u[i]) << '\n';
        }
        result.files["eigen.csv"] = csv.str();
      }
    });
  };

  auto mc_stage = [&] {
    stage("mc-norm", [&] {
      mc = mc_norm(s.potential, cfg.mc, *s.mask);
      json j;
      j["alpha"] = cfg.mc.alpha;
      j["r"] = cfg.mc.r;
      j["value"] = mc->value;
      j["center"] = point(mc->center, dim);
      j["radius"] = mc->radius;
      j["center_is_singular"] = mc->center_is_singular;
      j["rho_min"] = mc->rho_min;
      j["rho_max"] = mc->rho_max;
      j["center_stride"] = mc->center_stride;
      j["radii_per_octave"] = cfg.mc.radii_per_octave;
      j["centers_scanned"] = mc->centers_scanned;
      j["radii_scanned"] = mc->radii_scanned;
      std::optional<double> analytic;
      try {
        analytic = mc_norm_analytic(s.potential, cfg.mc.alpha, cfg.mc.r, dim);
      } catch (const HypothesisError&) {
      }
      j["analytic"] = analytic ? json(*analytic) : json(nullptr);
      report["mc_norm"] = j;
    });
  };

  auto calibration_stage = [&](bool recompute) {
    stage("calibration", [&] {
      const CalibrationConfig& cal = cfg.calibration;
      json j;
      if (cal.cn && !recompute) {
        cn = *cal.cn;
        j["cn"] = *cn;
        j["estimate"] = cal.estimate ? json(*cal.estimate) : json(nullptr);
        j["safety_factor"] = cal.safety_factor;
        j["source"] = cal.source.empty() ? "config" : cal.source;
        report["calibration"] = j;
        return;
      }
      const std::vector<double> extents(static_cast<std::size_t>(dim), 2.0 * cal.half_width);
      const std::vector<double> origin(static_cast<std::size_t>(dim), -cal.half_width);
      const Grid grid = build_grid(dim, extents, cal.nodes_per_axis, origin);
      const DomainRef mask = build_domain(grid, DomainShape::box(grid));
      const PotentialSpec weight = offset_singular_centers(PowerLaw{1.0, Point{}, 2.0}, grid);
      const FpWeight w = make_fp_weight(weight, cal.r, *mask);
      const TestBank bank = make_test_bank(mask, static_cast<std::size_t>(cal.bank_size), cfg.seed);
      const CnEstimate est = estimate_cn(bank, {w});
      double max_quotient = 0.0;
      for (const auto& g : bank.fields) {
        max_quotient = std::max(max_quotient, weighted_dirichlet_quotient(g, w.samples, *mask));
      }
      cn = est.value * cal.safety_factor;
      const json record = calibration_record(est, cal, *cn, max_quotient);
      result.files["calibration.json"] = record.dump(2) + "\n";
      j = record;
      j["cn"] = *cn;
      j["source"] = "computed";
      report["calibration"] = j;
    });
  };

  auto constants_stage = [&] {
    stage("constants", [&] {
      constants = make_bound_constants(dim, op->ellipticity(), pair->lambda, cfg.mc.alpha, cfg.mc.r, *cn, mc->value);
      json j;
      j["n"] = constants->n;
      j["ellipticity"] = constants->ellipticity;
      j["lambda"] = constants->lambda;
      j["alpha"] = constants->alpha;
      j["r"] = constants->r;
      j["cn"] = constants->cn;
      j["mc"] = constants->mc;
      j["c_alpha"] = constants->c_alpha;
      j["h"] = s.grid.max_spacing();
      report["constants"] = j;
    });
  };

  auto rhi_stage = [&] {
    stage("verify", [&] {
      const RHIReport rep = verify_rhi(pair->u, *constants, cfg.queries, s.grid);
      json rows = json::array();
      std::ostringstream csv;
      csv << "p,q,norm_p,norm_q,ratio,factor,fitted_C\n";
      for (const RHIRow& r : rep.rows) {
        json row;
        row["part"] = r.part;
        row["p"] = number(r.p);
        row["q"] = number(r.q);
        if (r.error.empty()) {
          row["norm_p"] = r.norm_p;
          row["norm_q"] = r.norm_q;
          row["ratio"] = r.ratio;
          row["factor"] = r.factor;
          row["telescoped_factor"] = r.telescoped_factor;
          row["fitted_C"] = r.fitted_c;
          row["satisfied"] = r.satisfied;
          if (r.part == "u") {
            csv << csv_number(r.p) << ',' << csv_number(r.q) << ',' << csv_number(r.norm_p) << ','
                << csv_number(r.norm_q) << ',' << csv_number(r.ratio) << ',' << csv_number(r.factor) << ','
                << csv_number(r.fitted_c) << '\n';
          }
        } else {
          row["error"] = r.error;
        }
        rows.push_back(row);
      }
      json j;
      j["rows"] = rows;
      j["max_fitted_C"] = rep.max_fitted_c;
      j["max_fitted_C_parts"] = rep.max_fitted_c_parts;
      j["decomposition_defect"] = rep.decomposition_defect;
      j["eigen_index"] = cfg.eigen_index;
      report["rhi"] = j;
      result.files["rhi.csv"] = csv.str();
    });
  };

  auto moser_stage = [&] {
    stage("moser", [&] {
      const SignedParts parts = signed_parts(pair->u);
      const MoserTrace t = moser_trace(parts.positive, cfg.moser.p, *constants, cfg.moser.levels, s.grid);
      json rows = json::array();
      std::ostringstream csv;
      csv << "i,tau,norm,step_ratio,step_bound,implied_constant\n";
      for (const MoserStep& st : t.rows) {
        rows.push_back({{"i", st.i},
                        {"tau", st.tau},
                        {"norm", st.norm},
                        {"step_ratio", st.step_ratio},
                        {"step_bound", st.step_bound},
                        {"implied_constant", st.implied_constant}});
        csv << st.i << ',' << csv_number(st.tau) << ',' << csv_number(st.norm) << ',' << csv_number(st.step_ratio)
            << ',' << csv_number(st.step_bound) << ',' << csv_number(st.implied_constant) << '\n';
      }
      json j;
      j["p"] = t.p;
      j["omega"] = t.omega;
      j["rows"] = rows;
      j["max_implied_constant"] = t.max_implied;
      j["min_implied_constant"] = t.min_implied;
      j["variation"] = t.variation;
      j["bound_product"] = t.bound_product;
      j["bound_product_20"] = t.bound_product_20;
      j["bound_product_limit"] = t.bound_product_limit;
      j["closed_form"] = t.closed_form;
      j["exponent_sum_20"] = t.exponent_sum_20;
      j["exponent_limit"] = t.exponent_limit;
      report["moser"] = j;
      result.files["moser.csv"] = csv.str();
    });
  };

  auto payne_rayner_stage = [&] {
    stage("payne-rayner", [&] {
      const PayneRaynerRecord rec = payne_rayner_check(s.mask, cfg.solver);
      report["payne_rayner"] = {{"lambda", rec.lambda},
                                {"norm1", rec.norm1},
                                {"norm2", rec.norm2},
                                {"ratio_sq", rec.ratio_sq},
                                {"lambda_over_4pi", rec.lambda_over_4pi},
                                {"gap", rec.gap},
                                {"residual", rec.residual},
                                {"h", s.grid.max_spacing()}};
    });
  };

  const bool plain_laplacian = [&] {
    if (cfg.coefficient.kind != "identity") return false;
    for (const auto& t : cfg.potential) {
      if (t.kind != "zero") return false;
    }
    return true;
  }();

  switch (cmd) {
    case Command::solve:
      assemble_stage();
      eigen_stage();
      break;
    case Command::mc_norm:
      mc_stage();
      break;
    case Command::fp_calibrate:
      calibration_stage(true);
      break;
    case Command::verify:
    case Command::moser:
      assemble_stage();
      eigen_stage();
      mc_stage();
      calibration_stage(false);
      constants_stage();
      if (cmd == Command::verify) {
        rhi_stage();
      } else {
        moser_stage();
      }
      break;
    case Command::payne_rayner:
      payne_rayner_stage();
      break;
    case Command::run:
      assemble_stage();
      eigen_stage();
      mc_stage();
      if (dim >= 3) {
        calibration_stage(false);
        constants_stage();
        if (!cfg.queries.empty()) rhi_stage();
        if (cfg.moser.enabled) moser_stage();
      } else if (plain_laplacian) {
        payne_rayner_stage();
      }
      break;
  }

  report["status"] = failed ? "error" : "ok";
  report["exit_code"] = result.exit_code;
  result.files["report.json"] = report.dump(2) + "\n";
  return result;
}

void write_outputs(const PipelineResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : result.files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    out << content;
  }
}

}  // namespace rhlab
