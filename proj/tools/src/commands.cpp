#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "rasch/errors.hpp"
#include "rasch/format.hpp"
#include "rasch/geometry.hpp"
#include "rasch/optimality.hpp"
#include "rasch/optimizer.hpp"
#include "rasch/parallel.hpp"
#include "rasch/symmetry.hpp"

namespace rasch::cli {

namespace {

std::string subset_name(Subset s) { return "{" + subset_label(s) + "}"; }

std::string monomial(const MonomialTerm& term, const InteractionModel& m) {
  std::string text;
  for (std::size_t idx : term.support) {
    if (!text.empty()) text += '*';
    text += "mu" + subset_name(m.subset(idx));
  }
  return text.empty() ? "1" : text;
}

json verdict_json(const OptimalityVerdict& v) {
  json violated = json::array();
  for (Subset c : v.violated_labels) violated.push_back(subset_label(c));
  return {{"optimal", v.optimal},
          {"boundary", v.boundary},
          {"max_value", number(v.max_directional_value)},
          {"worst", v.worst_setting.to_string()},
          {"violated", violated}};
}

}  // namespace

void Command::attach(CLI::App* sub) {
  app = sub;
  sub->add_option("--out", out, "output file; the manifest goes to <out>.manifest.json");
}

// ---------------------------------------------------------------- inequalities

struct Inequalities : Command {
  ModelOptions model;
  std::string rule = "as-stated";
  bool terms = false;

  Inequalities(CLI::App& root) {
    attach(root.add_subcommand("inequalities", "corner-design optimality inequalities"));
    model.add_to(app);
    app->add_option("--rule", rule, "product rule: as-stated or derived")
        ->check(CLI::IsMember({"as-stated", "derived"}));
    app->add_flag("--terms", terms, "list the monomials of every inequality");
  }

  int run(Run& r) override {
    const auto [m, theta_in] = model.resolve(r, 2, 1);
    const ParameterVector theta = theta_in.with_zero_offset();
    const ProductRule pr = rule == "derived" ? ProductRule::kSaturatedDerived : ProductRule::kAsStated;
    const OptimalityVerdict v = is_corner_optimal_by_theorem(theta, m, pr);
    json rows = json::array();
    std::vector<int> sizes;
    for (const MonomialInequality& q : corner_inequalities(m, pr)) {
      const double lhs = evaluate_inequality(q, theta);
      json row = {{"c", subset_label(q.label)},
                  {"size", cardinality(q.label)},
                  {"lhs", number(lhs)},
                  {"holds", lhs <= 1.0 + kTheoremTolerance}};
      if (terms) {
        json list = json::array();
        for (const MonomialTerm& t : q.terms) {
          list.push_back({{"coefficient", t.coefficient}, {"monomial", monomial(t, m)}});
        }
        row["terms"] = list;
      }
      rows.push_back(std::move(row));
    }
    for (Subset c : v.violated_labels) {
      const int size = cardinality(c);
      if (std::find(sizes.begin(), sizes.end(), size) == sizes.end()) sizes.push_back(size);
    }
    std::sort(sizes.begin(), sizes.end());
    json doc = {{"k", m.k()},
                {"d", m.d()},
                {"p", m.p()},
                {"rule", rule},
                {"verdict", v.optimal ? "optimal" : "not-optimal"},
                {"boundary", v.boundary},
                {"max_lhs", number(v.max_directional_value)},
                {"violated_sizes", sizes},
                {"inequalities", rows}};
    r.emit(doc.dump(2) + "\n");
    return 0;
  }
};

// ---------------------------------------------------------------- optimize

struct Optimize : Command {
  ModelOptions model;
  OptimizerConfig cfg;
  bool no_elimination = false;
  std::string seed_design;

  Optimize(CLI::App& root) {
    attach(root.add_subcommand("optimize", "D-optimal approximate design"));
    model.add_to(app);
    app->add_option("--max-iterations", cfg.max_iterations)->check(CLI::PositiveNumber);
    app->add_option("--kw-tolerance", cfg.kw_tolerance, "stop at max d(x) <= p (1 + tol)");
    app->add_option("--prune-threshold", cfg.prune_threshold);
    app->add_option("--structure-tolerance", cfg.structure_tolerance);
    app->add_flag("--no-elimination", no_elimination, "keep settings that cannot be in the support");
    app->add_option("--seed-design", seed_design, "starting design JSON");
  }

  int run(Run& r) override {
    const auto [m, theta] = model.resolve(r, 2, 1);
    cfg.eliminate_nonsupport = !no_elimination;
    if (!seed_design.empty()) {
      r.add_input(seed_design);
      cfg.seed = read_design_file(seed_design);
    }
    cfg.validate();
    const OptimizerResult res = optimize_design(theta, m, cfg);
    json report = {{"iterations", res.iterations},
                   {"converged", res.converged},
                   {"final_kw_max", number(res.final_kw_max)},
                   {"kw_bound", number(static_cast<double>(m.p()) * (1.0 + cfg.kw_tolerance))},
                   {"log_det", number(res.log_det)},
                   {"structure", to_string(res.structure)},
                   {"support_size", res.design.support_size()},
                   {"monotone", res.monotone},
                   {"within_caratheodory_bound", res.within_caratheodory_bound},
                   {"prune_events", res.prune_events},
                   {"prune_rollbacks", res.prune_rollbacks},
                   {"eliminated_points", res.eliminated_points},
                   {"diagnostic", res.diagnostic}};
    if (r.out_path.empty()) {
      r.emit(json{{"design", design_json(res.design)}, {"report", report}}.dump(2) + "\n");
    } else {
      r.emit(design_json(res.design).dump(2) + "\n");
      r.emit(report.dump(2) + "\n", ".report.json");
    }
    return res.converged ? 0 : 1;
  }
};

// ---------------------------------------------------------------- certify

struct Certify : Command {
  ModelOptions model;
  std::string design;
  double tolerance = kKwTolerance;

  Certify(CLI::App& root) {
    attach(root.add_subcommand("certify", "equivalence-theorem check of a design"));
    model.add_to(app);
    app->add_option("--design", design, "design JSON")->required();
    app->add_option("--tolerance", tolerance, "accept max d(x) <= p (1 + tol)");
  }

  int run(Run& r) override {
    const auto [m, theta] = model.resolve(r, 2, 1);
    r.add_input(design);
    const Design w = read_design_file(design);
    const OptimalityVerdict v = kw_certificate(w, theta, m, tolerance);
    const std::vector<double> d = sensitivity_function(w, theta, m);
    json sens = json::object();
    for (std::size_t x = 0; x < d.size(); ++x) {
      sens[BinarySetting(m.k(), x).to_string()] = number(d[x]);
    }
    json doc = verdict_json(v);
    doc["p"] = m.p();
    doc["bound"] = number(static_cast<double>(m.p()) * (1.0 + tolerance));
    doc["sensitivity"] = sens;
    r.emit(doc.dump(2) + "\n");
    return 0;
  }
};

// ---------------------------------------------------------------- center-path

struct CenterPathCmd : Command {
  ModelOptions model;
  std::string grid;
  bool cold = false;
  std::string matrices;

  CenterPathCmd(CLI::App& root) {
    attach(root.add_subcommand("center-path", "analytic centers along mu_i = lambda"));
    model.add_to(app, false);
    app->add_option("--lambda", grid, "grid: a,b,c or from:to:step")->required();
    app->add_flag("--cold", cold, "start every center from the vertex centroid");
    app->add_option("--matrices", matrices, "also write S(u*) per row as JSON");
  }

  int run(Run& r) override {
    const InteractionModel m(model.k.value_or(2), model.d.value_or(1));
    const std::vector<double> values = parse_grid(grid, "--lambda");
    const CenterPath path =
        center_path([&](double l) { return diagonal_family(m, l); }, m, values, !cold);
    std::ostringstream csv;
    const Eigen::Index n = path.rows.front().center.coordinates.size();
    csv << "param";
    for (Eigen::Index i = 1; i <= n; ++i) csv << ",coord_" << i;
    csv << ",log_det,status,inside\n";
    json exported = json::array();
    for (const CenterPathRow& row : path.rows) {
      const CenterResult& c = row.center;
      csv << format_number(row.parameter);
      for (Eigen::Index i = 0; i < n; ++i) csv << ',' << format_number(c.coordinates(i));
      csv << ',' << format_number(c.log_det) << ',' << to_string(c.status) << ','
          << (c.inside_polytope ? 1 : 0) << '\n';
      exported.push_back({{"param", number(row.parameter)}, {"matrix", matrix_rows(c.matrix.dense())}});
    }
    r.emit(csv.str());
    if (!matrices.empty()) {
      std::ofstream out(matrices);
      out << exported.dump(2) << '\n';
      if (!out) throw Error("cannot write '" + matrices + "'");
    }
    return 0;
  }
};

// ---------------------------------------------------------------- region-slice

struct RegionSlice : Command {
  ModelOptions model;
  std::string s_grid;
  std::string t_grid;
  int threads = 1;

  RegionSlice(CLI::App& root) {
    attach(root.add_subcommand("region-slice", "symmetric (s, t) slice of the corner region"));
    model.add_to(app, false);
    app->add_option("--s-grid", s_grid, "a,b,c or from:to:step")->required();
    app->add_option("--t-grid", t_grid, "a,b,c or from:to:step")->required();
    app->add_option("--threads", threads)->check(CLI::PositiveNumber);
  }

  int run(Run& r) override {
    const InteractionModel m(model.k.value_or(10), model.d.value_or(2));
    const auto rows =
        region_slice(m, parse_grid(s_grid, "--s-grid"), parse_grid(t_grid, "--t-grid"), threads);
    std::ostringstream csv;
    write_region_slice_csv(csv, m, rows);
    r.emit(csv.str());
    return 0;
  }
};

// ---------------------------------------------------------------- probe

struct Probe : Command {
  ModelOptions model;
  std::string s_range = "0:1";
  std::string t_range = "0:1";
  std::uint64_t samples = 100000;
  std::uint64_t seed = 2024;
  int threads = 1;

  Probe(CLI::App& root) {
    attach(root.add_subcommand("probe", "sampled redundancy of each inequality size"));
    model.add_to(app, false);
    app->add_option("--s-range", s_range, "lo:hi, sampled on (lo, hi]");
    app->add_option("--t-range", t_range, "lo:hi, sampled on (lo, hi]");
    app->add_option("--samples", samples)->check(CLI::PositiveNumber);
    app->add_option("--seed", seed);
    app->add_option("--threads", threads)->check(CLI::PositiveNumber);
  }

  int run(Run& r) override {
    r.seed = seed;
    const InteractionModel m(model.k.value_or(10), model.d.value_or(2));
    const auto [s_lo, s_hi] = parse_range(s_range, "--s-range");
    const auto [t_lo, t_hi] = parse_range(t_range, "--t-range");
    const auto report = redundancy_probe(m, {s_lo, s_hi, t_lo, t_hi}, samples, seed, threads);
    json doc = json::object();
    for (const ProbeEntry& e : report) {
      doc[std::to_string(e.c)] = {
          {"redundant_in_region", e.redundant_in_region},
          {"witness", e.witness ? json::array({number(e.witness->first), number(e.witness->second)})
                                : json(nullptr)},
          {"witness_count", e.witness_count}};
    }
    r.emit(doc.dump(2) + "\n");
    return 0;
  }
};

// ---------------------------------------------------------------- compare

struct Compare : Command {
  ModelOptions model;
  std::size_t points = 0;
  std::string beta_range = "-3:1";
  std::uint64_t seed = 1;
  int threads = 1;

  Compare(CLI::App& root) {
    attach(root.add_subcommand("compare",
                               "theorem readings against the equivalence-theorem certificate"));
    model.add_to(app);
    app->add_option("--points", points, "random beta grid size; omit for a single point");
    app->add_option("--beta-range", beta_range, "lo:hi for random beta_A, A nonempty");
    app->add_option("--seed", seed);
    app->add_option("--threads", threads)->check(CLI::PositiveNumber);
  }

  static json lhs_by_label(const InteractionModel& m, const std::vector<double>& lhs) {
    json out = json::object();
    const auto system = corner_inequalities(m);
    for (std::size_t i = 0; i < system.size(); ++i) out[subset_label(system[i].label)] = number(lhs[i]);
    return out;
  }

  int run(Run& r) override {
    if (points == 0) return single(r);
    r.seed = seed;
    const InteractionModel m(model.k.value_or(2), model.d.value_or(1));
    const auto [lo, hi] = parse_range(beta_range, "--beta-range");
    if (!(lo < hi)) throw UsageError("--beta-range: need lo < hi");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<std::vector<double>> betas(points, std::vector<double>(m.p(), 0.0));
    for (auto& b : betas) {
      for (std::size_t i = 1; i < b.size(); ++i) b[i] = dist(rng);
    }
    std::vector<CornerComparison> results(points);
    parallel_for(points, threads, [&](std::size_t i) {
      results[i] = compare_corner_verdicts(ParameterVector(m, betas[i]), m);
    });
    std::size_t stated_agree = 0;
    std::size_t derived_agree = 0;
    json disagreements = json::array();
    for (std::size_t i = 0; i < points; ++i) {
      const CornerComparison& c = results[i];
      const bool a = c.as_stated.optimal == c.certificate.optimal;
      const bool b = c.derived.optimal == c.certificate.optimal;
      stated_agree += a ? 1 : 0;
      derived_agree += b ? 1 : 0;
      if (a && b) continue;
      disagreements.push_back({{"index", i},
                               {"beta", numbers(betas[i])},
                               {"as_stated", c.as_stated.optimal},
                               {"derived", c.derived.optimal},
                               {"certificate", c.certificate.optimal},
                               {"as_stated_lhs", lhs_by_label(m, c.as_stated_lhs)},
                               {"derived_lhs", lhs_by_label(m, c.derived_lhs)}});
    }
    json doc = {{"k", m.k()},
                {"d", m.d()},
                {"points", points},
                {"as_stated_agreement", stated_agree},
                {"derived_agreement", derived_agree},
                {"disagreements", disagreements}};
    r.emit(doc.dump(2) + "\n");
    return 0;
  }

  int single(Run& r) {
    const auto [m, theta] = model.resolve(r, 2, 1);
    const CornerComparison c = compare_corner_verdicts(theta, m);
    const auto saturated = saturated_kw_values(corner_design(m), theta, m);
    std::vector<double> certificate_lhs;
    for (const MonomialInequality& q : corner_inequalities(m)) certificate_lhs.push_back(saturated[q.label]);
    json doc = {{"k", m.k()},
                {"d", m.d()},
                {"as_stated", verdict_json(c.as_stated)},
                {"derived", verdict_json(c.derived)},
                {"certificate", verdict_json(c.certificate)},
                {"agree", c.agree()},
                {"as_stated_lhs", lhs_by_label(m, c.as_stated_lhs)},
                {"derived_lhs", lhs_by_label(m, c.derived_lhs)},
                {"certificate_lhs", lhs_by_label(m, certificate_lhs)}};
    r.emit(doc.dump(2) + "\n");
    return 0;
  }
};

// ---------------------------------------------------------------- symmetry

struct Symmetry : Command {
  ModelOptions model;
  std::string element;
  std::string design;
  bool zero_offset = false;
  bool orbit = false;

  Symmetry(CLI::App& root) {
    attach(root.add_subcommand("symmetry", "group action on settings, parameters and designs"));
    model.add_to(app);
    app->add_option("--g", element, "group element, e.g. 'perm=2,1,3;flips=1'")->required();
    app->add_option("--design", design, "design JSON; uniform when omitted");
    app->add_flag("--zero-offset", zero_offset, "renormalize beta_{} = 0 after the action");
    app->add_flag("--orbit", orbit, "list the distinct images of beta over the group");
  }

  int run(Run& r) override {
    const auto [m, theta] = model.resolve(r, 2, 1);
    const GroupElement g = GroupElement::parse(element, m.k());
    Design w = Design::uniform(m.k());
    if (!design.empty()) {
      r.add_input(design);
      w = read_design_file(design);
    }
    const Representation rep = representation_matrix(g, m);
    const ParameterVector moved = act_on_parameters(g, theta, m, zero_offset);
    const TransformationResidual res = verify_transformation(g, w, theta, m);
    auto beta_json = [&](const ParameterVector& v) {
      json out = json::object();
      for (std::size_t i = 0; i < m.p(); ++i) out[subset_label(m.subset(i))] = number(v.beta(i));
      return out;
    };
    json doc = {{"g", g.to_string()},
                {"q", matrix_rows(rep.q.cast<double>())},
                {"determinant", rep.determinant},
                {"beta", beta_json(moved)},
                {"design", design_json(act_on_design(g, w))},
                {"residual",
                 {{"max_entry", number(res.max_entry_residual)},
                  {"det_relative_difference", number(res.det_relative_difference)}}}};
    if (orbit) {
      json list = json::array();
      for (const ParameterVector& v : parameter_orbit(theta, m)) list.push_back(beta_json(v));
      doc["orbit_size"] = list.size();
      doc["orbit"] = list;
    }
    r.emit(doc.dump(2) + "\n");
    return 0;
  }
};

std::vector<std::unique_ptr<Command>> register_commands(CLI::App& root) {
  std::vector<std::unique_ptr<Command>> all;
  all.push_back(std::make_unique<Inequalities>(root));
  all.push_back(std::make_unique<Optimize>(root));
  all.push_back(std::make_unique<Certify>(root));
  all.push_back(std::make_unique<CenterPathCmd>(root));
  all.push_back(std::make_unique<RegionSlice>(root));
  all.push_back(std::make_unique<Probe>(root));
  all.push_back(std::make_unique<Compare>(root));
  all.push_back(std::make_unique<Symmetry>(root));
  return all;
}

}  // namespace rasch::cli
