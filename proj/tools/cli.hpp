#pragma once

// Command-line front end: fit, predict, and the four studies.
// Exit codes: 0 success, 2 usage or validation, 1 runtime failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparsekern/sparsekern.hpp"

namespace sparsekern::cli {

namespace fs = std::filesystem;

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::size_t parse_size(const std::string& s) {
  const double v = parse_double(s);
  require(v >= 0.0 && v == static_cast<double>(static_cast<std::uint64_t>(v)),
          "expected a nonnegative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

inline std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_size(part));
  require(!out.empty(), "empty list");
  return out;
}

/// "lo:hi:count" for a geometric grid, or an explicit comma list.
inline std::vector<double> parse_lambda_grid(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() == 3) return logspace(parse_double(parts[0]), parse_double(parts[1]), parse_size(parts[2]));
  require(parts.size() == 1, "lambda grid must be lo:hi:count or a comma list");
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part));
  require(!out.empty(), "empty lambda grid");
  return out;
}

/// "regular:d", "binomial:p", "custom:pmf.json" (a JSON array, or an object with "pmf"), or "dense".
inline DegreeSpec parse_degree(const std::string& s, std::size_t l) {
  if (s == "dense") return DegreeSpec::regular(l, l);
  const auto colon = s.find(':');
  require(colon != std::string::npos, "degree spec must look like regular:d, binomial:p or custom:file.json");
  const std::string kind = s.substr(0, colon), arg = s.substr(colon + 1);
  if (kind == "regular") return DegreeSpec::regular(l, parse_size(arg));
  if (kind == "binomial") return DegreeSpec::binomial(l, parse_double(arg));
  if (kind == "custom") {
    std::ifstream in(arg);
    require(static_cast<bool>(in), "cannot open degree pmf file '" + arg + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw validation_error("degree pmf file '" + arg + "': " + e.what());
    }
    const auto& pmf_json = j.is_object() ? j.value("pmf", nlohmann::json{}) : j;
    require(pmf_json.is_array(), "degree pmf file must hold an array of probabilities");
    auto spec = DegreeSpec::custom(pmf_json.get<std::vector<double>>());
    require(spec.dim() == l, "custom degree pmf has support up to " + std::to_string(spec.dim()) +
                                 " but the data has l = " + std::to_string(l));
    return spec;
  }
  throw validation_error("unknown degree law '" + kind + "'");
}

/// "none", "phase", or "uniform:a1,a2".
inline BiasLaw parse_bias(const std::string& s) {
  if (s == "none") return BiasLaw::none();
  if (s == "phase") return BiasLaw::phase();
  if (s.rfind("uniform:", 0) == 0) {
    const auto ends = split(s.substr(8), ',');
    require(ends.size() == 2, "uniform bias needs two endpoints: uniform:a1,a2");
    return BiasLaw::uniform(parse_double(ends[0]), parse_double(ends[1]));
  }
  throw validation_error("unknown bias law '" + s + "' (expected none|phase|uniform:a1,a2)");
}

inline WeightLaw parse_weights(const std::string& s, double sigma, BiasLaw bias) {
  if (s == "gaussian-iso") return WeightLaw::gaussian_iso(sigma, bias);
  if (s == "gaussian-scaled") return WeightLaw::gaussian_scaled(sigma, bias);
  if (s == "rademacher") return WeightLaw::rademacher(sigma, bias);
  throw validation_error("unknown weight law '" + s + "' (expected gaussian-iso|gaussian-scaled|rademacher)");
}

inline CorruptionMode parse_mode(const std::string& s) {
  if (s == "per-coordinate") return CorruptionMode::per_coordinate;
  if (s == "per-sample") return CorruptionMode::per_sample;
  throw validation_error("unknown corruption mode '" + s + "' (expected per-coordinate|per-sample)");
}

inline std::string mode_name(CorruptionMode m) {
  return m == CorruptionMode::per_sample ? "per-sample" : "per-coordinate";
}

/// "p:sigma" pairs separated by commas.
inline std::vector<std::pair<double, double>> parse_configs(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  for (const auto& part : split(s, ',')) {
    const auto ps = split(part, ':');
    require(ps.size() == 2, "corruption config must be p:sigma, got '" + part + "'");
    out.emplace_back(parse_double(ps[0]), parse_double(ps[1]));
  }
  require(!out.empty(), "no corruption configs");
  return out;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw numerical_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

struct Model {
  SparseFeatureMap map;
  RidgeFit fit;
  std::vector<std::string> columns;
  std::string target;
};

inline nlohmann::json model_to_json(const Model& m) {
  return {{"format", "sparsekern-model"},
          {"version", 1},
          {"columns", m.columns},
          {"target", m.target},
          {"feature_map", m.map},
          {"fit", m.fit}};
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open model '" + path + "'");
  try {
    nlohmann::json j;
    in >> j;
    require(j.value("format", "") == "sparsekern-model", "'" + path + "' is not a model file");
    Model m{feature_map_from_json(j.at("feature_map")), ridge_fit_from_json(j.at("fit")),
            j.at("columns").get<std::vector<std::string>>(), j.at("target").get<std::string>()};
    require(m.columns.size() == m.map.input_dim(), "model column list does not match its feature map");
    require(static_cast<std::size_t>(m.fit.coefficients.size()) == m.map.output_dim(),
            "model coefficients do not match its feature map");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("malformed model '" + path + "': " + e.what());
  }
}

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  unsigned threads = 0;
};

struct FitArgs {
  std::string data, target, degree = "regular:1", nonlinearity = "cosine", weights = "gaussian-iso",
                            bias = "phase", lambda_grid = "1e-4:1e2:7";
  double sigma = 1.0;
  std::optional<double> lambda;
  std::size_t m = 1000, folds = 5;
};

inline int cmd_fit(const Globals& g, const FitArgs& a, std::ostream& out) {
  const auto ds = load_dataset(a.data, a.target);
  const auto l = static_cast<std::size_t>(ds.X.cols());
  const auto degrees = parse_degree(a.degree, l);
  const auto law = parse_weights(a.weights, a.sigma, parse_bias(a.bias));
  const auto nl = Nonlinearity::parse(a.nonlinearity);
  require(a.m >= 1, "--m must be positive");

  Model model{build_feature_map(l, a.m, degrees, law, nl, g.seed), {}, ds.columns, ds.target};
  const Matrix F = apply_features(model.map, ds.X);
  nlohmann::json metrics;
  if (a.lambda) {
    model.fit = ridge_fit(F, ds.y, *a.lambda);
  } else {
    const auto cv = ridge_cv(F, ds.y, parse_lambda_grid(a.lambda_grid), a.folds, derive_seed(g.seed, {1}));
    model.fit = cv.fit;
    metrics["cv"] = {{"folds", a.folds}, {"lambdas", cv.lambdas}, {"mean_validation_mse", cv.mean_validation_mse}};
  }
  metrics["n"] = ds.X.rows();
  metrics["l"] = l;
  metrics["m"] = a.m;
  metrics["degree"] = degrees.to_string();
  metrics["nonlinearity"] = nl.name();
  metrics["weights"] = law.name();
  metrics["lambda"] = model.fit.lambda;
  metrics["train_mse"] = model.fit.diagnostics.train_mse;
  metrics["train_r2"] = model.fit.diagnostics.train_r2;
  metrics["seed"] = g.seed;

  const fs::path dir(g.out_dir);
  write_json(dir / "model.json", model_to_json(model));
  write_json(dir / "metrics.json", metrics);
  out << "train_r2," << format_double(model.fit.diagnostics.train_r2) << '\n';
  return 0;
}

struct PredictArgs {
  std::string model, data, out;
};

inline int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const auto model = load_model(a.model);
  auto csv = read_numeric_csv(a.data);
  Matrix X(csv.values.rows(), static_cast<Eigen::Index>(model.columns.size()));
  if (!csv.header.empty()) {
    for (const auto& h : csv.header)
      require(h == model.target || std::find(model.columns.begin(), model.columns.end(), h) != model.columns.end(),
              "data column '" + h + "' is not a model input");
    for (std::size_t k = 0; k < model.columns.size(); ++k) {
      const auto it = std::find(csv.header.begin(), csv.header.end(), model.columns[k]);
      require(it != csv.header.end(), "data is missing model input column '" + model.columns[k] + "'");
      X.col(static_cast<Eigen::Index>(k)) = csv.values.col(it - csv.header.begin());
    }
  }
  Table t({"prediction"});
  if (X.rows() > 0) {
    const Vector pred = model.fit.predict(apply_features(model.map, X));
    for (Eigen::Index i = 0; i < pred.size(); ++i) t.add_row({pred[i]});
  }
  if (a.out.empty()) {
    t.write(out);
  } else {
    const fs::path p(a.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw numerical_error("cannot write " + a.out);
    t.write(f);
  }
  return 0;
}

struct ConvergenceArgs {
  std::size_t l = 8, pairs = 200;
  std::string nonlinearity = "cosine", degree = "dense", weights = "gaussian-iso", bias = "phase",
              m_grid = "256,1024,4096,16384";
  double sigma = 1.0;
};

struct PolytestArgs {
  std::size_t l = 16, features = PolytestConfig{}.features, test_size = 10000, folds = 5;
  std::string d_grid = "1,3,10,16", n_grid = "100,200,300,400,600,800", lambda_grid = "1e-4:1e2:7",
              variance = "inv-sqrt-d";
};

struct StabilityArgs {
  std::size_t n = 800, l = 10, folds = 5;
  double p = 0.03, sigma = 6.0, test_fraction = 0.25;
  std::string mode = "per-coordinate", kernel_lambda_grid = "1e-3:1e3:7";
};

struct EigenArgs {
  std::size_t n = 800, l = 10;
  std::string configs = "0:6,0.03:6,0.2:6,0.5:6,0.03:2,0.03:10", mode = "per-coordinate";
};

inline int cmd_convergence(const Globals& g, const ConvergenceArgs& a) {
  ConvergenceConfig c;
  c.l = a.l;
  c.nonlinearity = Nonlinearity::parse(a.nonlinearity);
  if (a.degree != "dense") c.degrees = parse_degree(a.degree, a.l);
  c.law = parse_weights(a.weights, a.sigma, parse_bias(a.bias));
  c.m_grid = parse_size_list(a.m_grid);
  c.probe_pairs = a.pairs;
  c.seed = g.seed;
  const auto r = convergence_study(c);
  write_study(g.out_dir, "convergence", r.table(),
              {{"l", a.l}, {"nonlinearity", c.nonlinearity.name()}, {"degree", c.degree_spec().to_string()},
               {"weights", c.law.name()}, {"sigma", a.sigma}, {"bias", a.bias}, {"m_grid", c.m_grid},
               {"probe_pairs", a.pairs}, {"seed", g.seed}, {"slope", r.slope}});
  return 0;
}

inline int cmd_polytest(const Globals& g, const PolytestArgs& a) {
  PolytestConfig c;
  c.l = a.l;
  c.d_grid = parse_size_list(a.d_grid);
  c.n_grid = parse_size_list(a.n_grid);
  c.features = a.features;
  c.test_size = a.test_size;
  c.folds = a.folds;
  c.lambda_grid = parse_lambda_grid(a.lambda_grid);
  if (a.variance == "inv-sqrt-d")
    c.variance = PolyWeightVariance::inv_sqrt_d;
  else if (a.variance == "inv-d")
    c.variance = PolyWeightVariance::inv_d;
  else
    throw validation_error("unknown --variance '" + a.variance + "' (expected inv-sqrt-d|inv-d)");
  c.seed = g.seed;
  const auto r = polytest_study(c);
  write_study(g.out_dir, "polytest", r.table(),
              {{"l", a.l}, {"d_grid", c.d_grid}, {"n_grid", c.n_grid}, {"features", a.features},
               {"test_size", a.test_size}, {"folds", a.folds}, {"lambda_grid", c.lambda_grid},
               {"variance", a.variance}, {"noise_floor", r.noise_floor}, {"seed", g.seed}});
  return 0;
}

inline int cmd_stability(const Globals& g, const StabilityArgs& a) {
  StabilityConfig c;
  c.n = a.n;
  c.l = a.l;
  c.corruption = {a.p, a.sigma, parse_mode(a.mode)};
  c.test_fraction = a.test_fraction;
  c.folds = a.folds;
  c.kernel_lambda_grid = parse_lambda_grid(a.kernel_lambda_grid);
  c.seed = g.seed;
  const auto r = stability_study(c);
  write_study(g.out_dir, "stability", r.table(),
              {{"n", a.n}, {"l", a.l}, {"p", a.p}, {"sigma", a.sigma}, {"mode", a.mode},
               {"test_fraction", a.test_fraction}, {"n_train", r.n_train}, {"n_test", r.n_test},
               {"trim_threshold", c.trim_threshold}, {"huber_delta", c.huber_delta},
               {"kernel_c", c.kernel_c}, {"kernel_lambda_grid", c.kernel_lambda_grid},
               {"kernel_lambda", r.kernel_lambda}, {"huber_iterations", r.huber_iterations},
               {"folds", a.folds}, {"seed", g.seed}});
  return 0;
}

inline int cmd_eigen(const Globals& g, const EigenArgs& a) {
  EigenStudyConfig c;
  c.n = a.n;
  c.l = a.l;
  c.configs = parse_configs(a.configs);
  c.mode = parse_mode(a.mode);
  c.seed = g.seed;
  const auto series = eigen_study(c);
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : series)
    summary.push_back({{"p", s.p}, {"sigma", s.sigma}, {"mean_db", s.mean_all()}, {"top10_abs_db", s.mean_abs_top(10)}});
  write_study(g.out_dir, "eigen", amplification_table(series),
              {{"n", a.n}, {"l", a.l}, {"kernel", "sparse_sign_d1(c=1)"}, {"mode", a.mode},
               {"configs", c.configs}, {"summary", summary}, {"seed", g.seed}});
  return 0;
}

/// Parses argv and dispatches. Data goes to `out`, messages to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Sparse random features: fit, predict, and reproducible studies", "sparsekern"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Globals g;
  app.add_option("--seed", g.seed, "Seed for all randomness");
  app.add_option("--out-dir", g.out_dir, "Directory for written artifacts");
  app.add_option("--threads", g.threads, "Worker threads (0: SPARSEKERN_THREADS or hardware)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit ridge regression on sparse random features");
  fit_cmd->add_option("--data", fit.data, "Headered numeric CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--target", fit.target, "Target column (default: last)");
  fit_cmd->add_option("--degree", fit.degree, "regular:d | binomial:p | custom:file.json | dense")->capture_default_str();
  fit_cmd->add_option("--nonlinearity", fit.nonlinearity, "step|sign|cosine|sincos|exp|reluP")->capture_default_str();
  fit_cmd->add_option("--weights", fit.weights, "gaussian-iso|gaussian-scaled|rademacher")->capture_default_str();
  fit_cmd->add_option("--sigma", fit.sigma, "Weight scale")->capture_default_str();
  fit_cmd->add_option("--bias", fit.bias, "none|phase|uniform:a1,a2")->capture_default_str();
  fit_cmd->add_option("--m", fit.m, "Number of features")->capture_default_str();
  auto* lam = fit_cmd->add_option("--lambda", fit.lambda, "Fixed ridge penalty");
  fit_cmd->add_option("--lambda-grid", fit.lambda_grid, "lo:hi:count or comma list, chosen by CV")
      ->capture_default_str()
      ->excludes(lam);
  fit_cmd->add_option("--folds", fit.folds, "CV folds")->capture_default_str();

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "Predict with a fitted model");
  pred_cmd->add_option("--model", pred.model, "model.json from fit")->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--data", pred.data, "Headered numeric CSV")->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--out", pred.out, "Output CSV (default: stdout)");

  auto* study = app.add_subcommand("study", "Run a study and write <name>.csv and <name>.meta.json");
  study->require_subcommand(1);

  ConvergenceArgs conv;
  auto* conv_cmd = study->add_subcommand("convergence", "Monte Carlo kernel error against m");
  conv_cmd->add_option("--l", conv.l)->capture_default_str();
  conv_cmd->add_option("--nonlinearity", conv.nonlinearity)->capture_default_str();
  conv_cmd->add_option("--degree", conv.degree)->capture_default_str();
  conv_cmd->add_option("--weights", conv.weights)->capture_default_str();
  conv_cmd->add_option("--sigma", conv.sigma)->capture_default_str();
  conv_cmd->add_option("--bias", conv.bias)->capture_default_str();
  conv_cmd->add_option("--m-grid", conv.m_grid)->capture_default_str();
  conv_cmd->add_option("--pairs", conv.pairs)->capture_default_str();

  PolytestArgs poly;
  auto* poly_cmd = study->add_subcommand("polytest", "Test error on the polynomial target over (d, n)");
  poly_cmd->add_option("--l", poly.l)->capture_default_str();
  poly_cmd->add_option("--d-grid", poly.d_grid)->capture_default_str();
  poly_cmd->add_option("--n-grid", poly.n_grid)->capture_default_str();
  poly_cmd->add_option("--features", poly.features, "sin/cos feature count")->capture_default_str();
  poly_cmd->add_option("--test-size", poly.test_size)->capture_default_str();
  poly_cmd->add_option("--folds", poly.folds)->capture_default_str();
  poly_cmd->add_option("--lambda-grid", poly.lambda_grid)->capture_default_str();
  poly_cmd->add_option("--variance", poly.variance, "inv-sqrt-d|inv-d")->capture_default_str();

  StabilityArgs stab;
  auto* stab_cmd = study->add_subcommand("stability", "Regression scores on linear data with corrupted inputs");
  stab_cmd->add_option("--n", stab.n)->capture_default_str();
  stab_cmd->add_option("--l", stab.l)->capture_default_str();
  stab_cmd->add_option("--p", stab.p)->capture_default_str();
  stab_cmd->add_option("--sigma", stab.sigma)->capture_default_str();
  stab_cmd->add_option("--mode", stab.mode, "per-coordinate|per-sample")->capture_default_str();
  stab_cmd->add_option("--test-fraction", stab.test_fraction)->capture_default_str();
  stab_cmd->add_option("--folds", stab.folds)->capture_default_str();
  stab_cmd->add_option("--kernel-lambda-grid", stab.kernel_lambda_grid)->capture_default_str();

  EigenArgs eig;
  auto* eig_cmd = study->add_subcommand("eigen", "Gram eigenvalue amplification under corruption");
  eig_cmd->add_option("--n", eig.n)->capture_default_str();
  eig_cmd->add_option("--l", eig.l)->capture_default_str();
  eig_cmd->add_option("--configs", eig.configs, "p:sigma list")->capture_default_str();
  eig_cmd->add_option("--mode", eig.mode, "per-coordinate|per-sample")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (g.threads > 0) set_thread_count(g.threads);
    if (*fit_cmd) return cmd_fit(g, fit, out);
    if (*pred_cmd) return cmd_predict(pred, out);
    if (*conv_cmd) return cmd_convergence(g, conv);
    if (*poly_cmd) return cmd_polytest(g, poly);
    if (*stab_cmd) return cmd_stability(g, stab);
    if (*eig_cmd) return cmd_eigen(g, eig);
    return 2;
  } catch (const validation_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sparsekern::cli
