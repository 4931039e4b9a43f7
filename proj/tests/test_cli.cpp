#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace sparsekern;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sparsekern");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("SPARSEKERN_TEST_TMP");
  const fs::path base = env ? fs::path(env) : fs::temp_directory_path() / "sparsekern_tests";
  const fs::path dir = base / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// y = sum_j sin(x_j) + 0.05 noise, x ~ N(0, I_l).
void write_sine_csv(const fs::path& path, Eigen::Index n, Eigen::Index l, std::uint64_t seed) {
  const Matrix X = gaussian_matrix(n, l, 1.0, seed);
  Stream rng(seed, 99);
  Table t([&] {
    std::vector<std::string> h;
    for (Eigen::Index k = 0; k < l; ++k) h.push_back("x" + std::to_string(k));
    h.push_back("y");
    return h;
  }());
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Table::Cell> row;
    double y = 0.0;
    for (Eigen::Index k = 0; k < l; ++k) {
      row.emplace_back(X(i, k));
      y += std::sin(X(i, k));
    }
    row.emplace_back(y + 0.05 * rng.normal());
    t.add_row(std::move(row));
  }
  std::ofstream(path, std::ios::binary) << t.to_csv();
}

Vector prediction_column(const std::string& csv_text) {
  std::istringstream in(csv_text);
  const auto csv = read_numeric_csv(in);
  REQUIRE(csv.header == std::vector<std::string>{"prediction"});
  return csv.values.col(0);
}

}  // namespace

TEST_CASE("fit then predict reproduces the training fit", "[cli]") {
  const auto dir = scratch("fit_predict");
  write_sine_csv(dir / "train.csv", 300, 4, 1);
  const auto fit = invoke({"--seed", "5", "--out-dir", (dir / "m").string(), "fit", "--data",
                           (dir / "train.csv").string(), "--m", "200"});
  REQUIRE(fit.code == 0);
  REQUIRE(fit.out.rfind("train_r2,", 0) == 0);
  const double train_r2 = parse_double(fit.out.substr(9, fit.out.size() - 10));

  const auto pred = invoke({"predict", "--model", (dir / "m" / "model.json").string(), "--data",
                            (dir / "train.csv").string()});
  REQUIRE(pred.code == 0);
  const auto ds = load_dataset((dir / "train.csv").string());
  CHECK(r2_score(ds.y, prediction_column(pred.out)) == train_r2);

  const auto metrics = nlohmann::json::parse(slurp(dir / "m" / "metrics.json"));
  CHECK(metrics.at("train_r2").get<double>() == train_r2);
  CHECK(metrics.at("m") == 200);
  CHECK(metrics.contains("cv"));

  const auto model = cli::load_model((dir / "m" / "model.json").string());
  CHECK(model.columns == ds.columns);
  CHECK(model.target == "y");
  CHECK(nlohmann::json(cli::model_to_json(model)).dump() == nlohmann::json::parse(slurp(dir / "m" / "model.json")).dump());

  // same seed, same bytes
  REQUIRE(invoke({"--seed", "5", "--out-dir", (dir / "m2").string(), "fit", "--data",
                  (dir / "train.csv").string(), "--m", "200"})
              .code == 0);
  CHECK(slurp(dir / "m" / "model.json") == slurp(dir / "m2" / "model.json"));

  // predict to file matches stdout; column order in the data does not matter
  REQUIRE(invoke({"predict", "--model", (dir / "m" / "model.json").string(), "--data",
                  (dir / "train.csv").string(), "--out", (dir / "p.csv").string()})
              .code == 0);
  CHECK(slurp(dir / "p.csv") == pred.out);
  {
    std::ofstream f(dir / "empty.csv");
    f << "x0,x1,x2,x3\n";
  }
  const auto empty = invoke({"predict", "--model", (dir / "m" / "model.json").string(), "--data",
                             (dir / "empty.csv").string()});
  CHECK(empty.code == 0);
  CHECK(empty.out == "prediction\n");
}

TEST_CASE("additive sine target is learned with degree-one features", "[cli]") {
  const auto dir = scratch("sine");
  write_sine_csv(dir / "train.csv", 1500, 8, 2);
  write_sine_csv(dir / "test.csv", 500, 8, 3);
  REQUIRE(invoke({"--out-dir", dir.string(), "fit", "--data", (dir / "train.csv").string(), "--degree",
                  "regular:1", "--nonlinearity", "cosine", "--m", "2400"})
              .code == 0);
  const auto pred = invoke({"predict", "--model", (dir / "model.json").string(), "--data", (dir / "test.csv").string()});
  REQUIRE(pred.code == 0);
  const auto test = load_dataset((dir / "test.csv").string());
  CHECK(r2_score(test.y, prediction_column(pred.out)) > 0.9);
}

TEST_CASE("studies write deterministic artifacts", "[cli]") {
  const auto a = scratch("study_a"), b = scratch("study_b");
  const std::vector<std::string> stab{"study", "stability", "--n", "200"};
  auto with_dir = [](const fs::path& d, std::vector<std::string> rest, const std::string& threads) {
    std::vector<std::string> args{"--seed", "7", "--threads", threads, "--out-dir", d.string()};
    args.insert(args.end(), rest.begin(), rest.end());
    return invoke(args);
  };
  REQUIRE(with_dir(a, stab, "1").code == 0);
  REQUIRE(with_dir(b, stab, "4").code == 0);
  CHECK(slurp(a / "stability.csv") == slurp(b / "stability.csv"));
  CHECK(slurp(a / "stability.meta.json") == slurp(b / "stability.meta.json"));
  CHECK(slurp(a / "stability.csv").rfind("model,train_r2,test_r2\n", 0) == 0);

  const std::vector<std::string> conv{"study", "convergence", "--l", "4", "--m-grid", "64,256,1024,4096", "--pairs", "50"};
  REQUIRE(with_dir(a, conv, "1").code == 0);
  REQUIRE(with_dir(b, conv, "3").code == 0);
  CHECK(slurp(a / "convergence.csv") == slurp(b / "convergence.csv"));
  std::istringstream cin_(slurp(a / "convergence.csv"));
  const auto c = read_numeric_csv(cin_);
  REQUIRE(c.values.rows() == 4);
  CHECK(c.values(3, 1) < c.values(0, 1));

  const std::vector<std::string> poly{"study", "polytest", "--l", "4", "--d-grid", "1,2,4", "--n-grid", "20,30",
                                      "--features", "30", "--test-size", "100"};
  REQUIRE(with_dir(a, poly, "1").code == 0);
  REQUIRE(with_dir(b, poly, "2").code == 0);
  CHECK(slurp(a / "polytest.csv") == slurp(b / "polytest.csv"));
  std::istringstream pin(slurp(a / "polytest.csv"));
  CHECK(read_numeric_csv(pin).values.rows() == 6);

  const std::vector<std::string> eig{"study", "eigen", "--n", "60", "--configs", "0:6,0.2:6"};
  REQUIRE(with_dir(a, eig, "1").code == 0);
  REQUIRE(with_dir(b, eig, "2").code == 0);
  CHECK(slurp(a / "eigen.csv") == slurp(b / "eigen.csv"));
  const auto meta = nlohmann::json::parse(slurp(a / "eigen.meta.json"));
  CHECK(meta.at("rows") == 120);
  CHECK(meta.at("config").at("summary").at(0).at("mean_db") == 0.0);
}

TEST_CASE("exit codes", "[cli]") {
  const auto dir = scratch("codes");
  write_sine_csv(dir / "d.csv", 40, 2, 4);
  const std::string data = (dir / "d.csv").string();
  const std::string out = (dir / "o").string();
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({"--version"}).code == 0);
  CHECK(invoke({}).code != 0);
  CHECK(invoke({"--bogus"}).code == 2);
  CHECK(invoke({"fit", "--data", (dir / "nope.csv").string()}).code == 2);
  CHECK(invoke({"--out-dir", out, "fit", "--data", data, "--degree", "regular:0"}).code == 2);
  CHECK(invoke({"--out-dir", out, "fit", "--data", data, "--degree", "regular:3"}).code == 2);
  CHECK(invoke({"--out-dir", out, "fit", "--data", data, "--nonlinearity", "tanh"}).code == 2);
  CHECK(invoke({"--out-dir", out, "fit", "--data", data, "--bias", "uniform:2,1"}).code == 2);
  CHECK(invoke({"--out-dir", out, "fit", "--data", data, "--lambda-grid", "1:2"}).code == 2);
  CHECK(invoke({"--out-dir", out, "study", "polytest", "--n-grid", "3"}).code == 2);
  const auto bad = invoke({"--out-dir", out, "fit", "--data", data, "--m", "0"});
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
  CHECK(invoke({"--out-dir", out, "fit", "--data", data, "--m", "20", "--lambda", "0.1"}).code == 0);
}
