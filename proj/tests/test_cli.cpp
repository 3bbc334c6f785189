#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mchom/pipeline.hpp"

using namespace mchom;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "mchom-test-cli";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const fs::path& out, const std::string& extra = "") {
  const fs::path p = workdir() / (name + ".json");
  std::ofstream(p) << R"({
  // comments are allowed
  "name": ")" << name << R"(",
  "medium": {"kind": "crossed", "period": 0.25, "width": 0.05, "offset": 0.1},
  "fine": {"nx": 40, "ny": 40},
  "coarse": {"M": 4, "layers": 1},
  "alpha": [1.3, 1.7],
  "tau": 0.05,
  "T": 0.5,
  "snapshots": [0.25, 0.5],
  )" << extra << R"("output": ")" << out.string() << R"("
})";
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(MCHOM_CLI) + " " + args + " > " + (workdir() / "log.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("stages write their artifacts and reruns are bitwise identical") {
  const fs::path out = workdir() / "stages";
  fs::remove_all(out);
  const fs::path cfg = write_config("tiny", out);
  const ArtifactNames names = artifact_names(load_config(cfg));

  CHECK(run("compare --config " + cfg.string()) == 1);
  for (const char* stage : {"generate-media", "solve-fine", "solve-cells", "upscale", "solve-macro", "compare"}) {
    INFO(stage);
    CHECK(run(std::string(stage) + " --config " + cfg.string()) == 0);
  }
  for (const auto& n : {names.medium, names.fine, names.cells, names.effective, names.macro, names.errors}) {
    INFO(n);
    CHECK(fs::exists(out / n));
  }
  const ErrorTable table = read_error_table(out / names.errors);
  CHECK(table.times.size() == 2);
  CHECK(table.percent.front().size() == 2);

  const std::string fine = bytes(out / names.fine);
  const std::string macro = bytes(out / names.macro);
  const std::string errors = bytes(out / names.errors);
  const fs::path again = workdir() / "again";
  fs::remove_all(again);
  CHECK(run("full --jobs 2 --config " + cfg.string() + " --out " + again.string()) == 0);
  CHECK(bytes(again / names.fine) == fine);
  CHECK(bytes(again / names.macro) == macro);
  CHECK(bytes(again / names.errors) == errors);
}

TEST_CASE("zero-order mode through run") {
  const fs::path out = workdir() / "zero";
  fs::remove_all(out);
  const fs::path cfg = write_config("tiny-zero", out, R"("mode": "zero-order", "zero_order": {"A": [1, 100]}, )");
  CHECK(run("run --config " + cfg.string()) == 0);
  CHECK(fs::exists(out / artifact_names(load_config(cfg)).zero_order));
}

TEST_CASE("invalid configs exit with status 2") {
  const fs::path cfg = write_config("bad", workdir() / "bad", R"("alpha_typo": 1.5, )");
  CHECK(run("full --config " + cfg.string()) == 2);
  const fs::path cfg2 = write_config("bad-boundary", workdir() / "bad", R"("boundary": "periodic", )");
  CHECK(run("full --config " + cfg2.string()) == 2);
  CHECK(run("full --config /nonexistent.json") != 0);
  CHECK(run("") != 0);
}
