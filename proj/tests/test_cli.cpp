#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

std::string fixture(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

int run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + std::string(NILFORMS_BIN) + " " + args + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path tmp_dir() {
  fs::path d = fs::temp_directory_path() / "nilforms-cli-test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("exit codes") {
  fs::path out = tmp_dir() / "r.json";
  CHECK(run("algebra --in " + fixture("heisenberg.json") + " --out " + out.string()) == 0);
  CHECK(run("algebra --in " + fixture("malformed.json") + " --out " + out.string()) == 1);
  CHECK(run("algebra --in /nonexistent.json") == 1);
  // Kind mismatch is an input error.
  CHECK(run("bundle --in " + fixture("heisenberg.json")) == 1);
  // Impossible tolerance turns a passing bundle run into a check failure.
  CHECK(run("bundle --in " + fixture("heisenberg-left-invariant.json") + " --tol 1e-300 --out " +
            out.string()) == 2);
}

TEST_CASE("malformed input leaves no partial report") {
  fs::path out = tmp_dir() / "absent.json";
  fs::remove(out);
  CHECK(run("algebra --in " + fixture("malformed.json") + " --out " + out.string()) == 1);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("reports are byte-identical across reruns and thread counts") {
  for (std::string spec : {"algebra heisenberg.json", "algebra abelian4.json",
                           "bundle heisenberg-left-invariant.json",
                           "bundle heisenberg-pseudo.json", "bundle hexagonal-bundle.json",
                           "bk bk-example.json", "identity identity-t4.json",
                           "identity identity-t3.json", "systole systole.json"}) {
    std::string cmd = spec.substr(0, spec.find(' '));
    std::string file = spec.substr(spec.find(' ') + 1);
    fs::path o1 = tmp_dir() / "t1.json", o4 = tmp_dir() / "t4.json", o1b = tmp_dir() / "t1b.json";
    REQUIRE(run(cmd + " --in " + fixture(file) + " --out " + o1.string(),
                "NILFORMS_THREADS=1") == 0);
    REQUIRE(run(cmd + " --in " + fixture(file) + " --out " + o4.string(),
                "NILFORMS_THREADS=4") == 0);
    REQUIRE(run(cmd + " --in " + fixture(file) + " --out " + o1b.string(),
                "NILFORMS_THREADS=1") == 0);
    CAPTURE(spec);
    CHECK(slurp(o1) == slurp(o4));
    CHECK(slurp(o1) == slurp(o1b));
  }
}

TEST_CASE("csv tables") {
  fs::path csv = tmp_dir() / "csv";
  fs::remove_all(csv);
  REQUIRE(run("systole --in " + fixture("systole.json") + " --out /dev/null --csv " +
              csv.string()) == 0);
  std::string table = slurp(csv / "systole.csv");
  CHECK(table.rfind("lattice_id,lambda1,lambda1_dual,product,vol,stsys1,sys_nm1,ratio,"
                    "equality_flag",
                    0) == 0);
  CHECK(table.find("hexagonal") != std::string::npos);

  REQUIRE(run("bundle --in " + fixture("heisenberg-left-invariant.json") +
              " --out /dev/null --csv " + csv.string()) == 0);
  CHECK(slurp(csv / "eigenvalues.csv").rfind("index,eigenvalue", 0) == 0);
  CHECK(slurp(csv / "norm_variation.csv").rfind("field,min,max,mean,variation", 0) == 0);

  REQUIRE(run("identity --in " + fixture("identity-t4.json") + " --out /dev/null --csv " +
              csv.string()) == 0);
  CHECK(slurp(csv / "residual_vs_h.csv").rfind("res,h,contraction_residual,awb_residual", 0) == 0);
}

TEST_CASE("report content spot checks") {
  fs::path out = tmp_dir() / "spot.json";
  REQUIRE(run("algebra --in " + fixture("heisenberg.json") + " --out " + out.string()) == 0);
  std::string rep = slurp(out);
  CHECK(rep.find("\"schema\": \"nilforms/1\"") != std::string::npos);
  CHECK(rep.find("\"B1_CODIM1\"") != std::string::npos);

  REQUIRE(run("algebra --in " + fixture("abelian4.json") + " --out " + out.string()) == 0);
  CHECK(slurp(out).find("\"FLAT_TORUS\"") != std::string::npos);

  REQUIRE(run("bundle --in " + fixture("heisenberg-pseudo.json") + " --out " + out.string()) == 0);
  CHECK(slurp(out).find("\"is_left_invariant\": false") != std::string::npos);

  REQUIRE(run("bundle --in " + fixture("hexagonal-bundle.json") + " --out " + out.string()) == 0);
  CHECK(slurp(out).find("\"equality\": true") != std::string::npos);
}
