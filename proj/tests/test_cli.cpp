#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wavevel/cli.hpp"
#include "wavevel/differentiation.hpp"
#include "wavevel/io.hpp"

using namespace wavevel;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> kGaussian = {"generate", "--kind", "translating-gaussian", "--velocity", "0.7,0",
                                            "--shape", "64,64", "--spacing", "0.05,0.05", "--origin", "-1.6,-1.6",
                                            "--frames", "9", "--dt", "0.01", "--out", "cli_gauss.wvf"};

}  // namespace

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"velocity", "--in", "x.wvf", "--order", "3"}).code == 2);
  CHECK(run({"info"}).code == 2);
  CHECK(run({"info", "--in", "definitely_missing.wvf"}).code == 2);
  CHECK(run({"generate", "--kind", "sawtooth", "--shape", "8", "--spacing", "0.1", "--out", "x.wvf"}).code == 2);
  CHECK(run({"generate", "--kind", "plane-wave", "--k", "1", "--shape", "4", "--spacing", "0.1", "--out", "x.wvf"})
            .code == 2);
}

TEST_CASE("generate then info") {
  const auto g = run(kGaussian);
  REQUIRE(g.code == 0);
  const auto i = run({"info", "--in", "cli_gauss.wvf"});
  CHECK(i.code == 0);
  CHECK(i.out.find("magic WVFIELD1") != std::string::npos);
  CHECK(i.out.find("shape 64,64") != std::string::npos);
  CHECK(i.out.find("frames 9") != std::string::npos);
  const SampledField f = read_field("cli_gauss.wvf");
  CHECK(f.frames() == 9);
}

TEST_CASE("track on a translating gaussian passes") {
  REQUIRE(run(kGaussian).code == 0);
  const auto t = run({"track", "--in", "cli_gauss.wvf"});
  CHECK(t.code == 0);
  CHECK(t.out.find("PASS") != std::string::npos);
  CHECK(run({"track", "--in", "cli_gauss.wvf", "--tolerance", "1e-12"}).code == 1);
}

TEST_CASE("velocity order 1 on a plane wave reports an all-invalid mask") {
  REQUIRE(run({"generate", "--kind", "plane-wave", "--k", "2,1", "--omega", "1.5", "--shape", "48,48", "--spacing",
               "0.05,0.05", "--frames", "5", "--dt", "0.01", "--out", "cli_wave.wvf"})
              .code == 0);
  const auto v = run({"velocity", "--in", "cli_wave.wvf", "--order", "1", "--csv", "cli_wave.csv"});
  CHECK(v.code == 0);
  CHECK(v.out.find(": 0 of 2304 points valid") != std::string::npos);
  CHECK(v.err.find("warning") != std::string::npos);
  const std::string csv = slurp("cli_wave.csv");
  CHECK(csv.rfind("x1,x2,v1_1,v1_2,cond,valid\n", 0) == 0);
}

TEST_CASE("velocity CSV matches the library path") {
  REQUIRE(run(kGaussian).code == 0);
  REQUIRE(run({"velocity", "--in", "cli_gauss.wvf", "--order", "0", "--frame", "4", "--csv", "cli_v0.csv"}).code == 0);
  const SampledField f = read_field("cli_gauss.wvf");
  const auto v = velocity_field(fd_jet_field(f, 4), 0);
  std::ostringstream expect;
  write_csv(v.grid, velocity_columns(v), expect);
  CHECK(slurp("cli_v0.csv") == expect.str());
}

TEST_CASE("scalar reports the contraction") {
  REQUIRE(run(kGaussian).code == 0);
  const auto s = run({"scalar", "--in", "cli_gauss.wvf", "--csv", "cli_s.csv"});
  CHECK(s.code == 0);
  CHECK(slurp("cli_s.csv").rfind("x1,x2,scalar,valid\n", 0) == 0);
}

TEST_CASE("covcheck exit codes") {
  const auto id = run({"covcheck", "--kind", "translating-gaussian", "--velocity", "0.7,0", "--map", "identity"});
  CHECK(id.code == 0);
  CHECK(id.out.find("zero_order_max_rel_deviation 0 ") != std::string::npos);
  CHECK(id.out.find("first_order_max_rel_deviation 0 ") != std::string::npos);
  CHECK(id.out.find("contraction_max_rel_deviation 0 ") != std::string::npos);
  const auto mirror = run({"covcheck", "--kind", "translating-gaussian", "--velocity", "0.7,0.2", "--map", "mirror"});
  CHECK(mirror.code == 0);
  CHECK(run({"covcheck", "--kind", "translating-gaussian", "--velocity", "0.7,0.2", "--maps", "5", "--tolerance",
             "1e-30"})
            .code == 1);
  CHECK(run({"covcheck", "--kind", "translating-gaussian", "--velocity", "0.7,0.2", "--map", "matrix", "--matrix",
             "1,2,3"})
            .code == 2);
}

TEST_CASE("config files supply defaults that the command line overrides") {
  {
    std::ofstream cfg("cli.cfg");
    cfg << "# plane wave\nkind = plane-wave\nk = 2,1\nomega=1.5\nshape=16,16\nspacing=0.1,0.1\nframes=5\n"
           "out=cli_cfg.wvf\n";
  }
  REQUIRE(run({"generate", "--config", "cli.cfg"}).code == 0);
  CHECK(read_field("cli_cfg.wvf").grid().extent(0) == 16);
  REQUIRE(run({"generate", "--config", "cli.cfg", "--shape", "12,12"}).code == 0);
  CHECK(read_field("cli_cfg.wvf").grid().extent(0) == 12);
  CHECK(run({"generate", "--config", "missing.cfg"}).code == 2);
}
