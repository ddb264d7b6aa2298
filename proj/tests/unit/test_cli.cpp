#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "khs/cli.hpp"
#include "khs/oracle.hpp"
#include "khs/propagate.hpp"

using namespace khs;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "khsphere");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string body(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#')
      out += line + '\n';
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "khsphere_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("dump-rule prints the rule with the resolved configuration") {
  const Result r = cli({"dump-rule", "--nq", "6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# khsphere dump-rule") != std::string::npos);
  CHECK(r.out.find("# nq=6") != std::string::npos);
  CHECK(r.out.find("# band=32") != std::string::npos);
  const std::string b = body(r.out);
  CHECK(b.rfind("theta,phi,weight\n", 0) == 0);
  CHECK(std::count(b.begin(), b.end(), '\n') == 7);
  CHECK(b.find("2.0943951023931953") != std::string::npos);
}

TEST_CASE("config file values apply and command-line flags override them") {
  const fs::path cfg = scratch("run.ini");
  std::ofstream(cfg) << "nq=14\nband=4\n";
  const Result a = cli({"dump-rule", "--config", cfg.string()});
  CHECK(a.code == 0);
  CHECK(a.out.find("# nq=14") != std::string::npos);
  CHECK(a.out.find("# band=4") != std::string::npos);
  const Result b = cli({"dump-rule", "--config", cfg.string(), "--nq", "26"});
  CHECK(b.out.find("# nq=26") != std::string::npos);
  CHECK(std::count(b.out.begin(), b.out.end(), '\n') > 26);
}

TEST_CASE("errors give a nonzero exit code and a diagnostic") {
  const Result bad_rule = cli({"dump-rule", "--nq", "7"});
  CHECK(bad_rule.code != 0);
  CHECK(bad_rule.err.find("no Lebedev rule of size 7") != std::string::npos);
  CHECK(cli({}).code != 0);
  CHECK(cli({"no-such-command"}).code != 0);
  CHECK(cli({"dump-rule", "--nq", "abc"}).code != 0);
  CHECK(cli({"convergence", "--nt-min", "64", "--nt-max", "32"}).code != 0);
  const Result missing = cli({"propagate", "--snapshots", "/nonexistent/file.csv", "--band", "8", "--nq", "110"});
  CHECK(missing.code != 0);
  CHECK(missing.err.find("cannot open") != std::string::npos);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("propagate: zero-filled snapshots give zero output") {
  const fs::path snaps = scratch("zero.csv");
  {
    std::ofstream f(snaps);
    f << "step,node,p,dpdn\n";
    for (int s = 0; s < 40; ++s)
      for (int i = 0; i < 110; ++i)
        f << s << ',' << i << ",0,0\n";
  }
  const Result r = cli({"propagate", "--snapshots", snaps.string(), "--band", "8", "--nq", "110", "--dt", "0.05"});
  REQUIRE(r.code == 0);
  std::istringstream in(body(r.out));
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,p,dpdn");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.find(',')) == ",0,0");
  }
  CHECK(rows > 40);
}

TEST_CASE("propagate: a written oracle record replays bit for bit, also through a saved operator") {
  const fs::path snaps = scratch("oracle.csv"), op = scratch("op.bin");
  const std::vector<std::string> common{"--band", "8", "--nq", "110", "--nt", "64", "--K", "6", "--valid-only"};
  std::vector<std::string> gen{"propagate", "--write-snapshots", snaps.string(), "--save-op", op.string()};
  gen.insert(gen.end(), common.begin(), common.end());
  const Result internal = cli(gen);
  REQUIRE(internal.code == 0);
  std::vector<std::string> replay{"propagate", "--snapshots", snaps.string()};
  replay.insert(replay.end(), common.begin(), common.end());
  const Result fromfile = cli(replay);
  REQUIRE(fromfile.code == 0);
  CHECK(body(fromfile.out) == body(internal.out));
  replay.push_back("--load-op");
  replay.push_back(op.string());
  const Result loaded = cli(replay);
  REQUIRE(loaded.code == 0);
  CHECK(body(loaded.out) == body(internal.out));
  CHECK(body(internal.out).find("0.0") != std::string::npos);
}

TEST_CASE("propagate: node-count mismatches name the expected count") {
  const fs::path snaps = scratch("small.csv"), op = scratch("op110.bin");
  REQUIRE(cli({"propagate", "--band", "8", "--nq", "110", "--nt", "32", "--write-snapshots", snaps.string(),
               "--save-op", op.string()})
              .code == 0);
  const Result r = cli({"propagate", "--snapshots", snaps.string(), "--band", "8", "--nq", "146", "--dt", "0.125"});
  CHECK(r.code != 0);
  CHECK(r.err.find("expected 146") != std::string::npos);
  const Result o = cli({"propagate", "--band", "8", "--nq", "146", "--load-op", op.string()});
  CHECK(o.code != 0);
  CHECK(o.err.find("expected 146") != std::string::npos);
}

TEST_CASE("convergence output: table, slopes and independence from the seed") {
  const std::vector<std::string> base{"convergence", "--band",   "8",        "--nq",     "110", "--orders",
                                      "4,6",         "--nt-min", "32",       "--nt-max", "128"};
  std::vector<std::string> a = base, b = base;
  a.insert(a.end(), {"--seed", "1"});
  b.insert(b.end(), {"--seed", "99"});
  const Result ra = cli(a), rb = cli(b);
  REQUIRE(ra.code == 0);
  CHECK(body(ra.out) == body(rb.out));
  const std::string t = body(ra.out);
  CHECK(t.rfind("n_t,K,eps_p,eps_pn\n", 0) == 0);
  CHECK(t.find("K,slope_p,slope_pn") != std::string::npos);
  CHECK(std::count(t.begin(), t.end(), '\n') == 1 + 6 + 1 + 1 + 2);
}

TEST_CASE("sweep subcommands write their tables") {
  const Result n = cli({"nsph", "--band-list", "4,6", "--nt", "64", "--nq", "110"});
  REQUIRE(n.code == 0);
  CHECK(body(n.out).rfind("N_S,N_Q,eps_p,eps_pn\n", 0) == 0);
  CHECK(std::count(n.out.begin(), n.out.end(), '\n') - std::count(n.out.begin(), n.out.end(), '#') == 3);
  const Result r = cli({"radius-sweep", "--radius-bands", "4", "--rho-list", "2,3", "--nt", "64", "--nq", "110"});
  REQUIRE(r.code == 0);
  CHECK(body(r.out).rfind("N_S,N_Q,rho,eps_p\n", 0) == 0);
  const Result be = cli({"breakeven", "--ns", "3", "--nq", "110", "--band", "8", "--nt", "64", "--repeats", "1",
                         "--warmups", "0"});
  REQUIRE(be.code == 0);
  CHECK(body(be.out).find("n_f") != std::string::npos);
}

TEST_CASE("results can be written to a file") {
  const fs::path out = scratch("rule.csv");
  const Result r = cli({"dump-rule", "--nq", "14", "--out", out.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("theta,phi,weight") != std::string::npos);
}

}
