#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ONTOGRADE_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ontograde_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

const std::string kOntology = std::string(ONTOGRADE_DATA) + "/cg_ontology.tsv";

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("grade").code, 1);
  EXPECT_EQ(run("grade --corpus /nonexistent").code, 1);
  EXPECT_EQ(run("synth --answers 0").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, SynthThenGrade) {
  ASSERT_EQ(run("synth --seed 4 --answers 12 --questions 2 --out " + path("c.txt")).code, 0);
  auto r = run("grade --corpus " + path("c.txt") + " --techniques BLEU,LSA,OBLEU --ontology " + kOntology +
               " --out " + path("a.csv") + " --format csv");
  ASSERT_EQ(r.code, 0);
  auto csv = slurp(path("a.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 12 * 3);
  EXPECT_EQ(csv.rfind("question_id,student_id,technique,machine,human\n", 0), 0u);

  // Repeated runs are byte-identical.
  ASSERT_EQ(run("grade --corpus " + path("c.txt") + " --techniques BLEU,LSA,OBLEU --ontology " + kOntology +
                " --out " + path("b.csv"))
                .code,
            0);
  EXPECT_EQ(slurp(path("b.csv")), csv);
}

TEST_F(Cli, EvaluateJsonAndCorrelations) {
  ASSERT_EQ(run("synth --seed 2 --answers 10 --questions 1 --out " + path("c.txt")).code, 0);
  auto r = run("evaluate --corpus " + path("c.txt") + " --techniques BLEU,OWW --ontology " + kOntology + " --out " +
               path("r.json") + " --format json --correlations " + path("corr.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("technique,max,min,undefined"), std::string::npos);
  auto json = slurp(path("r.json"));
  EXPECT_NE(json.find("\"per_question\""), std::string::npos);
  auto corr = slurp(path("corr.csv"));
  EXPECT_EQ(std::count(corr.begin(), corr.end(), '\n'), 3);
}

TEST_F(Cli, DataErrors) {
  write("dup.txt", "[question]\nid=q\n[model]\nm\n[answer id=a]\nx\n[answer id=a]\ny\n");
  EXPECT_EQ(run("grade --corpus " + path("dup.txt") + " --techniques BLEU").code, 2);
  write("ok.txt", "[question]\nid=q\nconcept=crt\n[model]\nbeam\n[answer id=a]\nbeam\n");
  // Ontology techniques without an ontology.
  EXPECT_EQ(run("grade --corpus " + path("ok.txt") + " --techniques OBLEU").code, 2);
  EXPECT_EQ(run("grade --corpus " + path("ok.txt") + " --techniques NOPE").code, 1);
  write("cycle.tsv", "a\tsubclass-of\tb\nb\tsubclass-of\ta\n");
  EXPECT_EQ(run("ontology check " + path("cycle.tsv")).code, 2);
  EXPECT_EQ(run("ontology distance " + kOntology + " crt no_such_node").code, 2);
  EXPECT_EQ(run("grade --corpus " + path("ok.txt") + " --techniques BLEU --out /nonexistent/dir/x.csv").code, 2);
}

TEST_F(Cli, OntologyCommands) {
  auto check = run("ontology check " + kOntology);
  EXPECT_EQ(check.code, 0);
  EXPECT_NE(check.out.find("triples "), std::string::npos);
  auto d = run("ontology distance " + kOntology + " crt crt");
  EXPECT_EQ(d.code, 0);
  EXPECT_EQ(d.out, "0\n");
  EXPECT_EQ(run("ontology distance " + kOntology + " crt display_device").out, "1\n");
}

TEST_F(Cli, Preprocess) {
  auto r = run("preprocess --text 'The caresses'");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "caresses\tcaress\n");
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  ASSERT_EQ(run("synth --seed 4 --answers 5 --questions 1 --out " + path("c.txt")).code, 0);
  write("run.conf", "corpus=" + path("c.txt") + "\ntechniques=BLEU\nformat=json\nout=" + path("cfg.json") + "\n");
  ASSERT_EQ(run("grade --config " + path("run.conf")).code, 0);
  EXPECT_NE(slurp(path("cfg.json")).find("\"BLEU\""), std::string::npos);
  ASSERT_EQ(run("grade --config " + path("run.conf") + " --format csv --out " + path("flag.csv")).code, 0);
  auto csv = slurp(path("flag.csv"));
  EXPECT_EQ(csv.rfind("question_id,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST_F(Cli, ConfigFileCommaList) {
  ASSERT_EQ(run("synth --seed 4 --answers 5 --questions 1 --out " + path("c.txt")).code, 0);
  write("list.conf", "corpus=" + path("c.txt") + "\ntechniques=BLEU,LSA,MAXENT\nout=" + path("list.csv") + "\n");
  ASSERT_EQ(run("grade --config " + path("list.conf")).code, 0);
  auto csv = slurp(path("list.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 16);
  EXPECT_NE(csv.find(",LSA,"), std::string::npos);
  EXPECT_NE(csv.find(",MAXENT,"), std::string::npos);
}

TEST_F(Cli, MaxEntModelRoundTrip) {
  ASSERT_EQ(run("synth --seed 9 --answers 8 --questions 1 --out " + path("c.txt")).code, 0);
  const std::string base = "grade --corpus " + path("c.txt") + " --techniques MAXENT";
  ASSERT_EQ(run(base + " --out " + path("a.csv") + " --dump-maxent " + path("m.json") + " --dump-factors " +
                path("f.json"))
                .code,
            0);
  ASSERT_EQ(run(base + " --out " + path("b.csv") + " --maxent-model " + path("m.json")).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  write("bad.json", "{\"display_device\": {\"features\": \"nope\"}}");
  EXPECT_EQ(run(base + " --maxent-model " + path("bad.json")).code, 2);
}
