//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstring>
#include <string>

#include "molstory/canonical.hpp"
#include "molstory/smiles.hpp"

using namespace std::string_literals;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

CommandResult run(const std::string& args) {
  std::string cmd = MOLSTORY_CLI_PATH " "s + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WEXITSTATUS(status);
  return r;
}

int count_lines_with_prefix(const std::string& text, const std::string& pfx) {
  int count = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    if (text.compare(pos, pfx.size(), pfx) == 0) ++count;
    pos = end + 1;
  }
  return count;
}

}  // namespace

TEST_CASE("cli decompose prints one line per fragment") {
  auto r = run("decompose \"O=C1CC(=O)C=C1C(=O)O\"");
  CHECK(r.exit_code == 0);
  CHECK(count_lines_with_prefix(r.out, "fragment ") == 6);
}

TEST_CASE("cli unroll is deterministic for a fixed seed") {
  auto a = run("unroll --seed 7 \"CC(=O)Oc1ccccc1\"");
  auto b = run("unroll --seed 7 \"CC(=O)Oc1ccccc1\"");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  auto c = run("unroll --seed 8 \"CC(=O)Oc1ccccc1\"");
  CHECK(c.exit_code == 0);
}

TEST_CASE("cli unroll and replay round trip through a pipe") {
  auto story = run("unroll --seed 3 \"Cc1ccc(O)cc1\"");
  REQUIRE(story.exit_code == 0);
  std::string tmp = std::string(MOLSTORY_BINARY_DIR) + "/story_rt.txt";
  {
    FILE* f = fopen(tmp.c_str(), "w");
    REQUIRE(f);
    fwrite(story.out.data(), 1, story.out.size(), f);
    fclose(f);
  }
  auto replay = run("replay --input " + tmp);
  CHECK(replay.exit_code == 0);
  std::string expected =
      molstory::write_canonical_smiles(molstory::parse_smiles("Cc1ccc(O)cc1"));
  CHECK(replay.out == expected + "\n");
}

TEST_CASE("cli exit codes") {
  CHECK(run("decompose \"C1CC1X\"").exit_code == 1);   // domain error
  CHECK(run("unroll").exit_code == 2);                 // usage error
  CHECK(run("no-such-command").exit_code == 2);
  CHECK(run("decompose \"CCO\"").exit_code == 0);
}

TEST_CASE("cli train, train-init and generate work together") {
  std::string dir = MOLSTORY_BINARY_DIR;
  std::string cfg_path = dir + "/cli_train.cfg";
  {
    FILE* f = fopen(cfg_path.c_str(), "w");
    REQUIRE(f);
    const char* cfg =
        "epochs=2\nlearning_rate=0.002\nbatch_size=8\ndropout=0.0\n"
        "d_f=16\nd_a=8\nheads=2\nlayers=2\nff_hidden=16\n"
        "train_fraction=1.0\nvalidation_count=0\ngeometry_iterations=12\n"
        "max_steps=6\nseed=5\n";
    fwrite(cfg, 1, strlen(cfg), f);
    fclose(f);
  }
  std::string data = MOLSTORY_DATA_DIR "/toy.csv";
  auto t = run("train --input " + data + " --config " + cfg_path +
               " --weights " + dir + "/cli.w --vocab " + dir + "/cli.vocab");
  REQUIRE(t.exit_code == 0);
  auto ti = run("train-init --input " + data + " --config " + cfg_path +
                " --steps 100 --weights " + dir + "/cli.init.w");
  REQUIRE(ti.exit_code == 0);

  auto g = run("generate --logS -2.0 --redox 0.5 --sa 2.5 --seed 1 --vocab " +
               dir + "/cli.vocab --weights " + dir + "/cli.w --init-weights " +
               dir + "/cli.init.w --config " + cfg_path);
  CHECK(g.exit_code == 0);
  // First line is the molecule, followed by its story.
  CHECK_FALSE(g.out.empty());
  CHECK(g.out.find("START ") != std::string::npos);
  auto g2 = run("generate --logS -2.0 --redox 0.5 --sa 2.5 --seed 1 --vocab " +
                dir + "/cli.vocab --weights " + dir + "/cli.w --init-weights " +
                dir + "/cli.init.w --config " + cfg_path);
  CHECK(g.out == g2.out);  // seeded generation is reproducible

  auto inspect = run("inspect-weights --weights " + dir + "/cli.w");
  CHECK(inspect.exit_code == 0);
  CHECK(inspect.out.find("frag_embed") != std::string::npos);
}
