#include <doctest.h>

#include <string>

#include "qcland/config.hpp"

using namespace qcland;

TEST_SUITE("config") {

TEST_CASE("a minimal config picks up the reference defaults") {
  const ParseResult r = parse_config("sweep {\n T = [0.5]\n N_T = [10]\n}\n");
  REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? std::string() : r.errors.front()));
  CHECK(r.config.problem.n_sites == 6);
  CHECK(r.config.problem.coupling == 1.0);
  CHECK(r.config.problem.field_z == 1.0);
  CHECK(r.config.problem.field_bound == 4.0);
  CHECK(r.config.problem.field_initial == -2.0);
  CHECK(r.config.problem.field_target == 2.0);
  CHECK(r.config.problem.convention == SpinConvention::pauli);
  CHECK(r.config.sweep.k_values == std::vector<int>{1});
  CHECK(r.config.sweep.samples == 100);
  CHECK(r.config.seed == 1);
  CHECK(r.config.max_enum_bangs == 24);
}

TEST_CASE("a zero-bang sweep cannot host flip moves") {
  const ParseResult r = parse_config("sweep {\n T = [0.5]\n N_T = [0]\n k = [1]\n}\n");
  CHECK_FALSE(r.ok());
  bool mentions_nt = false;
  for (const auto& e : r.errors) mentions_nt |= e.find("N_T") != std::string::npos;
  CHECK(mentions_nt);
}

TEST_CASE("every violation is reported, not just the first") {
  const ParseResult r = parse_config(
      "problem {\n L = 1\n h_init = -9\n}\n"
      "sweep {\n T = [-2]\n N_T = [10]\n}\n"
      "mystery = 1\n");
  CHECK(r.errors.size() >= 4);  // L, h_init, T, unknown key
}

TEST_CASE("unknown keys are rejected by name") {
  const ParseResult r =
      parse_config("sweep {\n T = [1]\n N_T = [8]\n banana = 3\n}\n");
  CHECK_FALSE(r.ok());
  bool named = false;
  for (const auto& e : r.errors) named |= e.find("sweep.banana") != std::string::npos;
  CHECK(named);
}

TEST_CASE("duplicate keys are flagged") {
  const ParseResult r = parse_config("sweep {\n T = [1]\n T = [2]\n N_T = [8]\n}\n");
  CHECK_FALSE(r.ok());
}

TEST_CASE("serialization round-trips to the identical config") {
  const std::string text =
      "seed = 99\n"
      "problem {\n L = 5\n J = 0.75\n spin_convention = spin_half\n}\n"
      "sweep {\n T = 0.1:0.4:0.1\n N_T = [10, 20]\n k = [1, 2]\n M = 64\n}\n"
      "analysis {\n order_parameters = true\n fidelity_filter = 0.95\n}\n";
  const ParseResult first = parse_config(text);
  REQUIRE_MESSAGE(first.ok(), (first.errors.empty() ? std::string() : first.errors.front()));
  CHECK(first.config.sweep.t_values.size() == 4);
  const ParseResult second = parse_config(serialize_config(first.config));
  REQUIRE(second.ok());
  CHECK(first.config == second.config);
  CHECK(serialize_config(first.config) == serialize_config(second.config));
}

TEST_CASE("enumeration requests above the cap fail at parse time") {
  const ParseResult r = parse_config(
      "sweep {\n T = [1]\n N_T = [26]\n}\n"
      "analysis {\n dos = true\n}\n");
  CHECK_FALSE(r.ok());
  bool mentions_cap = false;
  for (const auto& e : r.errors)
    mentions_cap |= e.find("max_enum_nt") != std::string::npos;
  CHECK(mentions_cap);

  // the same sweep without enumeration analyses is fine
  const ParseResult ok = parse_config("sweep {\n T = [1]\n N_T = [26]\n}\n");
  CHECK(ok.ok());
}

TEST_CASE("comments, ranges and scalar lists parse") {
  const ParseResult r = parse_config(
      "# header comment\n"
      "sweep {\n"
      "  T = 2.0            # scalar promotes to a one-element list\n"
      "  N_T = 8:12:2\n"
      "}\n");
  REQUIRE(r.ok());
  CHECK(r.config.sweep.t_values == std::vector<double>{2.0});
  CHECK(r.config.sweep.nt_values == std::vector<int>({8, 10, 12}));
}

TEST_CASE("flip orders above the bang count are rejected") {
  const ParseResult r = parse_config("sweep {\n T = [1]\n N_T = [3]\n k = [4]\n}\n");
  CHECK_FALSE(r.ok());
}

}  // TEST_SUITE
