#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rydpol/config.hpp"

using namespace rydpol;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("round trip through JSON") {
    ExperimentConfig c;
    c.cloud_wz = 25.0;
    c.retrieval_window = {0.8, 1.2};
    c.pair.c3 = -10.0;
    const ExperimentConfig back = config_from_json(to_json(c));
    CHECK(back.cloud_wz == 25.0);
    CHECK(back.retrieval_window.start == 0.8);
    CHECK(back.retrieval_window.end == 1.2);
    CHECK(back.pair.c3 == -10.0);
    CHECK(to_json(back) == to_json(c));
}

TEST_CASE("missing keys keep defaults") {
    const ExperimentConfig c = config_from_json(json{{"temperature", 50.0}});
    CHECK(c.temperature == 50.0);
    CHECK(c.cloud_wr == ExperimentConfig{}.cloud_wr);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(config_from_json(json{{"temperatur", 50.0}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"pair_coefficients", {{"c9", 1.0}}}}), std::invalid_argument);
}

TEST_CASE("invalid values and types are rejected") {
    CHECK_THROWS_AS(config_from_json(json{{"cloud_wr", -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"cloud_wr", "wide"}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json{{"retrieval_window", {1.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json::array()), std::invalid_argument);
}

TEST_CASE("shipped default file matches the built-in defaults") {
    const ExperimentConfig shipped = load_config(fs::path(RYDPOL_SOURCE_DIR) / "config" / "default.json");
    CHECK(to_json(shipped) == to_json(ExperimentConfig{}));
}

TEST_CASE("config resolution order") {
    const fs::path explicit_file = write_temp("rydpol_cfg_explicit.json", R"({"temperature": 10.0})");
    const fs::path env_file = write_temp("rydpol_cfg_env.json", R"({"temperature": 20.0})");
    ::setenv("RYDPOL_CONFIG", env_file.c_str(), 1);
    CHECK(resolve_config(explicit_file.string()).temperature == 10.0);
    CHECK(resolve_config("").temperature == 20.0);
    ::unsetenv("RYDPOL_CONFIG");
    CHECK(resolve_config("").temperature == ExperimentConfig{}.temperature);
    CHECK_THROWS(resolve_config((fs::temp_directory_path() / "no_such_rydpol.json").string()));
    const fs::path bad = write_temp("rydpol_cfg_bad.json", "{ not json");
    CHECK_THROWS_AS(load_config(bad), std::invalid_argument);
}
