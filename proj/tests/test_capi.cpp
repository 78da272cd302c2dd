#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aimdmft.h"

namespace {

struct Handle {
    aim_config* cfg = aim_config_create();
    ~Handle() { aim_config_destroy(cfg); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmpdir(const std::string& tag) {
    std::string dir = std::string("capi_out_") + tag;
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(aim_version()) == "0.1.0");
    CHECK(std::string(aim_status_name(AIM_OK)) == "ok");
    CHECK(std::string(aim_status_name(AIM_ERR_CONFIG)) == "config-error");
}

TEST_CASE("config set/get and unknown keys") {
    Handle h;
    char buf[64];
    CHECK(aim_config_get(h.cfg, "shots", buf, sizeof(buf)) == AIM_OK);
    CHECK(std::string(buf) == "8192");  // paper default
    CHECK(aim_config_get(h.cfg, "v0", buf, sizeof(buf)) == AIM_OK);
    CHECK(std::string(buf) == "0.5");
    CHECK(aim_config_get(h.cfg, "solutions", buf, sizeof(buf)) == AIM_OK);
    CHECK(std::string(buf) == "2");
    CHECK(aim_config_get(h.cfg, "eps_cnot", buf, sizeof(buf)) == AIM_OK);
    CHECK(std::string(buf) == "0.0079000000000000008");
    CHECK(aim_config_get(h.cfg, "eta", buf, sizeof(buf)) == AIM_OK);
    CHECK(std::string(buf) == "0.20000000000000001");

    CHECK(aim_config_set(h.cfg, "u", "3.5") == AIM_OK);
    CHECK(aim_config_get(h.cfg, "u", buf, sizeof(buf)) == AIM_OK);
    CHECK(std::string(buf) == "3.5");

    CHECK(aim_config_set(h.cfg, "not_a_key", "1") == AIM_ERR_CONFIG);
    CHECK(std::string(aim_last_error()).find("unknown config key") !=
          std::string::npos);
    CHECK(aim_config_set(h.cfg, "shots", "zero") == AIM_ERR_CONFIG);
    CHECK(aim_config_set(h.cfg, "rate_multiplier", "55") == AIM_ERR_CONFIG);
}

TEST_CASE("config hash tracks content") {
    Handle a, b;
    CHECK(aim_config_hash(a.cfg) == aim_config_hash(b.cfg));
    CHECK(aim_config_set(a.cfg, "seed", "9") == AIM_OK);
    CHECK(aim_config_hash(a.cfg) != aim_config_hash(b.cfg));
}

TEST_CASE("config file loading") {
    const char* path = "capi_test_config.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "u = 4\n";
        out << "v = 1\n";
        out << "exact = true\n";
    }
    Handle h;
    CHECK(aim_config_load_file(h.cfg, path) == AIM_OK);
    char buf[32];
    aim_config_get(h.cfg, "u", buf, sizeof(buf));
    CHECK(std::string(buf) == "4");
    aim_config_get(h.cfg, "exact", buf, sizeof(buf));
    CHECK(std::string(buf) == "true");

    {
        std::ofstream out(path);
        out << "mystery = 1\n";
    }
    CHECK(aim_config_load_file(h.cfg, path) == AIM_ERR_CONFIG);
    CHECK(aim_config_load_file(h.cfg, "missing_file.txt") == AIM_ERR_CONFIG);
    std::remove(path);
}

TEST_CASE("decompose command writes the algebra and solution") {
    Handle h;
    aim_config_set(h.cfg, "u", "4");
    aim_config_set(h.cfg, "v", "1");
    std::string dir = tmpdir("decomp");
    int dim_g = 0;
    REQUIRE(aim_run_decompose(h.cfg, dir.c_str(), &dim_g) == AIM_OK);
    CHECK(dim_g == 24);
    std::string summary = slurp(dir + "/decompose_summary.txt");
    CHECK(summary.find("dim_g 24") != std::string::npos);
    CHECK(summary.find("k_abelian 1") != std::string::npos);
    CHECK(slurp(dir + "/algebra_g.txt").find("role g") != std::string::npos);
    CHECK(slurp(dir + "/cartan_solution.txt").find("cartan-solution") !=
          std::string::npos);
    // Header line carries the config hash and seed.
    char head[64];
    std::snprintf(head, sizeof(head), "# aimdmft config=%016llx seed=1",
                  static_cast<unsigned long long>(aim_config_hash(h.cfg)));
    CHECK(summary.find(head) != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("greens command detects the reference peaks") {
    Handle h;
    aim_config_set(h.cfg, "u", "2");
    aim_config_set(h.cfg, "v", "0.944");
    aim_config_set(h.cfg, "exact", "true");
    std::string dir = tmpdir("greens");
    aim_greens_result res{};
    REQUIRE(aim_run_greens(h.cfg, dir.c_str(), &res) == AIM_OK);
    CHECK(std::abs(res.omega1 - 0.884) < 0.01);
    CHECK(std::abs(res.omega2 - 3.021) < 0.03);
    CHECK(slurp(dir + "/greens_high.csv").rfind("# aimdmft", 0) == 0);
    CHECK(slurp(dir + "/spectrum_low.csv").find("omega,magnitude") !=
          std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("dmft command converges at U = 2") {
    Handle h;
    aim_config_set(h.cfg, "u", "2");
    aim_config_set(h.cfg, "exact", "true");
    std::string dir = tmpdir("dmft");
    aim_dmft_result res{};
    REQUIRE(aim_run_dmft(h.cfg, dir.c_str(), &res) == AIM_OK);
    CHECK(res.converged == 1);
    CHECK(std::string(res.reason) == "tolerance");
    CHECK(res.v_final >= 0.923);
    CHECK(res.v_final <= 0.963);
    CHECK(slurp(dir + "/dmft_history.csv").find("iteration,V,omega1") !=
          std::string::npos);
    CHECK(std::filesystem::exists(dir + "/spectral_function.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("direct numeric entry points") {
    double out = 0.0;
    CHECK(aim_alias_frequency(4.0, 3.0, &out) == AIM_OK);
    CHECK(out == doctest::Approx(1.0));
    CHECK(aim_alias_frequency(4.0, 0.0, &out) == AIM_ERR_INVALID);

    // Fixed point at U = 2: poles of the V* = sqrt(8/9) model give Z = 8/9.
    const double vstar = 0.9428090415820634;
    aim_greens_result fp{};
    CHECK(aim_exact_poles(2.0, vstar, &fp) == AIM_OK);
    CHECK(aim_quasiparticle_weight(fp.omega1, fp.omega2, vstar, &out) == AIM_OK);
    CHECK(out == doctest::Approx(8.0 / 9.0).epsilon(1e-6));
    CHECK(aim_quasiparticle_weight(0.01, 0.02, 1.0, &out) == AIM_ERR_INVALID);

    aim_greens_result poles{};
    CHECK(aim_exact_poles(2.0, 0.944, &poles) == AIM_OK);
    CHECK(poles.omega1 == doctest::Approx(0.884846).epsilon(1e-5));

    double times[3] = {0.0, 1.0, 2.0};
    double values[3];
    CHECK(aim_greens_exact(2.0, 0.944, times, 3, values) == AIM_OK);
    CHECK(values[0] == doctest::Approx(1.0));

    CHECK(aim_z_exact(0.0) == doctest::Approx(1.0));
    CHECK(aim_z_exact(3.0) == doctest::Approx(0.75));
    CHECK(aim_z_exact(6.0) == doctest::Approx(0.0));
    CHECK(aim_z_exact(9.0) == doctest::Approx(0.0));
}
