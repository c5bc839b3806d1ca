#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string cli = ARMCHAIR_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "armchair_cli_test";
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    const int rc = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_potential(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

std::vector<std::vector<std::string>> rows_of(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("usage errors exit with 2") {
    TempDir tmp;
    const auto pot = tmp.path / "zero.pot";
    write_potential(pot, R"({"type":"fourier","cos":[],"sin":[]})");

    CHECK(run("bands --potential " + pot.string() + " --N 2 --xmax 5 --out " +
              (tmp.path / "o").string()) == 2);
    CHECK(run("bands --potential " + pot.string() +
              " --N 2 --B 0.1 --a1 0.1 --a2 0.1 --xmax 5 --out " +
              (tmp.path / "o").string()) == 2);
    CHECK(run("bands --potential /nonexistent.pot --N 2 --B 0 --xmax 5 --out " +
              (tmp.path / "o").string()) == 2);
    CHECK(run("bands --potential " + pot.string() + " --N 1 --B 0.5 --xmax 5 --out " +
              (tmp.path / "o").string()) == 2);
    CHECK(run("definitely-not-a-subcommand") == 2);
}

TEST_CASE("free potential gap table lists only the lowest gap") {
    TempDir tmp;
    const auto pot = tmp.path / "zero.pot";
    write_potential(pot, R"({"type":"fourier","cos":[],"sin":[]})");
    const auto out = tmp.path / "run";
    REQUIRE(run("bands --potential " + pot.string() + " --N 2 --B 0 --xmax 12 --out " +
                out.string()) == 0);

    int nonempty = 0;
    for (const auto& row : rows_of(out / "gaps_merged.csv")) {
        if (row[0] != "gap") continue;
        if (row[4] != "empty") {
            ++nonempty;
            CHECK(row[1] == "0");
            CHECK(row[2] == "-inf");
            CHECK(std::abs(std::stod(row[3])) <= 1e-8);
        }
    }
    CHECK(nonempty == 1);
    CHECK(fs::exists(out / "channel_k0.csv"));
    CHECK(fs::exists(out / "endpoints_k1.csv"));
    CHECK(fs::exists(out / "multiplicity_k0.csv"));
}

TEST_CASE("repeated runs are byte identical") {
    TempDir tmp;
    const auto pot = tmp.path / "cos.pot";
    write_potential(pot, R"({"type":"fourier","cos":[1.0],"sin":[]})");
    const auto o1 = tmp.path / "r1", o2 = tmp.path / "r2";
    REQUIRE(run("bands --potential " + pot.string() + " --N 2 --B 0.4 --xmax 6 --out " +
                o1.string()) == 0);
    REQUIRE(run("bands --potential " + pot.string() + " --N 2 --B 0.4 --xmax 6 --out " +
                o2.string()) == 0);
    for (const auto& entry : fs::directory_iterator(o1)) {
        const auto name = entry.path().filename();
        CHECK(slurp(entry.path()) == slurp(o2 / name));
    }
}

TEST_CASE("sweep emits monotone containment over the reduced field range") {
    TempDir tmp;
    const auto pot = tmp.path / "cos.pot";
    write_potential(pot, R"({"type":"fourier","cos":[1.0],"sin":[]})");
    const auto out = tmp.path / "sweep.csv";
    REQUIRE(run("sweep --potential " + pot.string() + " --N 2 --B 0:0.8:0.2 --xmax 6 --out " +
                out.string()) == 0);

    // collect G_4 per B; widths must grow with a(B) on a(B) in [0, pi/4]
    std::map<double, std::pair<double, double>> g4;
    for (const auto& row : rows_of(out)) {
        if (row.size() < 6 || row[2] != "4") continue;
        g4[std::stod(row[0])] = {std::stod(row[3]), std::stod(row[4])};
    }
    REQUIRE(g4.size() >= 3);
    double prev_lo = 1e300, prev_hi = -1e300;
    bool first = true;
    for (const auto& [B, iv] : g4) {
        if (!first) {
            CHECK(iv.first <= prev_lo + 1e-8);
            CHECK(iv.second >= prev_hi - 1e-8);
        }
        prev_lo = iv.first;
        prev_hi = iv.second;
        first = false;
    }
}

TEST_CASE("gaps subcommand writes a single merged table") {
    TempDir tmp;
    const auto pot = tmp.path / "cos.pot";
    write_potential(pot, R"({"type":"fourier","cos":[1.0],"sin":[]})");
    const auto out = tmp.path / "gaps.csv";
    REQUIRE(run("gaps --potential " + pot.string() + " --N 2 --a1 0.3 --a2 0.1 --xmax 6 --out " +
                out.string()) == 0);
    bool has_gap = false, has_flat = false, has_band = false;
    for (const auto& row : rows_of(out)) {
        has_gap = has_gap || row[0] == "gap";
        has_flat = has_flat || row[0] == "flat";
        has_band = has_band || row[0] == "band";
    }
    CHECK(has_gap);
    CHECK(has_flat);
    CHECK(has_band);
}

TEST_CASE("flatband table carries the residual and coefficients") {
    TempDir tmp;
    const auto pot = tmp.path / "cos.pot";
    write_potential(pot, R"({"type":"fourier","cos":[1.0],"sin":[]})");
    const auto out = tmp.path / "fb.csv";
    REQUIRE(run("flatband --potential " + pot.string() +
                " --N 2 --B 0 --k 0 --n-dirichlet 1 --nu 2 --out " + out.string()) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("kirchhoff_residual=") != std::string::npos);
    CHECK(text.find("degenerate=yes") != std::string::npos);
    CHECK(rows_of(out).size() == 13); // header plus the twelve (n, j) slots
}

TEST_CASE("verify monodromy and traces pass on a smooth potential") {
    TempDir tmp;
    const auto pot = tmp.path / "mix.pot";
    write_potential(pot, R"({"type":"fourier","cos":[0.8],"sin":[0.3]})");
    const auto out = tmp.path / "verify.csv";
    CHECK(run("verify --suite monodromy --potential " + pot.string() +
              " --N 3 --B 0.5 --out " + out.string()) == 0);
    CHECK(run("verify --suite traces --potential " + pot.string() + " --N 3 --B 0.5 --out " +
              out.string()) == 0);
    for (const auto& row : rows_of(out))
        if (row[0] != "check") CHECK(row[3] == "pass");
}

TEST_CASE("single-channel bands run skips the merged table") {
    TempDir tmp;
    const auto pot = tmp.path / "cos.pot";
    write_potential(pot, R"({"type":"fourier","cos":[1.0],"sin":[]})");
    const auto out = tmp.path / "single";
    REQUIRE(run("bands --potential " + pot.string() +
                " --N 2 --B 0.4 --k 1 --xmax 6 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "channel_k1.csv"));
    CHECK(fs::exists(out / "gaps_k1.csv"));
    CHECK_FALSE(fs::exists(out / "channel_k0.csv"));
    CHECK_FALSE(fs::exists(out / "gaps_merged.csv"));
}

TEST_CASE("verify --suite all passes on the free potential") {
    TempDir tmp;
    const auto pot = tmp.path / "zero.pot";
    write_potential(pot, R"({"type":"fourier","cos":[],"sin":[]})");
    const auto out = tmp.path / "verify_all.csv";
    CHECK(run("verify --suite all --fd-m 60 --potential " + pot.string() +
              " --N 2 --B 0 --out " + out.string()) == 0);
    int checks = 0;
    for (const auto& row : rows_of(out))
        if (row[0] != "check") {
            CHECK(row[3] == "pass");
            ++checks;
        }
    CHECK(checks >= 9);
}
