#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "../support/fixtures.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    std::string data;
    std::string embedding;

    Scratch() : dir(fs::temp_directory_path() / "sicut_cli_test") {
        fs::remove_all(dir);
        fs::create_directories(dir);
        const auto planted = fixtures::planted_blobs(150);
        data = write("data.csv", fixtures::to_csv(planted.data));
        embedding = write("embedding.csv", fixtures::to_csv(planted.embedding));
    }
    ~Scratch() { fs::remove_all(dir); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto path = (dir / name).string();
        std::ofstream(path) << text;
        return path;
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int cli(const std::string& args) {
    const std::string command = std::string(SICUT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::stringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        out.push_back(cells);
    }
    return out;
}

}  // namespace

TEST_CASE("run finds the three planted clusters and writes a report") {
    const Scratch s;
    const auto out = s.path("sol.json");
    REQUIRE(cli("run --data " + s.data + " --embedding " + s.embedding +
                   " --alpha 250 --beta 1.6 --time-limit 20000 --out " + out) == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc["scores"]["k"] == 3);
    CHECK(doc["labels"].size() == 150);
    const auto report = slurp(out + ".txt");
    CHECK(report.find("cluster 2") != std::string::npos);
    CHECK(report.find("signal0") != std::string::npos);
}

TEST_CASE("usage errors exit with 2 and runtime errors with 1") {
    const Scratch s;
    const auto common = " --data " + s.data + " --embedding " + s.embedding + " --out " + s.path("x.json");
    CHECK(cli("run --alpha -1" + common) == 2);
    CHECK(cli("run --beta 0.5" + common) == 2);
    CHECK(cli("run --linkage ward" + common) == 2);
    CHECK(cli("frobnicate") == 2);
    const auto bad = s.write("bad.csv", "a,b\n1,2\n3,NA\n");
    CHECK(cli("run --data " + bad + " --pca --out " + s.path("y.json")) == 1);
    CHECK(cli("run --data " + s.data + " --embedding " + bad + " --out " + s.path("z.json")) == 1);
}

TEST_CASE("an iteration cap of one gives the single-cluster solution") {
    const Scratch s;
    const auto out = s.path("one.json");
    REQUIRE(cli("run --data " + s.data + " --embedding " + s.embedding + " --iteration-cap 1 --out " + out) == 0);
    const auto doc = nlohmann::json::parse(slurp(out));
    CHECK(doc["scores"]["k"] == 1);
    CHECK(doc["scores"]["si"] == 0.0);
}

TEST_CASE("capped runs are bit-reproducible and match the sweep row") {
    const Scratch s;
    const auto inputs = " --data " + s.data + " --embedding " + s.embedding;
    const auto first = s.path("a.json");
    const auto second = s.path("b.json");
    REQUIRE(cli("run" + inputs + " --alpha 125 --beta 1.4 --iteration-cap 6 --out " + first) == 0);
    REQUIRE(cli("run" + inputs + " --alpha 125 --beta 1.4 --iteration-cap 6 --out " + second) == 0);
    auto a = nlohmann::json::parse(slurp(first));
    auto b = nlohmann::json::parse(slurp(second));
    a.erase("trace");
    b.erase("trace");
    CHECK(a == b);

    const auto table = s.path("sweep.csv");
    REQUIRE(cli("sweep" + inputs + " --alpha-grid 125 --beta-grid 1.4 --iteration-cap 6 --out " + table) == 0);
    const auto cells = rows(slurp(table));
    REQUIRE(cells.size() == 1);
    CHECK(std::stoul(cells[0][2]) == a["scores"]["k"].get<std::size_t>());
    CHECK(std::stoul(cells[0][3]) == a["scores"]["attributes"].get<std::size_t>());
    CHECK(std::stod(cells[0][5]) == a["scores"]["si"].get<double>());
}

TEST_CASE("sweep rows follow grid order") {
    const Scratch s;
    const auto table = s.path("grid.csv");
    REQUIRE(cli("sweep --data " + s.data + " --embedding " + s.embedding +
                   " --alpha-grid 0,250 --beta-grid 1.2,1.6 --iteration-cap 5 --out " + table) == 0);
    const auto cells = rows(slurp(table));
    REQUIRE(cells.size() == 4);
    const std::vector<std::pair<std::string, std::string>> order{{"0", "1.2"}, {"250", "1.2"}, {"0", "1.6"},
                                                                 {"250", "1.6"}};
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(cells[r][0] == order[r].first);
        CHECK(cells[r][1] == order[r].second);
    }
    CHECK(std::stoul(cells[0][2]) <= 2);
    CHECK(std::stoul(cells[2][2]) <= 2);
}

TEST_CASE("bench reports one row per limit and subsample") {
    const Scratch s;
    const auto table = s.path("bench.csv");
    REQUIRE(cli("bench --data " + s.data + " --embedding " + s.embedding +
                   " --time-limits 1,200 --subsample 75,150 --out " + table) == 0);
    const auto cells = rows(slurp(table));
    REQUIRE(cells.size() == 4);
    for (const auto& row : cells) {
        CHECK(std::stoul(row[1]) == 10);
        CHECK(std::stoul(row[3]) >= 1);
    }
    CHECK(std::stoul(cells[0][3]) <= std::stoul(cells[1][3]));
    CHECK(std::stoul(cells[2][3]) <= std::stoul(cells[3][3]));
    CHECK(std::stoul(cells[0][0]) == 75);
    CHECK(std::stoul(cells[3][0]) == 150);
}
