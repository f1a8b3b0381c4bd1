#include "doctest.h"

#include "sklpca/csv_io.hpp"
#include "sklpca/sim.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

using namespace sklpca;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

class Workspace {
public:
    Workspace() {
        dir_ = fs::temp_directory_path() / ("sklpca_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    ~Workspace() {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Run run(const std::string& args) const {
        const std::string out = path("stdout.txt");
        const std::string err = path("stderr.txt");
        const std::string cmd = std::string("\"") + SKLPCA_CLI_PATH + "\" " + args + " > \"" + out + "\" 2> \"" + err + "\"";
        const int status = std::system(cmd.c_str());
        Run r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    static std::string slurp(const std::string& file) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name), std::ios::binary) << text;
    }

private:
    fs::path dir_;
};

std::map<std::string, std::string> key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma != std::string::npos) {
            out[line.substr(0, comma)] = line.substr(comma + 1);
        }
    }
    return out;
}

std::size_t count_lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes the lattice and the factorial design") {
    Workspace ws;
    const Run lat = ws.run("simulate --lattice --m 15 --n 15 --sigma-b 1 --sigma-w 5 --out " + ws.path("lat.csv"));
    REQUIRE(lat.code == 0);
    const auto data = load_csv_file(ws.path("lat.csv"));
    CHECK(data.rows() == 225);

    const Run sim = ws.run("simulate --family radial --m 6 --n 5 --R 2 --D 3 --seed 11 --out " + ws.path("sim.csv"));
    REQUIRE(sim.code == 0);
    SimConfig cfg;
    cfg.family = SimFamily::Radial;
    cfg.m = 6;
    cfg.n_per_subject = 5;
    cfg.R = 2;
    cfg.D = 3;
    cfg.sigma_eps = std::sqrt(1e-5);
    cfg.seed = 11;
    CHECK(load_csv_file(ws.path("sim.csv")) == simulate(cfg).data);

    const Run again = ws.run("simulate --family radial --m 6 --n 5 --R 2 --D 3 --seed 11 --out -");
    CHECK(again.out == Workspace::slurp(ws.path("sim.csv")));
}

TEST_CASE("fit, predict and cv") {
    Workspace ws;
    REQUIRE(ws.run("simulate --m 8 --n 10 --R 1 --D 4 --seed 3 --out " + ws.path("d.csv")).code == 0);
    for (const std::string method : {"sklpca", "skpca"}) {
        const std::string model = ws.path(method + ".json");
        const Run fit = ws.run("fit --data " + ws.path("d.csv") + " --out " + model + " --method " + method +
                               " --q 1 --q-i 1");
        REQUIRE(fit.code == 0);
        const Run pred = ws.run("predict --model " + model + " --data " + ws.path("d.csv") + " --out " +
                                ws.path("p.csv"));
        REQUIRE(pred.code == 0);
        const CsvTable table = read_table_file(ws.path("p.csv"));
        CHECK(table.rows.size() == 80);
        CHECK(table.header == std::vector<std::string>{"subject_id", "time", "y", "yhat", "fixed_part", "known_subject"});

        const Run cv = ws.run("cv --data " + ws.path("d.csv") + " --method " + method +
                              " --q 1 --q-i 1 --strategy random --predictions-out " + ws.path("cvp.csv"));
        REQUIRE(cv.code == 0);
        const auto kv = key_values(cv.out);
        REQUIRE(kv.count("correlation") == 1);
        const double r = std::stod(kv.at("correlation"));
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        if (method == "sklpca") {
            CHECK(r > 0.9);
        }
        CHECK(fs::exists(ws.path("cvp.csv")));
        const Run plot = ws.run("plot --in " + ws.path("cvp.csv") + " --out " + ws.path("cv.svg"));
        CHECK(plot.code == 0);
        CHECK(Workspace::slurp(ws.path("cv.svg")).find("<circle") != std::string::npos);
    }
}

TEST_CASE("hsic on a constant outcome is zero") {
    Workspace ws;
    std::string text = "subject_id,time,y,f0,f1\n";
    for (int s = 0; s < 3; ++s) {
        for (int t = 1; t <= 4; ++t) {
            text += "p" + std::to_string(s) + "," + std::to_string(t) + ",2.5," + std::to_string(s * t) + "," +
                    std::to_string(t * t - s) + "\n";
        }
    }
    ws.write("flat.csv", text);
    for (const std::string kernel : {"linear", "gaussian"}) {
        const Run r = ws.run("hsic --data " + ws.path("flat.csv") + " --kernel " + kernel + " --outcome-kernel " + kernel);
        REQUIRE(r.code == 0);
        const auto kv = key_values(r.out);
        CHECK(std::abs(std::stod(kv.at("hsic_fixed"))) <= 1e-12);
        CHECK(std::abs(std::stod(kv.at("hsic_random"))) <= 1e-12);
        CHECK(std::abs(std::stod(kv.at("hsic_mixed"))) <= 1e-12);
    }
}

TEST_CASE("experiment output shape and determinism") {
    Workspace ws;
    const std::string args = "experiment --families linear --ratios 1 --ranks 1 --dims 10 --m 10 --n 10 --reps 2 --seed 4";
    const Run a = ws.run(args + " --threads 1 --out " + ws.path("a.csv"));
    const Run b = ws.run(args + " --threads 2 --out " + ws.path("b.csv"));
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const std::string ca = Workspace::slurp(ws.path("a.csv"));
    CHECK(ca == Workspace::slurp(ws.path("b.csv")));
    CHECK(count_lines(ca) == 3);
}

TEST_CASE("configuration file and overrides") {
    Workspace ws;
    ws.write("cfg.toml", "seed = 11\n[simulate]\nfamily = \"radial\"\nm = 6\nn = 5\nR = 2\nD = 3\n");
    const Run from_cfg = ws.run("--config " + ws.path("cfg.toml") + " simulate --out " + ws.path("c.csv"));
    REQUIRE(from_cfg.code == 0);
    SimConfig cfg;
    cfg.family = SimFamily::Radial;
    cfg.m = 6;
    cfg.n_per_subject = 5;
    cfg.R = 2;
    cfg.D = 3;
    cfg.sigma_eps = std::sqrt(1e-5);
    cfg.seed = 11;
    CHECK(load_csv_file(ws.path("c.csv")) == simulate(cfg).data);

    const Run over = ws.run("--config " + ws.path("cfg.toml") + " simulate --m 4 --out " + ws.path("o.csv"));
    REQUIRE(over.code == 0);
    CHECK(load_csv_file(ws.path("o.csv")).subjects() == 4);

    ws.write("bad.toml", "seed = 1\nbogus_key = 3\n");
    CHECK(ws.run("--config " + ws.path("bad.toml") + " simulate --out -").code == 1);
    ws.write("ver.toml", "schema_version = 2\n");
    CHECK(ws.run("--config " + ws.path("ver.toml") + " simulate --out -").code == 1);
}

TEST_CASE("validation failures exit with code 1") {
    Workspace ws;
    CHECK(ws.run("").code == 1);
    CHECK(ws.run("fit --data " + ws.path("missing.csv") + " --out " + ws.path("m.json")).code == 1);
    CHECK(ws.run("simulate --R 3 --D 2 --out -").code == 1);
    CHECK(ws.run("simulate --family cubic --out -").code == 1);
    ws.write("broken.csv", "subject_id,time,y,f0\na,1,1,1\na,2,,2\n");
    const Run broken = ws.run("cv --data " + ws.path("broken.csv"));
    CHECK(broken.code == 1);
    CHECK(broken.err.find("row 2") != std::string::npos);
    CHECK(ws.run("--help").code == 0);
}

}
