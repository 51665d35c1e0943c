// SPDX-License-Identifier: Apache-2.0
//
// Helpers for driving the dbris binary from tests.

#ifndef DBRIS_TEST_CLI_UTIL_HPP
#define DBRIS_TEST_CLI_UTIL_HPP

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace cli
{

namespace fs = std::filesystem;

inline const std::string kCli = DBRIS_CLI;
inline const std::string kData = DBRIS_DATA_DIR;

inline fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("dbris_test_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    return p;
}

struct Run
{
    int code = -1;
    std::string err;
};

inline Run run(const std::string& verb, const std::string& config, const fs::path& out,
               const std::string& extra = "")
{
    const auto err = fs::path(out.string() + ".stderr");
    const std::string cmd = kCli + " " + verb + " --config " + config + " --out " + out.string() + " " + extra +
                            " >/dev/null 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    r.err = ss.str();
    return r;
}

inline std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Relative path -> contents for every file under dir.
inline std::map<std::string, std::string> tree(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    if (!fs::exists(dir))
        return out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

} // namespace cli

#endif
