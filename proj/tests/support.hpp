#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>
#include <string>

#include <docroute/random.hpp>

namespace testing_support {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("docroute-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Random term string of roughly `chars` characters over a small lowercase alphabet.
inline std::string random_term_string(std::mt19937_64& rng, std::size_t chars) {
    static const std::string letters = "abcdefghijklmnopqrstuvwxyzäöüß";
    std::uniform_int_distribution<int> len(1, 12), pick(0, 25), umlaut(0, 19);
    std::string s;
    while (s.size() < chars) {
        if (!s.empty()) s += ' ';
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            if (umlaut(rng) == 0) s += "ä";
            else s += letters[static_cast<std::size_t>(pick(rng))];
        }
    }
    return s;
}

}  // namespace testing_support
