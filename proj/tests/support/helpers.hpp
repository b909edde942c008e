#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

namespace testing_support {

// Fresh scratch directory under FOT_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch_dir(const std::string& name) {
    const char* root = std::getenv("FOT_TEST_TMP");
    std::filesystem::path base =
        root != nullptr ? std::filesystem::path(root) : std::filesystem::temp_directory_path() / "fot_tests";
    const std::filesystem::path dir = base / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing_support
