#include "pollinet/runner.hpp"

#include <cstdlib>
#include <string>

namespace pollinet {

int default_jobs() {
    if (const char* env = std::getenv("POLLINET_JOBS")) {
        try {
            const int j = std::stoi(env);
            if (j >= 1) return j;
        } catch (...) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace pollinet
