#include "dklb/warnings.hpp"

#include <algorithm>
#include <mutex>

namespace dklb {

namespace {
std::mutex g_mu;
std::vector<std::string> g_warnings;
}  // namespace

void record_warning(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mu);
  if (std::find(g_warnings.begin(), g_warnings.end(), message) == g_warnings.end()) {
    g_warnings.push_back(message);
  }
}

std::vector<std::string> recorded_warnings() {
  std::lock_guard<std::mutex> lock(g_mu);
  return g_warnings;
}

void clear_warnings() {
  std::lock_guard<std::mutex> lock(g_mu);
  g_warnings.clear();
}

}  // namespace dklb
