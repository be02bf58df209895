#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <spdlog/spdlog.h>

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);  // keep per-record info lines out of test output
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
