#include <iostream>

#include "adequate/errors.hpp"
#include "adequate/io/config.hpp"
#include "adequate/io/run.hpp"

int main(int argc, char** argv) {
  using namespace adequate;
  io::RunConfig cfg;
  try {
    cfg = io::parse_cli(argc, argv);
  } catch (const io::UsageError& e) {
    (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
    return e.exit_code();
  }
  try {
    const auto out = io::run_command(cfg);
    const auto text = io::emit_outputs(out, cfg);
    if (cfg.json_out.empty()) std::cout << text;
    return 0;
  } catch (const io::UsageError& e) {
    std::cerr << "adequate: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    std::cerr << "adequate: " << e.what() << '\n';
    return 2;
  } catch (const ConfigurationError& e) {
    std::cerr << "adequate: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "adequate: " << e.what() << '\n';
    return 1;
  }
}
