#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "crdtcheck/errors.hpp"
#include "crdtcheck/transport.hpp"

int main(int argc, char** argv) {
  CLI::App app{"crdtnode: one TCP replica of a replicated datatype"};
  std::string config_path;
  app.add_option("--config", config_path, "Replica config file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    const auto cfg = crdtcheck::load_peer_config(config_path);
    return crdtcheck::serve(cfg);
  } catch (const crdtcheck::BindError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const crdtcheck::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
