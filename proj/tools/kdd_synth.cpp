#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "wsnids/synthetic_kdd.hpp"

// Writes a KDD'99-format corpus with the label mix of the 10% training file.
int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic KDD'99-format connection corpus"};
  wsnids::data::SyntheticKddOptions opts;
  std::string out;
  app.add_option("--records", opts.records, "number of records");
  app.add_option("--seed", opts.seed, "generator seed");
  app.add_option("--out", out, "output file (default stdout)");
  CLI11_PARSE(app, argc, argv);

  if (out.empty()) {
    wsnids::data::write_synthetic_kdd(std::cout, opts);
    return 0;
  }
  std::ofstream f(out);
  if (!f) {
    std::cerr << "cannot write " << out << '\n';
    return 1;
  }
  wsnids::data::write_synthetic_kdd(f, opts);
  return 0;
}
