// Regenerates the bundled sample datasets under <dir> (default: data).
#include <apsf/io.hpp>
#include <apsf/simgen.hpp>

#include <iostream>

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  try {
    apsf::save_dataset(apsf::ozone_like_dataset(), dir / "ozone_like" / "observations.csv");
    apsf::save_dataset(apsf::weather_like_dataset(), dir / "weather_like" / "observations.csv");
  } catch (const std::exception& e) {
    std::cerr << "make_sample_data: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << (dir / "ozone_like").string() << " and " << (dir / "weather_like").string() << "\n";
  return 0;
}
