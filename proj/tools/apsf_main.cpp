#include <apsf/app.hpp>

int main(int argc, char** argv) { return apsf::run_cli(argc, argv); }
