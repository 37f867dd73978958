#include "ivuq_tools/commands.hpp"

int main(int argc, char** argv) { return ivuq::cli::run(argc, argv); }
