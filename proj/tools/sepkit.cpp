#include "sepkit/cli/app.hpp"

int main(int argc, char** argv) { return sepkit::cli::run(argc, argv); }
