#include "floqspin/cli/app.hpp"

int main(int argc, char** argv) { return floqspin::cli::run_app(argc, argv); }
