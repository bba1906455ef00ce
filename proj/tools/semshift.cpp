#include "cli_app.hpp"

int main(int argc, char** argv) { return semshift::cli::run(argc, argv); }
