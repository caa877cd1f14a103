#include "nlfront_app/commands.hpp"

int main(int argc, char** argv) { return nlfront::app::run_cli(argc, argv); }
