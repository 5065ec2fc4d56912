#include "metasir/cli/commands.hpp"

int main(int argc, char** argv)
{
    return metasir::cli::run(argc, argv);
}
