#include "tnvote/cli.hpp"

int main(int argc, char** argv)
{
    return tnvote::cli::main_entry(argc, argv);
}
