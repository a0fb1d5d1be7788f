#include <doctest.h>

TEST_SUITE_BEGIN("md");

TEST_SUITE_END();
