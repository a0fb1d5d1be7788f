#include <doctest.h>

TEST_SUITE_BEGIN("observables");

TEST_SUITE_END();
