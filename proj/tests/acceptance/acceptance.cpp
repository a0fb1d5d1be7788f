// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <cstdio>

int main() {
    std::puts("placeholder");
    return 0;
}
