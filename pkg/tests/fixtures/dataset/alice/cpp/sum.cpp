// Author: alice
#include <iostream>
#include <vector>

int main() {
    std::vector<long long> values;
    long long value = 0;
    while (std::cin >> value) {
        values.push_back(value);
    }
    long long total = 0;
    for (long long item : values) {
        total += item;
    }
    std::cout << total << std::endl;
    return 0;
}
