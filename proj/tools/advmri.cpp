#include <iostream>
int main() { std::cout << "advmri cli placeholder\n"; return 0; }
