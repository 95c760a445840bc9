# Author: alice
import sys


def read_numbers():
    """Read whitespace separated integers."""
    return [int(tok) for tok in sys.stdin.read().split()]


def main():
    numbers = read_numbers()
    if not numbers:
        return
    total = 0
    for value in numbers:
        total += value
    print(total)


if __name__ == "__main__":
    main()
