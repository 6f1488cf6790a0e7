"""Print which G(k,n) have simple spectrum of quantum multiplication by c_1 at the origin."""
import argparse

from grassqkz.ktheory import smallest_prime_factor, spectrum_simple, spectrum_simple_criterion


def main(max_n: int):
    print("n   p  " + " ".join(f"k={k:<2}" for k in range(max_n + 1)))
    for n in range(2, max_n + 1):
        cells = []
        for k in range(n + 1):
            s = spectrum_simple(k, n)
            assert s == spectrum_simple_criterion(k, n)
            cells.append(" yes" if s else "  no")
        print(f"{n:<3} {smallest_prime_factor(n):<2} " + " ".join(cells))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=10)
    main(ap.parse_args().max_n)
