"""Print the sharp genus-bound probability grid and the homology column."""
import argparse

from wrtrand.predictor import DEFAULT_GENERA, DEFAULT_LEVELS, table1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, nargs="+", default=list(DEFAULT_LEVELS))
    ap.add_argument("--genera", type=int, nargs="+", default=list(DEFAULT_GENERA))
    ap.add_argument("--csv", action="store_true", help="CSV instead of the aligned table")
    args = ap.parse_args()
    t = table1(args.levels, args.genera)
    print(t.to_csv() if args.csv else t.to_pretty())


if __name__ == "__main__":
    main()
