"""Average iteration counts over batches of random interpolation instances.

Run with ``python3 demos/03_benchmark_table.py [count]``. With the default of
30 instances per cell this takes around ten seconds.
"""

import sys

from dualgambit import emit_csv, run_batch


def main():
    count = int(sys.argv[1]) if len(sys.argv) > 1 else 30
    cells = [(32, 64), (32, 128), (32, 256), (64, 128)]

    stats = []
    for m, n in cells:
        s = run_batch(m, n, count, seed=1, workers=4)
        stats.append(s)
        print(f"m={m:3d} n={n:4d}  predictors {s.pred_mean:5.2f} +/- {s.pred_relstd:4.1f}%   "
              f"total {s.total_mean:5.2f} +/- {s.total_relstd:4.1f}%")

    print()
    print(emit_csv(stats))


if __name__ == "__main__":
    main()
