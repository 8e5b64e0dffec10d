"""Degree growth against wall time for the main identity and the refined congruence.

    python scripts/degree_growth.py --n-max 25
"""

import argparse
import time

from qcert import congruence, series


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=21)
    args = ap.parse_args()

    print(f"{'n':>4} {'num span':>9} {'den deg':>8} {'identity ms':>12} {'refined ms':>11}")
    for n in range(1, args.n_max + 1):
        series.sum_S.cache_clear()
        start = time.perf_counter()
        lhs = series.sum_S(n - 1)
        ok = lhs == series.closed_T(n)
        t_id = (time.perf_counter() - start) * 1000
        t_ref = ""
        if n % 2 and n > 1:
            start = time.perf_counter()
            ok &= congruence.verify_refined(n, "full").passed
            t_ref = f"{(time.perf_counter() - start) * 1000:11.1f}"
        span = lhs.num.high - lhs.num.low
        print(f"{n:>4} {span:>9} {lhs.den.high:>8} {t_id:>12.1f} {t_ref:>11}{'' if ok else '  MISMATCH'}")


if __name__ == "__main__":
    main()
