"""Golden-ratio walkthrough: Fibonacci convergent forms, the tau trace,
the classical irrationality bound, and exhaustive conclusion checks.

Run:  python3 demos/golden_pipeline.py
"""

from fractions import Fraction

from latforms import (
    Basis,
    BallReal,
    estimate_tau,
    gen_fibonacci,
    irrationality_bound,
    parse_real,
    verify_conclusion,
)


def main():
    seq = gen_fibonacci(60)
    golden = Basis((parse_real("golden"),))
    print(f"{len(seq)} records, last: n={seq.records[-1].n} "
          f"Q={seq.records[-1].Q} ell={seq.records[-1].ell}")

    # tau-hat_1(n) = -log|F_{n+1} - F_n phi| / log F_n -> 1, from above
    est = estimate_tau(seq, golden, 1)
    for entry in est.trace[::8]:
        if entry.value is not None:
            print(f"  n={entry.n:2d}  tau-hat = {float(entry.value.mid):.6f}")
    print(f"final tau-hat_1(60) = {float(est.final.mid):.6f}  "
          f"(excess {float(est.final.mid - 1):.6f} ~ ln(sqrt 5)/ln F_60)")

    # mu(phi) = 2 from alpha = 1/phi, beta = phi
    phi = parse_real("golden").at(128)
    mb = irrationality_bound(BallReal.exact(1, 128) / phi, phi)
    print(f"irrationality bound: {float(mb.value.mid):.12f}  "
          f"(width {float(mb.value.upper - mb.value.lower):.2e})")

    # |a1 phi - a2| > Q^(-1-eps) for all admissible a: certified per Q
    for Q in (10**2, 10**4, 10**6):
        v = verify_conclusion(seq, golden, [Fraction(1)], Q, Fraction(1, 5))
        print(f"verify Q={Q:>8}: {v.status}  "
              f"(prefixes scanned: {v.diagnostics['prefixes']})")


if __name__ == "__main__":
    main()
