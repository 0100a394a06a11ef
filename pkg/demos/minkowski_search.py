"""Both sides of the existence dichotomy: when the exponent condition
stays <= 1 a primal form with prescribed decay is constructed; when it
exceeds 1 with margin, a dual witness kills the conclusion -- and the
exhaustive verifier confirms the kill independently.

Run:  python3 demos/minkowski_search.py
"""

from fractions import Fraction

from latforms import (
    Basis,
    FormRecord,
    FormSequence,
    check_condition,
    construct_dual_witness,
    construct_primal_form,
    parse_real,
    verify_conclusion,
)

F = Fraction


def main():
    xi = Basis((parse_real("2/5"),))
    Q = 10**4

    # primal side: tau_1 = 3/4, bounded divisors
    rep = check_condition([F(3, 4)], [F(0), F(0)])
    print(f"condition lhs = {rep.lhs.mid} -> {rep.to_json()['relation']}")
    out = construct_primal_form(xi, [F(3, 4)], [1, 5], Q)
    l1, l2 = out.point
    print(f"primal form: ell = ({l1}, {l2})")
    print(f"  error |ell_2 xi - ell_1| = {abs(l2 * F(2, 5) - l1)} "
          f"vs Q^(-3/4+1/20) ~ {float(Q) ** float(-3/4 + 1/20):.4g}")
    print(f"  certificate margin: {out.certificate['margin'].name}")

    # dual side: divisors 10^k at Q = 10^4 make gamma = k/4 exact
    gamma = [F(1, 2), F(1, 4)]
    delta = [100, 10]
    rep = check_condition([F(3, 4)], gamma)
    print(f"\ncondition lhs = {rep.lhs.mid} -> {rep.to_json()['relation']}")
    eps = F(1, 10)
    out = construct_dual_witness(xi, [F(3, 4)], gamma, delta, Q, eps)
    a = out.point.a
    print(f"dual witness: a = ({a[0]}, {a[1]})")
    print(f"  |a_1 xi + a_2| = {abs(a[0] * F(2, 5) + a[1])} "
          f"<= Q^(-1-eps) = 10^{float(-4 * (1 + eps)):.1f}")

    # the verifier reaches the same conclusion by brute force
    recs = [FormRecord(n=k + 1, Q=10 ** (2 + k),
                       ell=(100 * (k + 1), 10 * (k + 1)),
                       delta=(100, 10)) for k in range(3)]
    v = verify_conclusion(FormSequence(recs), xi, [F(3, 4)], Q, eps)
    print(f"  independent verdict: {v.status} "
          f"(witness a = {tuple(str(x) for x in v.witness.a)})")


if __name__ == "__main__":
    main()
