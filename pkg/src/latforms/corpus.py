"""Built-in sequence generators and the JSONL ingestion/export layer.

Three classical families with exactly known behaviour — the Fibonacci
convergents of the golden ratio, and the two Apery recurrences whose scaled
iterates approximate zeta(3) and zeta(2) — plus a synthetic power family
whose decay and divisor exponents are exact by construction.  Every record
is emitted through FormRecord, so integrality and divisor constraints are
validated at the source.

File format is JSONL: an optional header line
    {"generator": name, "params": {...}}
followed by one record per line
    {"n": int, "Q": "dec", "ell": ["dec", ...], "delta": ["dec", ...]}
with integers as decimal strings (records can exceed JSON number ranges).
Export is canonical (sorted keys, compact separators), so canonical files
round-trip byte-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import IO, Callable, Optional, Sequence, Union

from .minkowski import ConditionReport, check_condition
from .model import Basis, FormRecord, FormSequence, ValidationError
from .numerics import BallReal, parse_real

__all__ = [
    "GENERATORS",
    "GeneratorSpec",
    "InfeasibleSpec",
    "gen_fibonacci",
    "gen_apery_zeta3",
    "gen_apery_zeta2",
    "gen_synthetic",
    "generate",
    "default_basis",
    "sweep_conditions",
    "dumps_jsonl",
    "loads_jsonl",
    "export_jsonl",
    "import_jsonl",
]

GENERATORS = ("fibonacci-golden", "apery-zeta3", "apery-zeta2",
              "synthetic-power")


class InfeasibleSpec(ValueError):
    """The requested exponents cannot be realized by integer forms.

    Carries the condition report for the requested (t, g) pair whenever all
    t_i are finite, so the caller can see which side of the criterion the
    doomed request was on.
    """

    def __init__(self, why: str, report: Optional[ConditionReport] = None):
        super().__init__(why)
        self.report = report


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    n_max: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in GENERATORS:
            raise ValidationError(
                f"unknown generator {self.name!r}; known: {', '.join(GENERATORS)}")
        if not isinstance(self.n_max, int) or self.n_max < 3:
            raise ValidationError("n_max must be an integer >= 3")


# ---------------------------------------------------------------------------
# classical families


def gen_fibonacci(n_max: int) -> FormSequence:
    """Convergent forms of the golden ratio: ell_n = (F_{n+1}, F_n), Q_n = F_n.

    Records start at n=2: F_1 = F_2 = 1 would give two records with Q = 1,
    and scales must strictly increase.  The n=2 record keeps the Q=1
    log-skip path reachable downstream.  Divisors are constant (1, 1).
    """
    if n_max < 3:
        raise ValidationError("n_max must be >= 3")
    records = []
    f_n, f_n1 = 1, 2  # F_2, F_3
    for n in range(2, n_max + 1):
        records.append(FormRecord(n=n, Q=f_n, ell=(f_n1, f_n), delta=(1, 1)))
        f_n, f_n1 = f_n1, f_n + f_n1
    return FormSequence(records, provenance={
        "generator": "fibonacci-golden", "params": {"n_max": n_max}})


def _as_int(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise AssertionError(
            f"integrality failed for {what}: {x} is not an integer "
            "(generator bug)")
    return x.numerator


def _gen_apery(n_max: int, prec: int, *, power: int, front: int,
               poly: Callable[[int], int], sign: int, a1: int, b1: Fraction,
               const: str, name: str) -> FormSequence:
    """Shared Apery driver: u_{m+1} = (poly(m) u_m + sign m^q u_{m-1})/(m+1)^q.

    Both component sequences (a integral, b rational) run through the same
    recurrence in exact arithmetic; only front*d_n^power*u is emitted, with
    integrality asserted rather than assumed.  d_n = lcm(1..n) is grown
    incrementally so the divisor chain holds by construction.
    """
    if n_max < 3:
        raise ValidationError("n_max must be >= 3")
    a_prev, a_cur = Fraction(1), Fraction(a1)
    b_prev, b_cur = Fraction(0), b1
    d = 1
    records = []
    for n in range(1, n_max + 1):
        d = d * n // math.gcd(d, n)
        scale = front * d ** power
        l1 = _as_int(scale * b_cur, f"{name} n={n} ell_1")
        l2 = _as_int(scale * a_cur, f"{name} n={n} ell_2")
        records.append(FormRecord(n=n, Q=abs(l2), ell=(l1, l2),
                                  delta=(front, scale)))
        num, den = poly(n), (n + 1) ** power
        lag = sign * n ** power
        a_prev, a_cur = a_cur, (num * a_cur + lag * a_prev) / den
        b_prev, b_cur = b_cur, (num * b_cur + lag * b_prev) / den
    _apery_sanity(records[-1], const, prec, name)
    return FormSequence(records, provenance={
        "generator": name, "params": {"n_max": n_max}})


def _apery_sanity(rec: FormRecord, const: str, prec: int, name: str) -> None:
    # certify |ell_1 - ell_2 * const| < 1 at the last record; needs absolute
    # precision on the order of the coefficient size
    bits = max(prec, rec.ell[1].bit_length() + 64)
    ball = abs(BallReal.exact(rec.ell[0], bits)
               - parse_real(const).at(bits) * rec.ell[1])
    if not ball.upper < 1:
        raise AssertionError(
            f"{name}: |L_n| at n={rec.n} not certified < 1 (generator bug)")


def gen_apery_zeta3(n_max: int, prec: int = 64) -> FormSequence:
    """Apery's zeta(3) forms: ell_n = (2 d_n^3 b_n, 2 d_n^3 a_n), Q_n = |ell_2|.

    (m+1)^3 u_{m+1} = (34m^3+51m^2+27m+5) u_m - m^3 u_{m-1}, with
    (a_0, a_1) = (1, 5) and (b_0, b_1) = (0, 6).  2 d_n^3 b_n is an integer
    (asserted per record); divisors (2, 2 d_n^3) form a chain because lcm
    grows incrementally.  prec seeds the final certified sanity check
    |b_n - a_n zeta(3)| < 1/(2 d_n^3).
    """
    return _gen_apery(
        n_max, prec, power=3, front=2,
        poly=lambda m: 34 * m ** 3 + 51 * m ** 2 + 27 * m + 5, sign=-1,
        a1=5, b1=Fraction(6), const="zeta3", name="apery-zeta3")


def gen_apery_zeta2(n_max: int, prec: int = 64) -> FormSequence:
    """The zeta(2) analogue: ell_n = (d_n^2 b_n, d_n^2 a_n), Q_n = |ell_2|.

    (m+1)^2 u_{m+1} = (11m^2+11m+3) u_m + m^2 u_{m-1}, with (a_0, a_1) = (1, 3)
    and (b_0, b_1) = (0, 5); d_n^2 b_n is integral (asserted).
    """
    return _gen_apery(
        n_max, prec, power=2, front=1,
        poly=lambda m: 11 * m ** 2 + 11 * m + 3, sign=+1,
        a1=3, b1=Fraction(5), const="zeta2", name="apery-zeta2")


# ---------------------------------------------------------------------------
# synthetic power family


def _frac(x, what: str) -> Fraction:
    try:
        return x if isinstance(x, Fraction) else Fraction(str(x))
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"{what}: cannot parse {x!r} as a rational") from e


def gen_synthetic(spec: GeneratorSpec) -> FormSequence:
    """Exact-exponent family over a power base.

    params: B (integer base >= 2), xi (rationals, length p-1), t (decay
    exponents, length p-1, each a rational <= 0 or None for exact
    annihilation), g (divisor exponents, length p, rationals in [0, 1] with
    g_i <= |t_i| for finite t_i).

    Construction: Q_n = B^n, ell_p = V B^n with V = lcm of the xi
    denominators, ell_i = V B^n xi_i + B^(-floor(t_i n)) (or exactly
    V B^n xi_i when t_i is None), delta_i = B^floor(g_i n).  Then
    |ell_i - ell_p xi_i| equals B^(-floor(t_i n)) exactly, so the decay
    trace is floor(t_i n)/n with no rounding noise.

    Positive t_i is unrealizable: against a fixed rational xi_i = c/v a
    nonzero integer-form error is at least 1/v and cannot decay, so such
    requests raise InfeasibleSpec (the fibonacci / apery generators are the
    positive-decay oracles).  Infeasible divisor exponents raise likewise,
    with the condition report attached when every t_i is finite.
    """
    if spec.name != "synthetic-power":
        raise ValidationError(f"gen_synthetic got spec named {spec.name!r}")
    params = spec.params
    missing = [k for k in ("B", "xi", "t", "g") if k not in params]
    if missing:
        raise ValidationError(f"synthetic-power params missing {missing}")
    B = params["B"]
    if not isinstance(B, int) or B < 2:
        raise ValidationError("base B must be an integer >= 2")
    xi = tuple(_frac(x, "xi") for x in params["xi"])
    if not xi:
        raise ValidationError("need at least one xi (p >= 2)")
    p = len(xi) + 1
    t = tuple(None if x is None else _frac(x, "t") for x in params["t"])
    g = tuple(_frac(x, "g") for x in params["g"])
    if len(t) != p - 1:
        raise ValidationError(f"t has length {len(t)}, expected {p - 1}")
    if len(g) != p:
        raise ValidationError(f"g has length {len(g)}, expected {p}")

    report = None
    if all(ti is not None for ti in t):
        report = check_condition(t, g)
    for i, ti in enumerate(t, start=1):
        if ti is not None and ti > 0:
            raise InfeasibleSpec(
                f"t_{i} = {ti} > 0: a nonzero integer-form error against "
                f"fixed rational xi_{i} is at least 1/denominator and cannot "
                "decay; use the fibonacci/apery generators for positive "
                "decay exponents", report)
    for i, gi in enumerate(g, start=1):
        if gi < 0:
            raise InfeasibleSpec(f"g_{i} = {gi} < 0: divisors must be >= 1",
                                 report)
    for i, (ti, gi) in enumerate(zip(t, g), start=1):
        cap = Fraction(1) if ti is None else min(-ti, Fraction(1))
        if gi > cap:
            raise InfeasibleSpec(
                f"g_{i} = {gi} > {cap}: delta_{i} = B^floor(g_{i} n) would "
                f"not divide ell_{i}", report)
    if g[-1] > 1:
        raise InfeasibleSpec(
            f"g_{p} = {g[-1]} > 1: delta_{p} would not divide ell_{p}", report)

    V = 1
    for x in xi:
        V = V * x.denominator // math.gcd(V, x.denominator)
    c = tuple((V // x.denominator) * x.numerator for x in xi)

    records = []
    for n in range(1, spec.n_max + 1):
        Qn = B ** n
        ell = []
        for i in range(p - 1):
            err = 0 if t[i] is None else B ** (-math.floor(t[i] * n))
            ell.append(c[i] * Qn + err)
        ell.append(V * Qn)
        delta = tuple(B ** math.floor(gi * n) for gi in g)
        records.append(FormRecord(n=n, Q=Qn, ell=tuple(ell), delta=delta))
    canon = {
        "B": B,
        "n_max": spec.n_max,
        "xi": [str(x) for x in xi],
        "t": [None if x is None else str(x) for x in t],
        "g": [str(x) for x in g],
    }
    return FormSequence(records, provenance={
        "generator": "synthetic-power", "params": canon})


def sweep_conditions(t_grid: Sequence[Sequence], g_grid: Sequence[Sequence],
                     prec: int = 64) -> list[tuple[tuple[Fraction, ...],
                                                   tuple[Fraction, ...],
                                                   ConditionReport]]:
    """Condition reports over the (t, g) product grid.

    Pure arithmetic on exponents — no integrality constraint — so the grid
    may stand on both sides of the criterion boundary even where generation
    itself is infeasible.
    """
    out = []
    for t_raw in t_grid:
        t = tuple(_frac(x, "t") for x in t_raw)
        for g_raw in g_grid:
            g = tuple(_frac(x, "g") for x in g_raw)
            out.append((t, g, check_condition(t, g, prec)))
    return out


# ---------------------------------------------------------------------------
# dispatch


def generate(spec: GeneratorSpec) -> FormSequence:
    if spec.name == "fibonacci-golden":
        return gen_fibonacci(spec.n_max)
    if spec.name == "apery-zeta3":
        return gen_apery_zeta3(spec.n_max, spec.params.get("prec", 64))
    if spec.name == "apery-zeta2":
        return gen_apery_zeta2(spec.n_max, spec.params.get("prec", 64))
    return gen_synthetic(spec)


def default_basis(spec: GeneratorSpec) -> Basis:
    """The basis each generator's forms are small against."""
    if spec.name == "fibonacci-golden":
        return Basis((parse_real("golden"),))
    if spec.name == "apery-zeta3":
        return Basis((parse_real("zeta3"),))
    if spec.name == "apery-zeta2":
        return Basis((parse_real("zeta2"),))
    xi = spec.params.get("xi")
    if not xi:
        raise ValidationError("synthetic-power spec has no xi")
    return Basis(tuple(parse_real(str(_frac(x, "xi"))) for x in xi))


# ---------------------------------------------------------------------------
# JSONL serialization


def _canon(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def dumps_jsonl(seq: FormSequence) -> str:
    """Canonical JSONL text: header line (when provenance exists), then
    records ordered by n, integers as decimal strings."""
    lines = []
    prov = seq.provenance
    if prov is not None:
        if isinstance(prov, dict) and "generator" in prov:
            header = {"generator": prov["generator"],
                      "params": prov.get("params", {})}
        else:
            header = {"generator": str(prov), "params": {}}
        lines.append(_canon(header))
    for r in seq.records:
        lines.append(_canon({
            "n": r.n,
            "Q": str(r.Q),
            "ell": [str(x) for x in r.ell],
            "delta": [str(x) for x in r.delta],
        }))
    return "\n".join(lines) + "\n"


_RECORD_KEYS = {"n", "Q", "ell", "delta"}


def _line_int(v, lineno: int, what: str) -> int:
    if isinstance(v, bool):
        raise ValidationError(f"line {lineno}: {what} must be an integer")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v, 10)
        except ValueError:
            pass
    raise ValidationError(
        f"line {lineno}: {what} = {v!r} is not a decimal integer")


def _line_record(obj: dict, lineno: int) -> FormRecord:
    keys = set(obj)
    if keys != _RECORD_KEYS:
        extra = sorted(keys - _RECORD_KEYS)
        missing = sorted(_RECORD_KEYS - keys)
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if extra:
            parts.append(f"unknown {extra}")
        raise ValidationError(f"line {lineno}: bad record fields: "
                              + ", ".join(parts))
    n = _line_int(obj["n"], lineno, "n")
    Q = _line_int(obj["Q"], lineno, "Q")
    for name in ("ell", "delta"):
        if not isinstance(obj[name], list) or not obj[name]:
            raise ValidationError(f"line {lineno}: {name} must be a non-empty "
                                  "list")
    ell = tuple(_line_int(v, lineno, f"ell[{k}]")
                for k, v in enumerate(obj["ell"], start=1))
    delta = tuple(_line_int(v, lineno, f"delta[{k}]")
                  for k, v in enumerate(obj["delta"], start=1))
    try:
        return FormRecord(n=n, Q=Q, ell=ell, delta=delta)
    except ValidationError as e:
        raise ValidationError(f"line {lineno}: {e}") from None


def loads_jsonl(text: str) -> FormSequence:
    """Parse JSONL into a FormSequence; all errors carry line numbers.

    Records must appear in strictly increasing n with strictly increasing Q
    (the canonical order); a leading {"generator": ...} line becomes the
    sequence provenance.
    """
    provenance = None
    records: list[FormRecord] = []
    prev: Optional[FormRecord] = None
    first = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ValidationError(f"line {lineno}: invalid JSON: {e.msg}") \
                from None
        if not isinstance(obj, dict):
            raise ValidationError(f"line {lineno}: expected an object")
        if first and "generator" in obj:
            provenance = {"generator": obj["generator"],
                          "params": obj.get("params", {})}
            first = False
            continue
        first = False
        rec = _line_record(obj, lineno)
        if prev is not None:
            if rec.n <= prev.n:
                raise ValidationError(
                    f"line {lineno}: n={rec.n} not greater than previous "
                    f"n={prev.n}")
            if rec.Q <= prev.Q:
                raise ValidationError(
                    f"line {lineno}: Q={rec.Q} not greater than previous "
                    f"Q={prev.Q}")
            if rec.p != prev.p:
                raise ValidationError(
                    f"line {lineno}: p={rec.p} differs from previous "
                    f"p={prev.p}")
        records.append(rec)
        prev = rec
    if not records:
        raise ValidationError("no records in input")
    return FormSequence(records, provenance=provenance)


def export_jsonl(seq: FormSequence,
                 target: Union[str, Path, IO[str]]) -> None:
    text = dumps_jsonl(seq)
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def import_jsonl(source: Union[str, Path, IO[str]]) -> FormSequence:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    return loads_jsonl(text)
