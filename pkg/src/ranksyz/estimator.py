"""Bit-security estimates for the MaxMinors-assisted attack.

The cost of solving at degree d is taken as N(d)^omega with

    N(d) = sum_{delta <= d} C((m-r)(r-1) + (n-1)r, delta),

the number of monomials of degree <= d in the specialized variables.  All
binomial sums are exact integers; only the final log2 is floating point.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from .maxminors import INTERMEDIATE, OVERDETERMINED, regime

DEFAULT_OMEGA = 2.807
OMEGA_CHOICES = (2.37, 2.807, 3.0)


class EstimatorError(ValueError):
    pass


@dataclass(frozen=True)
class ParamSet:
    name: str
    m: int
    n: int
    k: int
    r: int
    claimed: int | None = None  # previous best security, in bits

    def __post_init__(self):
        if min(self.m, self.n, self.k, self.r) <= 0:
            raise EstimatorError(f"{self.name}: parameters must be positive")
        if self.r > min(self.m, self.n):
            raise EstimatorError(f"{self.name}: r exceeds min(m, n)")

    @property
    def tuple(self):
        return self.m, self.n, self.k, self.r


BUILTIN = [
    ParamSet("Loidreau", 128, 120, 80, 4, 256),
    ParamSet("ROLLO-I-128", 79, 94, 47, 5, 128),
    ParamSet("ROLLO-I-192", 89, 106, 53, 6, 192),
    ParamSet("ROLLO-I-256", 113, 134, 67, 7, 256),
    ParamSet("ROLLO-II-128", 83, 298, 149, 5, 128),
    ParamSet("ROLLO-II-192", 107, 302, 151, 6, 192),
    ParamSet("ROLLO-II-256", 127, 314, 157, 7, 256),
    ParamSet("ROLLO-III-128", 101, 94, 47, 5, 128),
    ParamSet("ROLLO-III-192", 107, 118, 59, 6, 192),
    ParamSet("ROLLO-III-256", 131, 134, 67, 7, 256),
    ParamSet("RQC-I", 97, 134, 67, 5, 128),
    ParamSet("RQC-II", 107, 202, 101, 6, 192),
    ParamSet("RQC-III", 137, 262, 131, 7, 256),
]


def _check_omega(omega: float) -> None:
    if not 2 <= omega <= 3:
        raise EstimatorError(f"omega must lie in [2, 3], got {omega}")


def monomial_count(nvars: int, d: int) -> int:
    return sum(math.comb(nvars, delta) for delta in range(d + 1))


def oj_variable_count(m: int, n: int, r: int) -> int:
    return (m - r) * (r - 1) + (n - 1) * r


def oj_complexity_bits(m: int, n: int, k: int, r: int, d: int, omega: float = DEFAULT_OMEGA) -> float:
    if d < 0:
        raise EstimatorError("d must be >= 0")
    _check_omega(omega)
    return omega * math.log2(monomial_count(oj_variable_count(m, n, r), d))


def choose_d(m: int, n: int, k: int, r: int) -> int:
    """r when the MaxMinors system is overdetermined, r + 1 otherwise."""
    return r if regime(m, n, k, r).name == OVERDETERMINED else r + 1


def ks_variable_count(m: int, n: int, k: int, r: int) -> int:
    return k * m + r * (n - r)


def ks_complexity_bits(m: int, n: int, k: int, r: int, omega: float = DEFAULT_OMEGA) -> float:
    """Kipnis-Shamir based bound, solving at degree r + 2."""
    _check_omega(omega)
    return omega * math.log2(monomial_count(ks_variable_count(m, n, k, r), r + 2))


@dataclass
class SecurityEstimate:
    name: str
    m: int
    n: int
    k: int
    r: int
    d: int
    omega: float
    bits: float
    bits_r: float
    bits_r1: float
    regime: str
    ks_bits: float
    claimed: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def bold_column(self) -> str:
        return "d=r" if self.d == self.r else "d=r+1"


def estimate(p: ParamSet, omega: float = DEFAULT_OMEGA, d: str | int = "auto") -> SecurityEstimate:
    m, n, k, r = p.tuple
    reg = regime(m, n, k, r)
    if d == "auto":
        dd = choose_d(m, n, k, r)
    elif isinstance(d, int):
        dd = d
    else:
        offsets = {"r": 0, "r+1": 1, "r+2": 2}
        if d not in offsets:
            raise EstimatorError(f"unknown degree choice {d!r}")
        dd = r + offsets[d]
    notes = []
    if reg.name == INTERMEDIATE:
        notes.append("intermediate regime: r+1 taken conservatively")
    return SecurityEstimate(
        p.name, m, n, k, r, dd, omega,
        oj_complexity_bits(m, n, k, r, dd, omega),
        oj_complexity_bits(m, n, k, r, r, omega),
        oj_complexity_bits(m, n, k, r, r + 1, omega),
        reg.name, ks_complexity_bits(m, n, k, r, omega), p.claimed, notes)


def security_table(params=None, omega: float = DEFAULT_OMEGA, d: str | int = "auto") -> list[SecurityEstimate]:
    params = BUILTIN if params is None else params
    return [estimate(p, omega, d) for p in params]


CSV_FIELDS = ["name", "m", "n", "k", "r", "regime", "d", "omega", "bits_r", "bits_r1", "bits", "ks_bits", "claimed"]


def table_to_csv(rows: list[SecurityEstimate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for e in rows:
        w.writerow([e.name, e.m, e.n, e.k, e.r, e.regime, e.d, e.omega, f"{e.bits_r:.1f}", f"{e.bits_r1:.1f}",
                    f"{e.bits:.1f}", f"{e.ks_bits:.1f}", "" if e.claimed is None else e.claimed])
    return buf.getvalue()


def table_to_json(rows: list[SecurityEstimate]) -> str:
    return json.dumps([asdict(e) for e in rows], indent=2)


def load_params(path: str) -> list[ParamSet]:
    """A JSON list of {name, m, n, k, r[, claimed]} objects."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        return [ParamSet(str(x.get("name", f"row{i}")), int(x["m"]), int(x["n"]), int(x["k"]), int(x["r"]),
                         x.get("claimed")) for i, x in enumerate(data)]
    except (KeyError, TypeError, AttributeError) as exc:
        raise EstimatorError(f"malformed parameter file: {exc}") from exc


def asymptotics(n: int, r: int, omega: float = DEFAULT_OMEGA) -> dict[str, float]:
    """log2 of the leading orders when m, n grow linearly and r is small."""
    _check_omega(omega)
    lg = math.log2(n)
    return {
        "oj": 1.5 * omega * r * lg,
        "kipnis_shamir": 2 * omega * r * lg,
        "combinatorial": r * n / 2,
    }
