"""F_{q^m}-linear codes in the rank metric and planted decoding instances.

Vectors over F_{q^m} are 1-d numpy object arrays of element codes; F_q
matrices (supports S, coefficient matrices Cmat) are int64 arrays.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import matrix_core as mc
from .field_core import FieldTower, make_tower


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class LinearCode:
    tower: FieldTower
    G: np.ndarray

    @property
    def k(self) -> int:
        return self.G.shape[0]

    @property
    def n(self) -> int:
        return self.G.shape[1]

    def parity_check(self) -> np.ndarray:
        """An (n-k) x n matrix H with G H^T = 0."""
        return mc.right_kernel(self.G, self.tower).T.copy()

    def encode(self, u) -> np.ndarray:
        u = mc.as_matrix([list(u)], self.tower)
        return mc.matmul(u, self.G, self.tower)[0]

    def contains(self, v) -> bool:
        stacked = np.vstack([self.G, np.asarray(v, dtype=object)[None, :]])
        return mc.rank(stacked, self.tower) == self.k


@dataclass
class Planted:
    S: np.ndarray
    Cmat: np.ndarray
    c: np.ndarray


@dataclass
class DecodingInstance:
    code: LinearCode
    y: np.ndarray
    r: int
    planted: Planted | None = None
    seed: int | None = None

    @property
    def tower(self) -> FieldTower:
        return self.code.tower

    @property
    def q(self) -> int:
        return self.tower.q

    @property
    def m(self) -> int:
        return self.tower.m

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def error(self) -> np.ndarray | None:
        if self.planted is None:
            return None
        return vec_from_mat(mc.matmul(self.planted.S, self.planted.Cmat, self.tower.base), self.tower)


@dataclass
class ExtendedCode:
    """Systematic data for C + <y>, in permuted coordinates.

    Position i of the permuted coordinates is original position perm[i].
    """

    instance: DecodingInstance
    R: np.ndarray
    Gtilde: np.ndarray
    Htilde: np.ndarray
    perm: list[int] = field(default_factory=list)

    @property
    def tower(self) -> FieldTower:
        return self.instance.tower

    @property
    def k(self) -> int:
        return self.instance.k

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def r(self) -> int:
        return self.instance.r

    def to_permuted(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=object)
        return v[self.perm]

    def from_permuted(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=object)
        out = np.empty(len(v), dtype=object)
        out[self.perm] = v
        return out


# ---------------------------------------------------------------------------


def mat_of(x, tower: FieldTower) -> np.ndarray:
    """Mat(x): the m x n matrix over F_q whose column j holds the coordinates of x_j."""
    x = list(x)
    M = np.zeros((tower.m, len(x)), dtype=np.int64)
    for j, v in enumerate(x):
        M[:, j] = tower.to_coords(int(v))
    return M


def vec_from_mat(M, tower: FieldTower) -> np.ndarray:
    M = np.asarray(M)
    out = np.empty(M.shape[1], dtype=object)
    for j in range(M.shape[1]):
        out[j] = tower.from_coords([int(c) for c in M[:, j]])
    return out


def rank_weight(x, tower: FieldTower) -> int:
    if len(x) == 0:
        return 0
    return mc.rank(mat_of(x, tower), tower.base)


def vec_add(a, b, tower: FieldTower) -> np.ndarray:
    return np.array([tower.add(int(x), int(y)) for x, y in zip(a, b)] or [], dtype=object)


def vec_sub(a, b, tower: FieldTower) -> np.ndarray:
    return np.array([tower.sub(int(x), int(y)) for x, y in zip(a, b)] or [], dtype=object)


def vec_scale(lam: int, a, tower: FieldTower) -> np.ndarray:
    return np.array([tower.mul(lam, int(x)) for x in a] or [], dtype=object)


def gv_radius(m: int, n: int, k: int) -> int:
    """Rough rank Gilbert-Varshamov radius used only for a warning."""
    return ((n - k) * m) // (n + m)


def gen_instance(m: int, n: int, k: int, r: int, seed: int, q: int = 2) -> DecodingInstance:
    if r < 1:
        raise CodeError("target rank r must be >= 1")
    if r > min(m, n):
        raise CodeError(f"r={r} exceeds min(m, n)={min(m, n)}")
    if not 0 < k < n:
        raise CodeError(f"need 0 < k < n, got k={k}, n={n}")
    if r > gv_radius(m, n, k):
        warnings.warn(f"r={r} is above the rank GV radius {gv_radius(m, n, k)}; "
                      "decoding may not be unique", stacklevel=2)
    tower = make_tower(q, m)
    rng = np.random.default_rng(seed)
    G = mc.random_full_rank(k, n, tower, rng)
    code = LinearCode(tower, G)
    S = mc.random_full_rank(m, r, tower.base, rng)
    Cmat = mc.random_full_rank(r, n, tower.base, rng)
    u = [tower.random_element(rng) for _ in range(k)]
    c = code.encode(u)
    e = vec_from_mat(mc.matmul(S, Cmat, tower.base), tower)
    y = vec_add(c, e, tower)
    return DecodingInstance(code, y, r, Planted(S, Cmat, c), seed)


def extend_code(inst: DecodingInstance) -> ExtendedCode:
    tower = inst.tower
    k, n = inst.k, inst.n
    stacked = np.vstack([inst.code.G, np.asarray(inst.y, dtype=object)[None, :]])
    if mc.rank(stacked, tower) < k + 1:
        raise CodeError("received word lies in the code; there is no error to find")
    perm, Gt = mc.systematic_form(stacked, tower)
    R = Gt[:, k + 1:].copy()
    Ht = mc.zeros(n - k - 1, n, tower)
    for i in range(n - k - 1):
        for j in range(k + 1):
            Ht[i, j] = tower.neg(R[j, i])
        Ht[i, k + 1 + i] = 1
    return ExtendedCode(inst, R, Gt, Ht, perm)


def syndrome_zero(code: LinearCode, v) -> bool:
    H = code.parity_check()
    s = mc.matmul(H, mc.as_matrix([[x] for x in v], code.tower), code.tower)
    return mc.is_zero(s)


# ---------------------------------------------------------------------------
# JSON


def instance_to_dict(inst: DecodingInstance) -> dict:
    t = inst.tower
    d = {
        "q": t.q, "m": t.m, "n": inst.n, "k": inst.k, "r": inst.r,
        "modulus": list(t.modulus),
        "G": [[t.format(int(x)) for x in row] for row in inst.code.G],
        "y": [t.format(int(x)) for x in inst.y],
        "seed": inst.seed,
    }
    if inst.planted is not None:
        d["planted"] = {
            "S": inst.planted.S.tolist(),
            "Cmat": inst.planted.Cmat.tolist(),
            "c": [t.format(int(x)) for x in inst.planted.c],
        }
    return d


def instance_from_dict(d: dict) -> DecodingInstance:
    try:
        q, m, r = int(d["q"]), int(d["m"]), int(d["r"])
        tower = make_tower(q, m)
        if "modulus" in d and tuple(d["modulus"]) != tower.modulus:
            tower = FieldTower(q, m, d["modulus"])
        G = mc.as_matrix([[tower.parse(x) for x in row] for row in d["G"]], tower)
        y = np.array([tower.parse(x) for x in d["y"]], dtype=object)
    except (KeyError, TypeError) as exc:
        raise CodeError(f"malformed instance: {exc}") from exc
    if G.shape[1] != len(y):
        raise CodeError("G and y have different lengths")
    planted = None
    if d.get("planted"):
        p = d["planted"]
        planted = Planted(np.array(p["S"], dtype=np.int64), np.array(p["Cmat"], dtype=np.int64),
                          np.array([tower.parse(x) for x in p["c"]], dtype=object))
    return DecodingInstance(LinearCode(tower, G), y, r, planted, d.get("seed"))


def dumps_instance(inst: DecodingInstance) -> str:
    return json.dumps(instance_to_dict(inst))


def loads_instance(text: str) -> DecodingInstance:
    return instance_from_dict(json.loads(text))
