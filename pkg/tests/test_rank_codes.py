from __future__ import annotations

import json
import warnings

import numpy as np
import pytest

from ranksyz import matrix_core as mc
from ranksyz.field_core import make_tower
from ranksyz.rank_codes import (CodeError, dumps_instance, extend_code, gen_instance, loads_instance, mat_of,
                                rank_weight, syndrome_zero, vec_from_mat, vec_sub)


def _instance(m, n, k, r, seed, q=2):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return gen_instance(m, n, k, r, seed, q)


def test_rank_weight_examples():
    T = make_tower(2, 4)
    a = T.alpha
    assert rank_weight([0, 0, 0], T) == 0
    assert rank_weight([1, 1, 0], T) == 1
    assert rank_weight([1, a, T.add(1, a)], T) == 2
    assert rank_weight([1, a, T.alpha_pow(2), T.alpha_pow(3)], T) == 4
    assert rank_weight([], T) == 0


def test_mat_roundtrip():
    T = make_tower(3, 4)
    rng = np.random.default_rng(0)
    x = [T.random_element(rng) for _ in range(7)]
    M = mat_of(x, T)
    assert M.shape == (4, 7)
    assert [int(v) for v in vec_from_mat(M, T)] == x


@pytest.mark.parametrize("params", [(14, 18, 8, 3), (8, 8, 4, 2), (10, 12, 5, 2)])
def test_gen_instance_planted(params):
    m, n, k, r = params
    inst = _instance(*params, seed=11)
    T = inst.tower
    e = inst.error
    assert rank_weight(e, T) == r
    assert inst.code.contains(vec_sub(inst.y, e, T))
    assert syndrome_zero(inst.code, inst.planted.c)
    assert inst.code.G.shape == (k, n) and T.m == m


def test_gen_instance_deterministic():
    a, b = _instance(8, 8, 4, 2, 3), _instance(8, 8, 4, 2, 3)
    assert dumps_instance(a) == dumps_instance(b)
    assert dumps_instance(a) != dumps_instance(_instance(8, 8, 4, 2, 4))


def test_extended_code_shapes():
    ext = extend_code(_instance(14, 18, 8, 3, 0))
    T = ext.tower
    assert ext.Gtilde.shape == (9, 18)
    assert ext.Htilde.shape == (9, 18)
    assert mc.is_zero(mc.matmul(ext.Gtilde, ext.Htilde.T, T))
    e = ext.to_permuted(ext.instance.error)
    assert mc.is_zero(mc.matmul(mc.as_matrix([list(e)], T), ext.Htilde.T, T))
    assert [int(v) for v in ext.from_permuted(ext.to_permuted(ext.instance.y))] == [int(v) for v in ext.instance.y]


def test_extend_code_rejects_codeword():
    inst = _instance(8, 8, 4, 2, 0)
    inst.y = inst.planted.c.copy()
    with pytest.raises(CodeError):
        extend_code(inst)


def test_json_roundtrip():
    inst = _instance(9, 10, 4, 2, 5, q=3)
    back = loads_instance(dumps_instance(inst))
    assert back.tower.modulus == inst.tower.modulus
    assert [int(x) for x in back.y] == [int(x) for x in inst.y]
    assert np.array_equal(back.planted.S, inst.planted.S)
    assert dumps_instance(back) == dumps_instance(inst)


def test_json_errors():
    d = json.loads(dumps_instance(_instance(8, 8, 4, 2, 0)))
    del d["G"]
    with pytest.raises(CodeError):
        loads_instance(json.dumps(d))
    d = json.loads(dumps_instance(_instance(8, 8, 4, 2, 0)))
    d["y"] = d["y"][:-1]
    with pytest.raises(CodeError):
        loads_instance(json.dumps(d))


@pytest.mark.parametrize("bad", [(8, 8, 4, 0), (8, 8, 4, 9), (8, 8, 8, 2), (8, 8, 0, 2)])
def test_gen_instance_errors(bad):
    with pytest.raises(CodeError):
        gen_instance(*bad, seed=0)


def test_gv_warning():
    with pytest.warns(UserWarning):
        gen_instance(6, 6, 4, 3, seed=0)
