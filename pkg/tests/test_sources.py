import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import _oracles as oracle
from extractorlab.errors import EmptySupport, InputError, NoIsotropicDirection, NotADistribution
from extractorlab.extractor import form_matrix
from extractorlab.field import make_field
from extractorlab.sources import (
    WeightedSet,
    adversarial_line_source,
    dyadic_index,
    flat_source,
    general_source,
    isotropic_direction,
    level_sets,
    load_source,
    min_entropy_rate,
    point_mass,
    random_general_source,
    sample,
    save_source,
    source_digest,
    source_from_json,
    source_to_json,
    uniform_source,
    weighted_from_source,
)


def test_flat_source_min_entropy():
    f = make_field(7)
    assert flat_source(f, 2, [(1, 1)]).min_entropy() == 0
    sixteen = [(a, b) for a in range(4) for b in range(4)]
    assert flat_source(f, 2, sixteen).min_entropy() == 4
    assert uniform_source(f, 2).min_entropy() == pytest.approx(2 * math.log2(7))
    assert uniform_source(f, 2).exact_weights[0] == Fraction(1, 49)


def test_flat_source_rejects_empty():
    with pytest.raises(EmptySupport):
        flat_source(make_field(7), 2, [])


def test_general_source_validation():
    f = make_field(7)
    with pytest.raises(NotADistribution):
        general_source(f, 1, [(0,), (1,)], [0.5, 0.6])
    with pytest.raises(NotADistribution):
        general_source(f, 1, [(0,), (1,)], [1.0, 0.0])
    with pytest.raises(InputError):
        general_source(f, 1, [(0,), (0,)], [0.5, 0.5])


def test_min_entropy_rate_examples():
    f = make_field(7)
    assert min_entropy_rate(uniform_source(f, 2)) == 1.0
    assert min_entropy_rate(point_mass(f, (3, 4))) == 0.0
    line = flat_source(f, 2, [(t, 0) for t in range(7)])
    assert min_entropy_rate(line) == 0.5


def test_level_sets_examples():
    f = make_field(7)
    flat = flat_source(f, 1, [(0,), (1,), (2,)])
    assert len(level_sets(flat).layers) == 1
    s = general_source(f, 1, [(0,), (1,), (2,), (3,)], [0.5, 0.25, 0.125, 0.125])
    layers = level_sets(s).layers
    assert [(l.ell, len(l.indices)) for l in layers] == [(1, 1), (2, 1), (3, 2)]


@pytest.mark.parametrize(
    "w, ell",
    [(1.0, 0), (0.5, 1), (0.75, 0), (0.2, 2), (0.25, 2), (0.2500001, 1), (Fraction(1, 3), 1), (Fraction(1, 4), 2), (Fraction(1, 5), 2)],
)
def test_dyadic_index(w, ell):
    assert dyadic_index(w) == ell
    assert 2.0 ** (-ell - 1) < w <= 2.0 ** (-ell)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_level_sets_partition(seed, size):
    rng = np.random.default_rng(seed)
    s = random_general_source(make_field(11), 2, size, rng)
    dec = level_sets(s)
    seen = np.concatenate([l.indices for l in dec.layers])
    assert sorted(seen.tolist()) == list(range(s.size))
    assert np.array_equal(sum(dec.restriction(l) for l in dec.layers), s.weights)
    for layer in dec.layers:
        assert np.all(layer.weights > 2.0 ** (-layer.ell - 1))
        assert np.all(layer.weights <= 2.0 ** (-layer.ell + 1))
        assert len(layer.indices) <= 2 ** (layer.ell + 1)
        assert len(layer.indices) * layer.weights.min() <= 2
    assert len(dec.layers) <= math.ceil(math.log2(1 / s.weights.min())) + 1


def test_adversarial_line_p13():
    f = make_field(13)
    s = adversarial_line_source(f, 2)
    assert isotropic_direction(f, 2) == (1, 5)
    assert {tuple(r) for r in s.points.tolist()} == {(t, 5 * t % 13) for t in range(13)}
    assert min_entropy_rate(s) == 0.5


def test_adversarial_line_needs_square_root_of_minus_one():
    with pytest.raises(NoIsotropicDirection):
        adversarial_line_source(make_field(7), 2)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31])
def test_isotropic_direction_is_lexicographically_first(p):
    f = make_field(p)
    assert isotropic_direction(f, 3) == oracle.isotropic_vectors(p, 3)[0]
    if p % 4 == 1:
        assert isotropic_direction(f, 2) == oracle.isotropic_vectors(p, 2)[0]
    s = adversarial_line_source(f, 3)
    assert min_entropy_rate(s) == 1 / 3
    assert np.all(form_matrix(s.points, s.points, p) == 0)


def test_weighted_set_rejects_large_weights():
    f = make_field(5)
    with pytest.raises(InputError):
        WeightedSet.weighted(f, 1, [(0,)], [1.5])


def test_weighted_from_source():
    f = make_field(5)
    s = general_source(f, 1, [(0,), (1,)], [0.25, 0.75])
    ws, scale = weighted_from_source(s)
    assert scale == 0.75
    assert np.allclose(ws.weights * scale, s.weights)
    assert np.max(np.abs(ws.weights)) == 1


def test_sampling_is_reproducible():
    f = make_field(7)
    s = general_source(f, 1, [(0,), (1,), (2,)], [0.2, 0.3, 0.5])
    a = sample(s, 1000, np.random.default_rng(42))
    b = sample(s, 1000, np.random.default_rng(42))
    assert np.array_equal(a, b)
    freq = np.bincount(a[:, 0], minlength=3) / 1000
    assert np.allclose(freq, [0.2, 0.3, 0.5], atol=0.06)


def test_json_roundtrip(tmp_path):
    f = make_field(11)
    g = random_general_source(f, 2, 10, np.random.default_rng(1))
    flat = flat_source(f, 2, [(1, 2), (3, 4)], seed=9)
    for s in (g, flat):
        doc = source_to_json(s)
        assert set(doc) <= {"p", "n", "kind", "support", "weights", "seed"}
        back = source_from_json(json.loads(json.dumps(doc)))
        assert np.array_equal(back.points, s.points)
        assert np.array_equal(back.weights, s.weights)
        assert source_digest(back) == source_digest(s)
        save_source(s, tmp_path / "x.json")
        assert source_digest(load_source(tmp_path / "x.json")) == source_digest(s)
    assert "weights" not in source_to_json(flat)
    assert source_to_json(flat)["seed"] == 9


def test_json_rejects_bad_documents(tmp_path):
    with pytest.raises(InputError):
        source_from_json({"p": 7, "n": 1, "kind": "general", "support": [[0]]})
    with pytest.raises(InputError):
        source_from_json({"p": 7, "kind": "flat", "support": [[0]]})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(InputError):
        load_source(bad)
