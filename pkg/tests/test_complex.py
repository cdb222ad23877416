import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currents import Chain, boundary, fixture, fixture_path, load_complex, parse_complex, validate_complex
from currents.complex import ComplexFormatError, DegenerateSimplexError, chain_from_json, chain_to_json, permutation_sign

from conftest import random_chain


def test_tri_counts_and_volumes(tri):
    assert [tri.count(m) for m in range(3)] == [3, 3, 1]
    assert tri.simplices[1] == ((0, 1), (0, 2), (1, 2))
    assert tri.volume(2)[0] == pytest.approx(0.5, abs=1e-15)
    assert sorted(tri.volume(1)) == pytest.approx([1.0, 1.0, math.sqrt(2)], abs=1e-15)
    assert list(tri.volume(0)) == [1.0, 1.0, 1.0]


def test_edge1(edge1):
    assert [edge1.count(m) for m in range(2)] == [2, 1]
    assert edge1.volume(1)[0] == 1.0


def test_repeated_vertex_rejected():
    text = "dim 2\nvertices 3\n0 0\n1 0\n0 1\nsimplices 2 1\n0 1 1\n"
    with pytest.raises(DegenerateSimplexError, match="line 7"):
        parse_complex(text)


def test_collinear_simplex_rejected():
    text = "dim 2\nvertices 3\n0 0\n1 0\n2 0\nsimplices 2 1\n0 1 2\n"
    with pytest.raises(DegenerateSimplexError):
        parse_complex(text)


def test_duplicate_simplex_rejected():
    text = "dim 2\nvertices 3\n0 0\n1 0\n0 1\nsimplices 1 2\n0 1\n1 0\n"
    with pytest.raises(ComplexFormatError, match="line 8: duplicate"):
        parse_complex(text)


@pytest.mark.parametrize(
    "text, line",
    [
        ("dim 2\nvertices 2\n0 0\n1\nsimplices 1 1\n0 1\n", 4),
        ("dim 1\nvertices 2\n0\n1\nsimplices 1 1\n0 5\n", 6),
        ("dim 1\nvertices 2\n0\nx\nsimplices 1 1\n0 1\n", 4),
        ("dims 1\n", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ComplexFormatError, match=f"line {line}"):
        parse_complex(text)


def test_comments_and_user_order():
    text = "# header\ndim 2\nvertices 3\n0 0\n# mid\n1 0\n0 1\nsimplices 2 1\n2 0 1\n"
    C = parse_complex(text)
    assert C.simplices[2] == ((0, 1, 2),)
    assert C.orientation((2, 0, 1)) == 1
    assert C.orientation((1, 0, 2)) == -1


def test_permutation_sign():
    assert permutation_sign([0, 1, 2]) == 1
    assert permutation_sign([1, 0, 2]) == -1
    assert permutation_sign([2, 0, 1]) == 1


def test_boundary_examples(tri, edge1):
    sigma = tri.chain(2, {0: 1})
    d = boundary(sigma)
    assert dict(d.coefficients) == {tri.index((1, 2)): 1, tri.index((0, 2)): -1, tri.index((0, 1)): 1}
    assert boundary(d).is_zero()
    e = edge1.chain(1, {0: 3})
    assert dict(boundary(e).coefficients) == {1: 3, 0: -3}
    with pytest.raises(ValueError, match="below dimension zero"):
        boundary(edge1.chain(0, {0: 1}))


def test_vertex_tuple_keys_respect_orientation(tri):
    assert tri.chain(1, {(1, 0): 2}) == tri.chain(1, {(0, 1): -2})


def test_boundary_squared_zero_random(all_complexes):
    rng = np.random.default_rng(0)
    for C in all_complexes.values():
        for m in range(2, C.top_dim + 1):
            for _ in range(1000):
                T = random_chain(rng, C, m, -5, 5)
                assert boundary(boundary(T)).is_zero()


@settings(max_examples=60, deadline=None)
@given(
    a=st.lists(st.integers(-50, 50), min_size=6, max_size=6),
    b=st.lists(st.integers(-50, 50), min_size=6, max_size=6),
    c=st.integers(-10**30, 10**30),
)
def test_boundary_linear_exact(a, b, c):
    C = fixture("square")
    T1 = Chain.from_dense(C, 1, a[:5])
    T2 = Chain.from_dense(C, 1, b[:5])
    assert boundary(T1 + T2) == boundary(T1) + boundary(T2)
    assert boundary(c * T1) == c * boundary(T1)


def test_big_integer_coefficients_do_not_wrap(tri):
    big = 2**70
    d = boundary(tri.chain(2, {0: big}))
    assert set(d.coefficients.values()) == {big, -big}


def test_loading_is_deterministic():
    a = load_complex(fixture_path("square"))
    b = load_complex(fixture_path("square"))
    assert a.simplices == b.simplices
    for m in range(1, a.top_dim + 1):
        A, B = a.boundary_matrix(m), b.boundary_matrix(m)
        assert A.toarray().tobytes() == B.toarray().tobytes()
    assert all(x.tobytes() == y.tobytes() for x, y in zip(a.volumes, b.volumes))


def test_validate_passes_on_fixtures(tri, edge1, square):
    for C in (tri, edge1, square):
        report = validate_complex(C)
        assert report.passed, report.checks


def test_validate_detects_corrupt_boundary(tri):
    B = tri.boundary_matrix(2).toarray()
    B[0, 0] = -B[0, 0]
    report = validate_complex(tri.with_boundary_matrix(2, B))
    assert not report.passed
    assert report.failed() == ["boundary_squared_zero[2]"]


def test_chain_canonical_form(tri):
    T = tri.chain(1, {2: 0, 0: 1})
    assert list(T.coefficients) == [0]
    with pytest.raises(IndexError, match="99"):
        tri.chain(1, {99: 1})
    with pytest.raises(TypeError):
        Chain(tri, 1, {0: 0.5}, "integer")


def test_chain_json_round_trip(tri):
    T = tri.chain(1, {0: 2, 2: -3})
    again = chain_from_json(tri, json.loads(json.dumps(chain_to_json(T))))
    assert again == T and again.mode == "integer"
    R = tri.chain(1, {1: 0.1 + 0.2}, "real")
    assert chain_from_json(tri, json.dumps(chain_to_json(R))) == R


def test_chain_json_rejects_bad_index(tri):
    with pytest.raises(ComplexFormatError, match="99"):
        chain_from_json(tri, {"dim": 1, "mode": "integer", "coefficients": [[99, 1]]})
