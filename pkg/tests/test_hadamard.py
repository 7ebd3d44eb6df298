"""Hadamard construction, equivalence, enumeration and obstruction tests."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qperm.errors import ParseError, UnknownName
from qperm.hadamard import (
    Hadamard,
    bjorck_froberg,
    butson_enumerate,
    certificate_resum,
    dephase,
    dita,
    dita_fourier_params,
    equivalent,
    f4q,
    f6_three_two,
    f6_two_three,
    fingerprint,
    fourier,
    haagerup,
    haar_sample,
    i_g_estimate,
    is_regular,
    level,
    named,
    obstruction_table,
    obstructions,
    one_norm,
    petrescu,
    random_equivalent,
    read_but,
    read_cmat,
    strongest_obstruction,
    tao,
    tensor,
    write_but,
    write_cmat,
)

EXACT_CATALOG = [
    fourier(2),
    fourier(3),
    fourier(5),
    tao(),
    haagerup(Fraction(1, 4)),
    f4q(Fraction(1, 7)),
    f6_two_three(Fraction(1, 5), Fraction(2, 7)),
    f6_three_two(Fraction(1, 5), Fraction(1, 3)),
    petrescu(Fraction(1, 7)),
]


@pytest.mark.parametrize("h", EXACT_CATALOG, ids=lambda h: h.provenance)
def test_catalog_matrices_verify(h):
    assert h.verify()
    assert h.is_exact


def test_float_catalog_matrices_verify():
    q = complex(np.exp(0.246j * np.pi))
    for h in (bjorck_froberg(), haagerup(q), f4q(q)):
        assert not h.is_exact
        assert h.verify()


@pytest.mark.parametrize("h", EXACT_CATALOG, ids=lambda h: h.provenance)
def test_dephase_properties(h):
    d = dephase(h)
    assert d.verify() == h.verify()
    assert (d.exponents[0] == 0).all()
    assert (d.exponents[:, 0] == 0).all()
    again = dephase(d)
    assert (again.exponents == d.exponents).all()


def test_dephase_float_path():
    d = dephase(bjorck_froberg())
    assert np.allclose(d.entries[0], 1.0)
    assert np.allclose(d.entries[:, 0], 1.0)
    assert d.verify()


def test_level_divides_lcm_under_tensor():
    pairs = [(fourier(2), fourier(3)), (fourier(2), haagerup(Fraction(1, 4))),
             (fourier(3), tao())]
    for h, k in pairs:
        t = tensor(h, k)
        assert t.verify()
        assert math.lcm(h.level, k.level) % level(t) == 0


@pytest.mark.parametrize("h", EXACT_CATALOG[:6], ids=lambda h: h.provenance)
@pytest.mark.parametrize("seed", [1, 2])
def test_equivalence_and_fingerprint_invariance(h, seed):
    moved = random_equivalent(h, seed)
    assert fingerprint(h) == fingerprint(moved)
    assert equivalent(h, moved)


def test_inequivalent_pairs():
    assert not equivalent(fourier(6), tao())
    assert not equivalent(fourier(4), tensor(fourier(2), fourier(2)))


def test_fingerprint_separates_catalog():
    prints = {}
    for h in (fourier(4), tensor(fourier(2), fourier(2)), fourier(6), tao()):
        prints.setdefault(fingerprint(h), []).append(h.provenance)
    assert all(len(v) == 1 for v in prints.values())


def test_obstructed_cells_have_empty_enumeration():
    for n in range(2, 7):
        for lev in range(2, 5):
            if strongest_obstruction(n, lev) is None:
                continue
            res = butson_enumerate(n, lev, mode="any_witness")
            assert res.complete
            assert not res.matrices


def test_witness_cells_yield_verified_matrices():
    for n, lev in [(2, 2), (3, 3), (4, 2), (4, 4), (6, 3), (6, 4), (6, 6)]:
        assert strongest_obstruction(n, lev) is None
        res = butson_enumerate(n, lev, mode="any_witness")
        assert res.matrices, (n, lev)
        w = res.matrices[0]
        assert w.verify()
        assert w.level == lev and w.n == n


def test_dita_products_are_fourier_equivalent():
    for n, m in [(2, 2), (2, 3), (3, 2)]:
        l_params = dita_fourier_params(n, m)
        prod = dita(fourier(n), fourier(m), l_params)
        assert prod.verify()
        assert equivalent(prod, fourier(n * m))


def test_dita_generic_parameters_stay_hadamard():
    l_params = [[Fraction(0), Fraction(1, 5)], [Fraction(0), Fraction(3, 7)]]
    prod = dita(fourier(2), fourier(2), l_params)
    assert prod.verify()
    assert prod.n == 4
    assert prod.is_exact


def test_regular_certificates_resum():
    for h in (fourier(5), tao(), haagerup(Fraction(1, 4))):
        rep = is_regular(h)
        assert rep.regular
        assert certificate_resum(h, rep)


def test_bjorck_froberg_is_not_regular():
    rep = is_regular(bjorck_froberg())
    assert not rep.regular
    assert rep.failing_pair is not None


def test_level_detection():
    assert level(fourier(6)) == 6
    assert level(haagerup(Fraction(1, 4))) == 4
    assert level(Hadamard(entries=fourier(4).entries)) == 4
    assert math.isinf(level(bjorck_froberg()))
    assert level(fourier(1)) == 2


def test_named_catalog_dispatch():
    h = named("fourier", 4)
    assert h.n == 4
    with pytest.raises(UnknownName):
        named("nonexistent")


def test_file_round_trips(tmp_path):
    for h in EXACT_CATALOG:
        path = tmp_path / "m.but"
        write_but(h, str(path))
        back = read_but(str(path))
        assert back.level == h.level
        assert (back.exponents == h.exponents).all()
    b = bjorck_froberg()
    path = tmp_path / "m.cmat"
    write_cmat(b, str(path))
    back = read_cmat(str(path))
    assert np.allclose(back.entries, b.entries, atol=1e-12)


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.but"
    bad.write_text("2 2\n0 0\n")
    with pytest.raises(ParseError):
        read_but(str(bad))
    bad.write_text("junk\n")
    with pytest.raises(ParseError):
        read_but(str(bad))
    bad.write_text("2 2\n0 0\n0 x\n")
    with pytest.raises(ParseError):
        read_but(str(bad))


def test_one_norm_catalog_values():
    for h in EXACT_CATALOG + [bjorck_froberg()]:
        n = h.n
        assert abs(one_norm(h.entries / math.sqrt(n)) - n * math.sqrt(n)) \
            <= 1e-10


def test_one_norm_strictly_below_bound_off_catalog():
    rng = np.random.default_rng(0)
    u = haar_sample("ORTHOGONAL", 4, 1, rng)[0]
    assert one_norm(u) < 4 * 2.0


def test_haar_sample_is_orthogonal():
    rng = np.random.default_rng(7)
    mats = haar_sample("ORTHOGONAL", 5, 3, rng)
    for u in mats:
        assert np.allclose(u @ u.T, np.eye(5), atol=1e-10)
    mats = haar_sample("UNITARY", 3, 2, rng)
    for u in mats:
        assert np.allclose(u @ u.conj().T, np.eye(3), atol=1e-10)


def test_ig_estimate_deterministic_per_seed():
    a = i_g_estimate("ORTHOGONAL", 4, 4, 500, 11)
    b = i_g_estimate("ORTHOGONAL", 4, 4, 500, 11)
    assert a == b
    c = i_g_estimate("ORTHOGONAL", 4, 4, 500, 12)
    assert a.value != c.value


def test_obstruction_rules_spot_cells():
    assert strongest_obstruction(3, 2).rule == "LamLeung"
    assert strongest_obstruction(5, 2) is not None
    assert strongest_obstruction(5, 6) is not None
    assert strongest_obstruction(6, 5) is not None
    assert strongest_obstruction(6, 6) is None
    verdicts = obstructions(6, 5)
    assert any(v.obstructs for v in verdicts)


def test_obstruction_table_shape():
    grid = obstruction_table(4, 4)
    assert len(grid) == 3 and len(grid[0]) == 3
    assert grid[0][0].outcome == "exists"
    assert grid[1][0].outcome == "obstructed"


@given(st.integers(2, 5), st.integers(0, 20))
@settings(max_examples=30, deadline=None)
def test_fourier_random_moves_stay_equivalent(n, seed):
    h = fourier(n)
    moved = random_equivalent(h, seed)
    assert moved.verify()
    assert equivalent(h, moved)
