import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from support import cyclic_sublattice_count, diag_elem, lagrangian_count_f2, random_word
from symphecke.errors import NonIntegralError, OrbitBudgetExceeded, PreconditionError
from symphecke.hecke import (
    Lattice,
    coset_representatives,
    eta_coset_witnesses,
    hecke_index,
    in_gamma_gamma,
    lattice_from_matrix,
    prime_power_parts,
)
from symphecke.symplectic import SimilitudeElement, in_gamma


def test_lattice_from_matrix():
    I = SimilitudeElement.identity(1)
    assert lattice_from_matrix(I) == Lattice(1, ((1, 0), (0, 1)))
    assert lattice_from_matrix(diag_elem(1, 2)) == Lattice(2, ((2, 0), (0, 1)))
    rng = random.Random(0)
    for _ in range(5):
        assert lattice_from_matrix(random_word(rng, 2)) == lattice_from_matrix(SimilitudeElement.identity(2))


def test_lattice_rejects_unreduced():
    with pytest.raises(ValueError):
        Lattice(2, ((2, 0), (0, 2)))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 7, 8, 9, 12])
def test_genus_one_against_sublattice_oracle(n):
    # [DERIVED] direct enumeration of cyclic-quotient sublattices
    assert hecke_index(diag_elem(1, n)) == cyclic_sublattice_count(n)


def test_genus_two_against_lagrangian_oracle():
    # [DERIVED] maximal isotropic subspaces of F_2^4
    assert hecke_index(diag_elem(1, 1, 2, 2)) == lagrangian_count_f2(2) == 15


def test_identity_and_scalars():
    assert hecke_index(SimilitudeElement.identity(2)) == 1
    assert hecke_index(diag_elem(3, 3)) == 1


def test_non_integral_rejected():
    with pytest.raises(NonIntegralError):
        hecke_index(SimilitudeElement("1/2,0;0,2"))


def test_orbit_cap():
    with pytest.raises(OrbitBudgetExceeded):
        hecke_index(diag_elem(1, 1, 6, 6), cap=100)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32))
def test_bi_invariance(seed):
    rng = random.Random(seed)
    d = rng.choice([(1, 2), (1, 4), (1, 6), (1, 9)])
    M = diag_elem(*d)
    assert hecke_index(random_word(rng, 1) @ M @ random_word(rng, 1)) == hecke_index(M)


@pytest.mark.parametrize("M", [SimilitudeElement.identity(1), diag_elem(1, 2), diag_elem(1, 1, 2, 2), diag_elem(1, 6)])
def test_coset_representatives_pairwise_inequivalent(M):
    reps = coset_representatives(M)
    assert len(reps) == hecke_index(M)
    assert all(in_gamma(x) for x in reps)
    for i, x in enumerate(reps):
        xinv = x.inverse()
        for j, y in enumerate(reps):
            assert in_gamma_gamma(M, y @ xinv) == (i == j)


def test_coset_representatives_are_deterministic():
    a = [x.matrix.to_text() for x in coset_representatives(diag_elem(1, 1, 2, 2))]
    b = [x.matrix.to_text() for x in coset_representatives(diag_elem(1, 1, 2, 2))]
    assert a == b


def test_prime_power_parts():
    assert prime_power_parts(1) == []
    assert prime_power_parts(12) == [4, 3]
    assert prime_power_parts(30) == [2, 3, 5]
    assert prime_power_parts(49) == [49]


def _transpose(x):
    return SimilitudeElement(x.matrix.T)


def test_eta_examples():
    w = eta_coset_witnesses(diag_elem(1, 2), 2)
    assert [x.matrix.to_text() for x in w] == ["1,0;0,1", "1,0;1,1"]
    w = eta_coset_witnesses(diag_elem(1, 1, 2, 2), 2)
    assert len(w) == 2 and w[1].matrix[2, 0] == 1
    w = eta_coset_witnesses(diag_elem(1, 4), 4)
    assert len(w) == 4
    for k in range(4):
        for l in range(4):
            assert (w[k].inverse() @ w[l]).matrix.to_text() == f"1,0;{l - k},1"


@pytest.mark.parametrize(
    "delta,q",
    [((1, 6), 2), ((1, 6), 3), ((1, 4), 4), ((1, 1, 2, 2), 2), ((1, 2, 4, 2), 4), ((1, 1, 9, 9), 9)],
)
def test_eta_witnesses_lie_in_distinct_cosets(delta, q):
    M = diag_elem(*delta)
    g = M.g
    w = eta_coset_witnesses(M, q)
    assert len(w) == q
    for k, x in enumerate(w):
        for l, y in enumerate(w):
            if k == l:
                continue
            z = x.inverse() @ y
            assert z.matrix[g, 0] % q != 0
            # outside Γ ∩ δΓδ^-1, and the transpose is outside Γ_δ
            assert not in_gamma_gamma(M.inverse(), z)
            assert not in_gamma_gamma(M, _transpose(z))


@pytest.mark.parametrize("delta,q", [((2, 4), 2), ((1, 6), 6), ((1, 6), 5), ((2, 3), 2), ((1, 2, 4, 2), 3)])
def test_eta_preconditions(delta, q):
    with pytest.raises(PreconditionError):
        eta_coset_witnesses(diag_elem(*delta), q)
