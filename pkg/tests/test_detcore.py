"""Tests for det(Id - xM), the pi_v family and the adjugate."""
from fractions import Fraction as F
import pytest

from markovgf.config import Settings
from markovgf.detcore import (
    adjugate,
    char_bundle,
    charpoly_faddeev_leverrier,
    det_id_minus_xM,
    geometric_stop_law,
    k0_poly,
    pi_polys,
    solve_rational,
    taboo_resolvent_column,
    tilted_measure,
)
from markovgf.errors import InvariantViolation
from markovgf.exactalg import Polynomial, RationalFunction


def P(*coeffs):
    return Polynomial(tuple(F(c) for c in coeffs))


TWELFTHS_PI = {
    "1": P(1, F(-5, 6), F(1, 36), F(-127, 1728)),
    "2": P(1, -1, F(35, 144), F(-1, 72)),
    "3": P(1, F(-11, 12), F(5, 24), F(-29, 1728)),
    "4": P(1, -1, F(23, 144), F(5, 432)),
}


def test_twelfths_determinant(twelfths_chain):
    """det(Id - xM) = (x - 1)(5x^3 - 15x^2 + 54x - 216)/216."""
    expected = P(-1, 1) * P(-216, 54, -15, 5) * F(1, 216)
    det = det_id_minus_xM(twelfths_chain, verify=True)
    assert det == expected
    assert det.coeffs == (1, F(-5, 4), F(23, 72), F(-5, 54), F(5, 216))


def test_twelfths_pi_family(twelfths_chain):
    pi = pi_polys(twelfths_chain)
    assert dict(pi) == TWELFTHS_PI
    assert [pi[v](1) * 1728 for v in "1234"] == [209, 396, 475, 296]
    assert all(pi[v](0) == 1 for v in "1234")


def test_twelfths_k0_and_z(twelfths_chain):
    assert k0_poly(twelfths_chain) == P(1, F(-1, 4), F(5, 72), F(-5, 216))
    bundle = char_bundle(twelfths_chain)
    assert bundle.Z == F(43, 54)
    assert bundle.Z == sum(bundle.pi_at(1))


def test_faddeev_leverrier_agrees_with_bareiss(all_chains):
    for chain in all_chains:
        assert charpoly_faddeev_leverrier(chain) == det_id_minus_xM(chain)


def test_swap_chain(swap_chain):
    assert det_id_minus_xM(swap_chain) == P(1, 0, -1)
    assert k0_poly(swap_chain) == P(1, 1)
    adj = adjugate(swap_chain)
    assert adj.entry("1", "1") == P(1)
    assert adj.entry("1", "2") == P(0, 1)


def test_adjugate_entry_of_twelfths_chain(twelfths_chain):
    adj = adjugate(twelfths_chain, verify=True)
    assert adj.entry("1", "2") == P(0, F(1, 6), F(11, 144), F(-1, 72))
    assert adj.diagonal() == TWELFTHS_PI


def test_adjugate_methods_agree(random_chains):
    """Cofactor expansion and column solves give the same matrix."""
    for chain in random_chains[:12]:
        by_cofactors = adjugate(chain, Settings(cofactor_max_dim=10))
        by_columns = adjugate(chain, Settings(cofactor_max_dim=0))
        assert by_cofactors.entries == by_columns.entries
        assert by_columns.verify()


def test_adjugate_diagonal_is_pi(all_chains):
    for chain in all_chains:
        assert adjugate(chain).diagonal() == dict(pi_polys(chain))


def test_taboo_resolvent_matches_adjugate(twelfths_chain):
    den, nums = taboo_resolvent_column(twelfths_chain, "2")
    adj = adjugate(twelfths_chain)
    det = det_id_minus_xM(twelfths_chain)
    assert RationalFunction(den) == RationalFunction(TWELFTHS_PI["2"])
    # G^{>=1}_{1,2} = Adj_{1,2} / pi_2
    assert RationalFunction(nums[0], den) == RationalFunction(adj.entry("1", "2"), TWELFTHS_PI["2"])
    # G^{>=1}_{2,2} = 1 - det / pi_2
    assert RationalFunction(nums[1], den) == 1 - RationalFunction(det, TWELFTHS_PI["2"])


def test_pi_positive_on_open_interval(all_chains):
    grid = [F(k, 100) for k in range(1, 100)]
    for chain in all_chains:
        pi = pi_polys(chain)
        for x0 in grid:
            assert all(p(x0) > 0 for p in pi.values())


def test_geometric_stop_law_swap(swap_chain):
    assert geometric_stop_law(swap_chain, "1", F(1, 2)) == (F(2, 3), F(1, 3))
    with pytest.raises(ValueError):
        geometric_stop_law(swap_chain, "1", 1)


def test_geometric_stop_law_is_a_distribution(twelfths_chain):
    for x0 in (F(1, 100), F(1, 2), F(9, 10)):
        for u in twelfths_chain.states:
            law = geometric_stop_law(twelfths_chain, u, x0)
            assert sum(law) == 1
            assert all(p > 0 for p in law)
    small = geometric_stop_law(twelfths_chain, "1", F(1, 100))
    assert small[0] > F(99, 100)


def test_tilted_measure(twelfths_chain):
    mu = tilted_measure(twelfths_chain, 1)
    assert mu == (F(209, 1376), F(396, 1376), F(475, 1376), F(296, 1376))
    half = tilted_measure(twelfths_chain, F(1, 2))
    assert sum(half) == 1
    assert all(p > 0 for p in half)


def test_solve_rational():
    assert solve_rational([[2, 1], [1, 3]], [3, 5]) == [F(4, 5), F(7, 5)]
    # zero leading pivot needs a row swap
    assert solve_rational([[0, F(1, 2)], [F(1, 3), 0]], [1, 1]) == [3, 2]
    assert solve_rational([[F(1, 4)]], [F(1, 2)]) == [2]
    with pytest.raises(InvariantViolation):
        solve_rational([[1, 2], [2, 4]], [1, 2])


def test_solve_rational_mean_return_time(twelfths_chain):
    """(Id - M^{*1}) h = 1 gives E_1(tau_1) = 1376/209."""
    m = twelfths_chain.matrix
    a = [[(1 if i == j else 0) - (0 if j == 0 else m[i][j]) for j in range(4)] for i in range(4)]
    h = solve_rational(a, [F(1)] * 4)
    assert h == [F(1376, 209), F(1992, 209), F(2040, 209), F(1860, 209)]
