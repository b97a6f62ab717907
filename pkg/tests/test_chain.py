"""Tests for chain validation, parsing and serialization."""
from fractions import Fraction as F
import json
import pytest

from markovgf.chain import (
    Chain,
    SubmatrixView,
    delete_state,
    load_chain,
    make_chain,
    parse_chain,
    random_chain,
    serialize_chain,
    strongly_connected_components,
    zero_column,
)
from markovgf.errors import (
    ChainError,
    ChainParseError,
    DimensionMismatch,
    DuplicateStateLabel,
    NegativeEntry,
    NotIrreducible,
    NotStochastic,
    UnknownState,
)

from conftest import CHAINS_DIR, TWELFTHS_MATRIX


def test_twelfths_chain_loads_from_data_dir(twelfths_chain):
    """The bundled JSON and CSV files hold the same matrix."""
    from_json = load_chain(CHAINS_DIR / "twelfths4.json")
    from_csv = load_chain(CHAINS_DIR / "twelfths4.csv")
    assert from_json == twelfths_chain
    assert from_csv.matrix == twelfths_chain.matrix
    assert from_csv.states == ("s0", "s1", "s2", "s3")


def test_rows_must_sum_to_one_exactly():
    with pytest.raises(NotStochastic) as exc:
        Chain(("a", "b"), ((F(1, 3), F(1, 3)), (F(1, 2), F(1, 2))))
    assert exc.value.row == 0
    assert exc.value.total == F(2, 3)
    assert "matrix[0]" in str(exc.value)


def test_negative_entry_is_located():
    with pytest.raises(NegativeEntry) as exc:
        Chain(("a", "b"), ((F(3, 2), F(-1, 2)), (F(1, 2), F(1, 2))))
    assert (exc.value.row, exc.value.col) == (0, 1)
    assert "matrix[0][1]" in str(exc.value)


def test_dimension_and_label_errors():
    with pytest.raises(DimensionMismatch):
        Chain(("a",), ((1,),))
    with pytest.raises(DimensionMismatch):
        Chain(("a", "b"), ((1, 0),))
    with pytest.raises(DimensionMismatch):
        Chain(("a", "b"), ((1, 0), (1,)))
    with pytest.raises(DuplicateStateLabel):
        Chain(("a", "a"), ((0, 1), (1, 0)))


def test_reducible_chain_names_components():
    with pytest.raises(NotIrreducible) as exc:
        load_chain(CHAINS_DIR / "reducible4.json")
    assert exc.value.components == [["a", "b"], ["c", "d"]]
    assert "{a, b} | {c, d}" in str(exc.value)
    assert isinstance(exc.value, ChainError)


def test_absorbing_state_is_reducible():
    with pytest.raises(NotIrreducible):
        make_chain(["1", "2"], [[1, 0], [F(1, 2), F(1, 2)]])


def test_strongly_connected_components():
    m = [
        [F(1, 2), F(1, 2), 0],
        [F(1, 2), F(1, 2), 0],
        [0, F(1, 2), F(1, 2)],
    ]
    components = strongly_connected_components(m)
    assert sorted(components) == [[0, 1], [2]]
    assert strongly_connected_components(TWELFTHS_MATRIX) == [[0, 1, 2, 3]]


def test_unknown_state(twelfths_chain):
    with pytest.raises(UnknownState):
        twelfths_chain.index("9")
    assert twelfths_chain.index(3) == 2
    assert twelfths_chain.entry("4", "3") == F(1, 2)


def test_submatrices(twelfths_chain):
    deleted = delete_state(twelfths_chain, "2")
    assert deleted == (
        (F(5, 12), F(4, 12), F(1, 12)),
        (F(1, 12), F(4, 12), F(1, 12)),
        (F(2, 12), F(6, 12), F(3, 12)),
    )
    zeroed = zero_column(twelfths_chain, "1")
    assert all(row[0] == 0 for row in zeroed)
    assert zeroed[0][1:] == twelfths_chain.matrix[0][1:]


def test_deleted_is_zeroed_without_row_and_column(all_chains):
    for chain in all_chains:
        for k, v in enumerate(chain.states):
            zeroed = zero_column(chain, v)
            stripped = tuple(
                tuple(x for j, x in enumerate(row) if j != k)
                for i, row in enumerate(zeroed) if i != k
            )
            assert delete_state(chain, v) == stripped
            assert len(stripped) == chain.d - 1


def test_submatrix_view_kinds(twelfths_chain):
    deleted = SubmatrixView(twelfths_chain, "1", "deleted")
    assert deleted.matrix == (
        (F(3, 12), F(3, 12), F(5, 12)),
        (F(6, 12), F(4, 12), F(1, 12)),
        (F(1, 12), F(6, 12), F(3, 12)),
    )
    zeroed = SubmatrixView(twelfths_chain, 1, "zeroed")
    assert zeroed.state == "1"
    assert zeroed.matrix == zero_column(twelfths_chain, "1")
    assert sum(x != 0 for row in zeroed.matrix for x in row) == 12
    with pytest.raises(ValueError):
        SubmatrixView(twelfths_chain, "1", "transposed")
    with pytest.raises(UnknownState):
        SubmatrixView(twelfths_chain, "9", "deleted")


def test_json_parse_errors_carry_locations():
    with pytest.raises(ChainParseError) as exc:
        parse_chain('{"matrix": [[1, 0], [0, 1]')
    assert "line 1" in str(exc.value)
    with pytest.raises(ChainParseError) as exc:
        parse_chain('{"matrix": [["1/2", "x"], ["1", "0"]]}')
    assert exc.value.field == "matrix[0][1]"
    with pytest.raises(ChainParseError):
        parse_chain('[1, 2]')
    with pytest.raises(DimensionMismatch):
        parse_chain('{"states": ["a"], "matrix": [[0, 1], [1, 0]]}')


def test_json_floats_read_as_decimals():
    chain = parse_chain('{"matrix": [[0.25, 0.75], [0.5, 0.5]]}')
    assert chain.matrix[0] == (F(1, 4), F(3, 4))
    assert chain.states == ("s0", "s1")


def test_csv_parse_error_location():
    with pytest.raises(ChainParseError) as exc:
        parse_chain("0,1\n1,abc\n", fmt="csv")
    assert exc.value.field == "line 2, column 2"


def test_serialize_round_trip(twelfths_chain, lazy_chain):
    for chain in (twelfths_chain, lazy_chain):
        text = serialize_chain(chain, "json")
        assert parse_chain(text, "json") == chain
        data = json.loads(text)
        assert data["states"] == list(chain.states)
        csv_text = serialize_chain(chain, "csv")
        assert parse_chain(csv_text, "csv").matrix == chain.matrix
    assert serialize_chain(lazy_chain, "csv") == "3/4,1/4\n2/3,1/3\n"


def test_load_chain_from_tmp_file(chain_file):
    path = chain_file('{"states": ["x", "y"], "matrix": [["0", "1"], ["1/3", "2/3"]]}')
    chain = load_chain(path)
    assert chain.states == ("x", "y")
    csv_path = chain_file("0,1\n1/3,2/3\n", name="chain.csv")
    assert load_chain(csv_path).matrix == chain.matrix
    with pytest.raises(ChainParseError):
        load_chain(path.parent / "missing.json")


def test_random_chain_is_seeded_and_irreducible():
    a = random_chain(5, seed=7)
    b = random_chain(5, seed=7)
    assert a == b
    assert a.states == ("1", "2", "3", "4", "5")
    for row in a.matrix:
        assert sum(row) == 1
    assert len(strongly_connected_components(a.matrix)) == 1
