import io
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peercf.dataset import (
    Schema,
    destandardize,
    load_dataset,
    outcome_extent,
    standardize,
)
from peercf.errors import DuplicateId, EmptyDataset, MissingColumn, ParseError

BASIC = b"id,poverty,outcome\nA,1.0,10.0\nB,2.0,20.0\nC,3.0,30.0\n"
SCHEMA = Schema(id_column="id", outcome="outcome", treatments=("poverty",))


def test_load_three_rows_in_file_order():
    ds = load_dataset(BASIC, SCHEMA)
    assert [u.id for u in ds.units] == ["A", "B", "C"]
    assert [u.outcome for u in ds.units] == [10.0, 20.0, 30.0]
    assert ds.units[0].values.tolist() == [1.0, 10.0]


def test_load_accepts_file_object():
    ds = load_dataset(io.BytesIO(BASIC), SCHEMA)
    assert len(ds) == 3


def test_missing_outcome_column():
    with pytest.raises(MissingColumn) as err:
        load_dataset(b"id,poverty\nA,1.0\n", SCHEMA)
    assert err.value.name == "outcome"


def test_missing_declared_name_column():
    schema = Schema(id_column="id", name_column="name", outcome="outcome",
                    treatments=("poverty",))
    with pytest.raises(MissingColumn) as err:
        load_dataset(BASIC, schema)
    assert err.value.name == "name"


def test_unparseable_cell_reports_row_and_column():
    bad = b"id,poverty,outcome\nA,1.0,10.0\nB,oops,20.0\n"
    with pytest.raises(ParseError) as err:
        load_dataset(bad, SCHEMA)
    assert err.value.row == 3
    assert err.value.column == "poverty"


def test_missing_cell_rejected_not_imputed():
    bad = b"id,poverty,outcome\nA,1.0,10.0\nB,,20.0\n"
    with pytest.raises(ParseError) as err:
        load_dataset(bad, SCHEMA)
    assert err.value.column == "poverty"


def test_non_finite_cell_rejected():
    with pytest.raises(ParseError):
        load_dataset(b"id,poverty,outcome\nA,inf,10.0\n", SCHEMA)
    with pytest.raises(ParseError):
        load_dataset(b"id,poverty,outcome\nA,nan,10.0\n", SCHEMA)


def test_duplicate_id():
    bad = b"id,poverty,outcome\nA,1.0,10.0\nA,2.0,20.0\n"
    with pytest.raises(DuplicateId) as err:
        load_dataset(bad, SCHEMA)
    assert err.value.unit_id == "A"


def test_empty_dataset():
    with pytest.raises(EmptyDataset):
        load_dataset(b"id,poverty,outcome\n", SCHEMA)


def test_header_whitespace_trimmed_and_extras_ignored():
    csv = b" id , poverty ,junk, outcome \nA,1.0,x,10.0\n"
    ds = load_dataset(csv, SCHEMA)
    assert ds.units[0].values.tolist() == [1.0, 10.0]


def test_quoted_fields_rfc4180():
    csv = b'id,name,poverty,outcome\n"A","Smith, County",1.0,10.0\n'
    schema = Schema(id_column="id", name_column="name", outcome="outcome",
                    treatments=("poverty",))
    ds = load_dataset(csv, schema)
    assert ds.units[0].name == "Smith, County"


def test_load_is_deterministic():
    a = load_dataset(BASIC, SCHEMA)
    b = load_dataset(BASIC, SCHEMA)
    assert [u.id for u in a.units] == [u.id for u in b.units]
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.stats.mean, b.stats.mean)
    assert np.array_equal(a.stats.sd, b.stats.sd)


def test_schema_rejects_outcome_in_treatments():
    with pytest.raises(ValueError):
        Schema(id_column="id", outcome="x", treatments=("x", "y"))


def test_schema_rejects_duplicate_names():
    with pytest.raises(ValueError):
        Schema(id_column="id", outcome="out", treatments=("a", "a"))


def test_schema_warns_past_attribute_envelope():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        Schema(id_column="id", outcome="out",
               treatments=tuple(f"t{i}" for i in range(15)))
    assert any("envelope" in str(w.message) for w in caught)


def test_standardize_mean_vector_is_zero():
    ds = load_dataset(BASIC, SCHEMA)
    z = standardize(ds.stats.mean, ds.stats)
    assert np.allclose(z, 0.0)


def test_standardize_constant_attribute_maps_to_zero():
    csv = b"id,poverty,outcome\nA,5.0,1.0\nB,5.0,2.0\n"
    ds = load_dataset(csv, SCHEMA)
    assert ds.stats.sd[0] == 0.0
    z = standardize(np.array([123.0, 1.5]), ds.stats)
    assert z[0] == 0.0


def test_standardize_one_sd_above_mean_is_ones():
    ds = load_dataset(BASIC, SCHEMA)
    z = standardize(ds.stats.mean + ds.stats.sd, ds.stats)
    assert np.allclose(z, 1.0)


def test_standardized_columns_have_zero_mean_unit_sd():
    rng = np.random.default_rng(5)
    rows = rng.normal(3.0, 2.5, size=(200, 2))
    lines = ["id,poverty,outcome"] + [
        f"{i},{float(rows[i, 0])!r},{float(rows[i, 1])!r}" for i in range(200)
    ]
    ds = load_dataset(("\n".join(lines) + "\n").encode(), SCHEMA)
    z = standardize(ds.values, ds.stats)
    assert np.allclose(z.mean(axis=0), 0.0, atol=1e-9)
    assert np.allclose(z.std(axis=0), 1.0, atol=1e-9)


@given(
    st.lists(
        st.tuples(
            st.floats(-1e6, 1e6, allow_nan=False),
            st.floats(-1e6, 1e6, allow_nan=False),
        ),
        min_size=2,
        max_size=30,
    )
)
@settings(max_examples=50, deadline=None)
def test_standardize_round_trip(rows):
    values = np.array(rows, dtype=np.float64)
    ds = None
    lines = ["id,poverty,outcome"] + [
        f"{i},{float(a)!r},{float(b)!r}" for i, (a, b) in enumerate(values)
    ]
    ds = load_dataset(("\n".join(lines) + "\n").encode(), SCHEMA)
    for row in ds.values:
        back = destandardize(standardize(row, ds.stats), ds.stats)
        scale = np.maximum(1.0, np.abs(row))
        live = ds.stats.sd > 0
        assert np.all(np.abs(back - row)[live] <= 1e-9 * scale[live])


def test_outcome_extent_median_midpoint():
    csv = b"id,poverty,outcome\nA,1,1\nB,2,2\nC,3,9\n"
    assert outcome_extent(load_dataset(csv, SCHEMA)) == (1.0, 9.0, 2.0)


def test_outcome_extent_degenerate():
    csv = b"id,poverty,outcome\nA,1,5\nB,2,5\n"
    assert outcome_extent(load_dataset(csv, SCHEMA)) == (5.0, 5.0, 5.0)


def test_outcome_extent_configured_midpoint():
    csv = b"id,poverty,outcome\nA,1,-4\nB,2,6\n"
    assert outcome_extent(load_dataset(csv, SCHEMA), midpoint=0.0) == (-4.0, 6.0, 0.0)
