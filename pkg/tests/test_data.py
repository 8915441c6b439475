import numpy as np
import pytest

from mixcit.data import (
    ColumnKind,
    Dataset,
    Preprocessing,
    VariablePartition,
    apply_preprocessing,
    dataset_to_json,
    load_dataset,
    parse_kinds,
    save_dataset,
)
from mixcit.errors import ConfigurationError, DegenerateColumnError, ParseError, SchemaMismatchError

C, DN, CAT = ColumnKind.CONTINUOUS, ColumnKind.DISCRETE_NUMERIC, ColumnKind.CATEGORICAL


def test_parse_kinds():
    assert parse_kinds("c, dn,cat") == [C, DN, CAT]
    with pytest.raises(ConfigurationError):
        parse_kinds("c,x")


def test_numeric_and_categorical_projection():
    ds = Dataset.from_arrays([[0.5, 1.5], [1, 2], [3, 0]], [C, DN, CAT])
    np.testing.assert_array_equal(ds.numeric([0, 1, 2]), [[0.5, 1.0], [1.5, 2.0]])
    np.testing.assert_array_equal(ds.categorical([0, 1, 2]), [[3], [0]])
    assert ds.numeric([2]).shape == (2, 0)
    assert ds.categorical([0]).shape == (2, 0)


def test_columns_are_read_only():
    ds = Dataset.from_arrays([[1.0, 2.0]], [C])
    with pytest.raises(ValueError):
        ds.columns[0].values[0] = 5.0


@pytest.mark.parametrize("arrays,kinds", [
    ([[0.5, 1.0]], [CAT]),
    ([[-1, 0]], [CAT]),
    ([[np.nan, 0.0]], [C]),
    ([[1.0, 2.0], [1.0]], [C, C]),
])
def test_invalid_columns(arrays, kinds):
    with pytest.raises(ConfigurationError):
        Dataset.from_arrays(arrays, kinds)


def test_partition_validation():
    with pytest.raises(ConfigurationError):
        VariablePartition((0,), (0,))
    with pytest.raises(ConfigurationError):
        VariablePartition((), (1,))
    ds = Dataset.from_arrays([[1.0], [2.0]], [C, C])
    with pytest.raises(ConfigurationError):
        VariablePartition((0,), (1,), (2,)).validate(ds)
    p = VariablePartition((0,), (1,), (2, 3))
    assert p.xz == (0, 2, 3) and p.yz == (1, 2, 3) and p.xyz == (0, 1, 2, 3)


def test_permute_rows_of():
    ds = Dataset.from_arrays([[10.0, 20.0, 30.0], [1.0, 2.0, 3.0]], [C, C])
    out = ds.permute_rows_of([0], np.array([2, 0, 1]))
    np.testing.assert_array_equal(out.columns[0].values, [30.0, 10.0, 20.0])
    np.testing.assert_array_equal(out.columns[1].values, [1.0, 2.0, 3.0])


def test_csv_round_trip(tmp_path, rng):
    ds = Dataset.from_arrays([rng.standard_normal(20), rng.integers(0, 4, 20).astype(float),
                              rng.integers(0, 3, 20)], [C, DN, CAT], ["a", "b", "c"])
    path = tmp_path / "d.csv"
    save_dataset(ds, path)
    back = load_dataset(path, "c,dn,cat")
    assert back.names == ds.names and back.kinds == ds.kinds
    for a, b in zip(ds.columns, back.columns):
        np.testing.assert_array_equal(a.values, b.values)


def test_json_export(rng):
    ds = Dataset.from_arrays([[1.5], [2]], [C, CAT], ["a", "b"])
    assert '"kind": "cat"' in dataset_to_json(ds)


def _write(tmp_path, text):
    p = tmp_path / "f.csv"
    p.write_text(text)
    return p


def test_parse_errors_locate_cell(tmp_path):
    with pytest.raises(ParseError) as exc:
        load_dataset(_write(tmp_path, "a,b\n1.0,2\n3.0,x\n"), "c,cat")
    assert exc.value.row == 2 and exc.value.column == "b"
    with pytest.raises(ParseError):
        load_dataset(_write(tmp_path, "a,b\n1.0,2.5\n"), "c,cat")
    with pytest.raises(ParseError):
        load_dataset(_write(tmp_path, "a,b\n1.0,-1\n"), "c,cat")
    with pytest.raises(ParseError):
        load_dataset(_write(tmp_path, "a,b\nnan,1\n"), "c,cat")
    with pytest.raises(ParseError):
        load_dataset(_write(tmp_path, "a,b\n1.0\n"), "c,cat")
    with pytest.raises(ParseError):
        load_dataset(_write(tmp_path, ""), "c")


def test_schema_mismatch(tmp_path):
    with pytest.raises(SchemaMismatchError):
        load_dataset(_write(tmp_path, "a,b\n1,2\n"), "c")


def test_standardize_and_scale(rng):
    ds = Dataset.from_arrays([rng.normal(3, 2, 500), rng.integers(0, 5, 500).astype(float),
                              rng.integers(0, 2, 500)], [C, DN, CAT])
    s = apply_preprocessing(ds, "std").columns[0].values
    assert abs(s.mean()) < 1e-12 and abs(s.std() - 1) < 1e-12
    u = apply_preprocessing(ds, Preprocessing.SCALE_TO_UNIT).columns[0].values
    assert u.min() == 0.0 and u.max() == 1.0
    # only continuous columns change
    for p in ("std", "scale", "rank"):
        out = apply_preprocessing(ds, p)
        np.testing.assert_array_equal(out.columns[1].values, ds.columns[1].values)
        np.testing.assert_array_equal(out.columns[2].values, ds.columns[2].values)


def test_rank_transform():
    ds = Dataset.from_arrays([[3.0, 1.0, 2.0, 2.0]], [C])
    np.testing.assert_allclose(apply_preprocessing(ds, "rank").columns[0].values,
                               [4 / 4, 1 / 4, 2.5 / 4, 2.5 / 4])


def test_constant_column_rejected():
    ds = Dataset.from_arrays([[1.0, 1.0, 1.0]], [C], ["k"])
    with pytest.raises(DegenerateColumnError):
        apply_preprocessing(ds, "std")
    with pytest.raises(DegenerateColumnError):
        apply_preprocessing(ds, "scale")
    assert apply_preprocessing(ds, "none") is ds
