"""Column-typed datasets, variable partitions and preprocessing transforms."""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import ConfigurationError, DegenerateColumnError, ParseError, SchemaMismatchError

__all__ = [
    "ColumnKind",
    "Column",
    "Dataset",
    "VariablePartition",
    "Preprocessing",
    "parse_kinds",
    "load_dataset",
    "save_dataset",
    "dataset_to_json",
    "apply_preprocessing",
]


class ColumnKind(enum.Enum):
    CONTINUOUS = "c"
    DISCRETE_NUMERIC = "dn"
    CATEGORICAL = "cat"

    @property
    def is_numeric(self) -> bool:
        return self is not ColumnKind.CATEGORICAL

    @classmethod
    def from_code(cls, code: str) -> "ColumnKind":
        try:
            return cls(code.strip().lower())
        except ValueError:
            raise ConfigurationError(
                f"unknown column type code {code!r} (expected c, dn or cat)"
            ) from None


def parse_kinds(codes: str | Iterable[str | ColumnKind]) -> list[ColumnKind]:
    """Parse ``"c,dn,cat"`` style type lists."""
    if isinstance(codes, str):
        codes = [c for c in codes.split(",") if c.strip()]
    return [c if isinstance(c, ColumnKind) else ColumnKind.from_code(c) for c in codes]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind
    values: np.ndarray

    def __post_init__(self):
        if self.kind is ColumnKind.CATEGORICAL:
            v = np.asarray(self.values)
            if v.dtype.kind == "f":
                if not np.all(np.isfinite(v)) or np.any(v != np.round(v)):
                    raise ConfigurationError(f"categorical column {self.name!r} must hold integer codes")
            v = v.astype(np.int64)
            if np.any(v < 0):
                raise ConfigurationError(f"categorical column {self.name!r} has negative codes")
        else:
            v = np.asarray(self.values, dtype=np.float64)
            if not np.all(np.isfinite(v)):
                raise ConfigurationError(f"numeric column {self.name!r} contains NaN or Inf")
        if v.ndim != 1:
            raise ConfigurationError(f"column {self.name!r} must be one-dimensional")
        object.__setattr__(self, "values", _freeze(v.copy()))


@dataclass(frozen=True)
class Dataset:
    """Immutable sample matrix with one typed value vector per column."""

    columns: tuple[Column, ...]

    def __post_init__(self):
        cols = tuple(self.columns)
        if not cols:
            raise ConfigurationError("a dataset needs at least one column")
        n = len(cols[0].values)
        if n < 1:
            raise ConfigurationError("a dataset needs at least one row")
        if any(len(c.values) != n for c in cols):
            raise ConfigurationError("all columns must have the same length")
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            raise ConfigurationError("column names must be unique")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_arrays(cls, arrays: Sequence, kinds, names: Sequence[str] | None = None) -> "Dataset":
        kinds = parse_kinds(kinds)
        if len(kinds) != len(arrays):
            raise ConfigurationError("one kind per array is required")
        if names is None:
            names = [f"v{i}" for i in range(len(arrays))]
        return cls(tuple(Column(nm, k, np.asarray(a)) for nm, k, a in zip(names, kinds, arrays)))

    @property
    def n_rows(self) -> int:
        return len(self.columns[0].values)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def kinds(self) -> list[ColumnKind]:
        return [c.kind for c in self.columns]

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def __len__(self):
        return self.n_rows

    def numeric(self, cols: Sequence[int]) -> np.ndarray:
        """(n, p) float array of the numeric columns among ``cols``."""
        picked = [self.columns[c].values for c in cols if self.columns[c].kind.is_numeric]
        if not picked:
            return np.zeros((self.n_rows, 0))
        return np.column_stack(picked).astype(np.float64)

    def categorical(self, cols: Sequence[int]) -> np.ndarray:
        """(n, q) int array of the categorical columns among ``cols``."""
        picked = [self.columns[c].values for c in cols if not self.columns[c].kind.is_numeric]
        if not picked:
            return np.zeros((self.n_rows, 0), dtype=np.int64)
        return np.column_stack(picked).astype(np.int64)

    def take(self, rows: np.ndarray) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(tuple(Column(c.name, c.kind, c.values[rows]) for c in self.columns))

    def replace_columns(self, index_to_values: dict[int, np.ndarray]) -> "Dataset":
        cols = list(self.columns)
        for i, v in index_to_values.items():
            cols[i] = Column(cols[i].name, cols[i].kind, v)
        return Dataset(tuple(cols))

    def permute_rows_of(self, cols: Sequence[int], sigma: np.ndarray) -> "Dataset":
        """Re-index the given columns by ``sigma``: new[i] = old[sigma[i]]."""
        sigma = np.asarray(sigma)
        return self.replace_columns({c: self.columns[c].values[sigma] for c in cols})


@dataclass(frozen=True)
class VariablePartition:
    """Column-index roles of X, Y and the conditioning set Z."""

    x: tuple[int, ...]
    y: tuple[int, ...]
    z: tuple[int, ...] = field(default=())

    def __post_init__(self):
        x, y, z = (tuple(int(i) for i in v) for v in (self.x, self.y, self.z))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)
        if not x or not y:
            raise ConfigurationError("x and y must each name at least one column")
        allc = x + y + z
        if len(set(allc)) != len(allc):
            raise ConfigurationError("x, y and z column lists must be disjoint")

    def validate(self, ds: Dataset) -> None:
        for i in self.x + self.y + self.z:
            if not 0 <= i < ds.n_cols:
                raise ConfigurationError(f"column index {i} out of range for {ds.n_cols} columns")

    @property
    def xz(self) -> tuple[int, ...]:
        return self.x + self.z

    @property
    def yz(self) -> tuple[int, ...]:
        return self.y + self.z

    @property
    def xyz(self) -> tuple[int, ...]:
        return self.x + self.y + self.z

    def to_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "z": list(self.z)}


class Preprocessing(enum.Enum):
    NONE = "none"
    STANDARDIZE = "std"
    SCALE_TO_UNIT = "scale"
    RANK_TRANSFORM = "rank"

    @classmethod
    def parse(cls, value: "str | Preprocessing") -> "Preprocessing":
        if isinstance(value, Preprocessing):
            return value
        aliases = {"standardize": "std", "ranks": "rank", "scale01": "scale"}
        v = aliases.get(value.strip().lower(), value.strip().lower())
        try:
            return cls(v)
        except ValueError:
            raise ConfigurationError(f"unknown preprocessing {value!r}") from None


def apply_preprocessing(ds: Dataset, p: Preprocessing | str) -> Dataset:
    """Transform every continuous column; other columns pass through.

    ``STANDARDIZE`` uses the population standard deviation (ddof=0),
    ``SCALE_TO_UNIT`` maps min/max to the closed interval [0, 1] and
    ``RANK_TRANSFORM`` replaces values by average rank divided by n.
    """
    p = Preprocessing.parse(p)
    if p is Preprocessing.NONE:
        return ds
    new = {}
    for i, col in enumerate(ds.columns):
        if col.kind is not ColumnKind.CONTINUOUS:
            continue
        v = col.values
        if p is Preprocessing.RANK_TRANSFORM:
            new[i] = rankdata(v, method="average") / len(v)
            continue
        if np.all(v == v[0]):
            raise DegenerateColumnError(col.name, "constant column cannot be rescaled")
        if p is Preprocessing.STANDARDIZE:
            centered = v - v.mean()
            new[i] = centered / centered.std()
        else:
            lo, hi = v.min(), v.max()
            new[i] = (v - lo) / (hi - lo)
    return ds.replace_columns(new)


def load_dataset(path, schema) -> Dataset:
    """Read a headered CSV file typed by ``schema`` (kinds or type codes)."""
    kinds = parse_kinds(schema)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file, a header row is required") from None
        header = [h.strip() for h in header]
        if len(kinds) != len(header):
            raise SchemaMismatchError(
                f"schema has {len(kinds)} entries but the file has {len(header)} columns"
            )
        values: list[list] = [[] for _ in header]
        for r, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} cells, found {len(row)}", row=r)
            for j, (cell, kind) in enumerate(zip(row, kinds)):
                values[j].append(_parse_cell(cell, kind, r, header[j]))
    if not values[0]:
        raise ParseError("file has no data rows")
    return Dataset(tuple(Column(h, k, np.asarray(v)) for h, k, v in zip(header, kinds, values)))


def _parse_cell(cell, kind, row, column):
    text = cell.strip()
    if kind is ColumnKind.CATEGORICAL:
        try:
            code = int(text)
        except ValueError:
            try:
                f = float(text)
            except ValueError:
                raise ParseError(f"non-numeric categorical code {text!r}", row, column) from None
            if not math.isfinite(f) or f != int(f):
                raise ParseError(f"categorical code {text!r} is not an integer", row, column) from None
            code = int(f)
        if code < 0:
            raise ParseError(f"negative categorical code {code}", row, column)
        return code
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"non-numeric cell {text!r}", row, column) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r}", row, column)
    return v


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(ds.names)
        cols = [c.values for c in ds.columns]
        for r in range(ds.n_rows):
            w.writerow([repr(int(v)) if c.kind is ColumnKind.CATEGORICAL else repr(float(v))
                        for c, v in zip(ds.columns, (col[r] for col in cols))])


def dataset_to_json(ds: Dataset) -> str:
    return json.dumps({
        "n_rows": ds.n_rows,
        "columns": [
            {"name": c.name, "kind": c.kind.value, "values": c.values.tolist()}
            for c in ds.columns
        ],
    })
