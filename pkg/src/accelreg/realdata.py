"""Loading delimiter-separated regression tables and early-stopping test curves."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError
from .filters import default_method
from .kernels import cross_gram, gram, make_kernel, standardize
from .solvers import predict, run


def load_table(path, delimiter: str = "auto", skip_header: bool = False) -> np.ndarray:
    """Read a numeric table; ``delimiter="auto"`` splits on commas if present, else whitespace.

    Errors name the 0-based data row and column of the first bad cell.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc.strerror or exc}") from None
    lines = text.splitlines()
    if skip_header and lines:
        lines = lines[1:]
    if delimiter == "auto":
        delimiter = "," if any("," in ln for ln in lines[:5]) else None
    rows = []
    width = None
    for line in lines:
        if not line.strip():
            continue
        if delimiter is None:
            cells = line.split()
        else:
            cells = next(csv.reader(io.StringIO(line), delimiter=delimiter))
        row = len(rows)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            col = min(len(cells), width)
            raise DataError(f"row {row}: expected {width} columns, found {len(cells)}", row=row, column=col)
        values = []
        for j, cell in enumerate(cells):
            if not cell.strip():
                raise DataError(f"missing cell at row {row}, column {j}", row=row, column=j)
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"non-numeric cell {cell.strip()!r} at row {row}, column {j}"
                                " (use skip_header for a header line)", row=row, column=j) from None
            if not np.isfinite(v):
                raise DataError(f"missing or non-finite cell at row {row}, column {j}", row=row, column=j)
            values.append(v)
        rows.append(values)
    if not rows:
        raise DataError("dataset is empty")
    if width < 2:
        raise DataError("need at least one feature column and the target column")
    return np.array(rows)


@dataclass(frozen=True)
class FitConfig:
    data: str = ""
    delimiter: str = "auto"
    skip_header: bool = False
    kernel: str = "gaussian"
    width: float = 1.2
    degree: int = 9
    offset: float = 1.0
    train: int = 1000
    seed: int = 0
    T: int = 1000
    methods: tuple = ("gd", "nu", "nesterov")
    nu: float = 1.0
    beta: float = 1.0
    kappa2: str = "spectral"

    def __post_init__(self):
        if self.train < 1:
            raise DomainError("train must be >= 1")
        if self.T < 1:
            raise DomainError("T must be >= 1")
        if self.kappa2 not in ("gram", "spectral"):
            raise DomainError(f"kappa2 must be 'gram' or 'spectral', got {self.kappa2!r}")
        make_kernel(self.kernel, width=self.width, degree=self.degree, offset=self.offset)
        for m in self.methods:
            if m not in ("gd", "nu", "nesterov"):
                raise DomainError(f"unknown method {m!r}")


def split(table: np.ndarray, train: int, seed: int):
    """Seeded shuffle, then the first ``train`` rows for training and the rest for testing."""
    if train >= table.shape[0]:
        raise DataError(f"need more than train={train} rows, dataset has {table.shape[0]}")
    order = np.random.default_rng(seed).permutation(table.shape[0])
    return table[order[:train]], table[order[train:]]


def fit_curves(table: np.ndarray, config: FitConfig) -> dict[str, np.ndarray]:
    """Test mean squared error for ``t = 1..T`` of every configured method.

    Features are standardized with training statistics and the target is
    centred by its training mean, which is added back to the predictions.
    """
    tr, te = split(table, config.train, config.seed)
    Xtr, mean, scale = standardize(tr[:, :-1])
    Xte, _, _ = standardize(te[:, :-1], mean, scale)
    offset = tr[:, -1].mean()
    ytr = tr[:, -1] - offset
    yte = te[:, -1] - offset
    kernel = make_kernel(config.kernel, width=config.width, degree=config.degree, offset=config.offset)
    K, k2 = gram(Xtr, kernel)
    n = K.shape[0]
    M = K / n
    if config.kappa2 == "spectral":
        k2 = float(np.linalg.eigvalsh(M)[-1])
    C = cross_gram(Xte, Xtr, kernel)
    out = {}
    for name in config.methods:
        method = default_method(name, k2, nu=config.nu, beta=config.beta)
        hist = run(method, M, ytr, config.T)
        pred = predict(C, hist.u[1:].T, n)
        out[name] = np.mean((pred - yte[:, None]) ** 2, axis=0)
    return out
