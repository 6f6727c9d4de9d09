"""Date-aligned return panels: CSV ingestion, validation, alignment.

Returns are stored in percent units throughout; the only unit conversion in
the package happens here, at ingestion, when a file of prices is converted to
simple or log returns. Dates are opaque ordered tokens compared as strings;
no calendar arithmetic is performed anywhere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PanelError

MODES = ("returns", "simple", "log")

_MISSING = {"", "na", "nan", "null", "none"}


@dataclass(eq=False)
class ReturnPanel:
    """An n x d matrix of asset returns (percent) indexed by date tokens.

    Invariants enforced at construction: n >= 2 rows, d >= 1 columns, no
    missing cells, strictly increasing dates, unique non-empty asset names.
    ``meta`` carries provenance (dropped-row count, conversion mode) and is
    excluded from equality.
    """

    dates: list[str]
    assets: list[str]
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.dates = [str(t) for t in self.dates]
        self.assets = [str(a) for a in self.assets]
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise PanelError("values must be a 2-D matrix")
        n, d = self.values.shape
        if n != len(self.dates) or d != len(self.assets):
            raise PanelError(
                f"shape mismatch: values {n}x{d} vs {len(self.dates)} dates, "
                f"{len(self.assets)} assets"
            )
        if n < 2:
            raise PanelError(f"need at least 2 complete rows, got {n}")
        if d < 1:
            raise PanelError("need at least one asset column")
        if not np.all(np.isfinite(self.values)):
            raise PanelError("panel contains non-finite cells")
        if any(not a for a in self.assets):
            raise PanelError("asset names must be non-empty")
        if len(set(self.assets)) != d:
            raise PanelError("asset names must be unique")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if not prev < cur:
                raise PanelError(f"dates not strictly increasing at {cur!r}")

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_assets(self) -> int:
        return self.values.shape[1]

    def column(self, asset: str) -> np.ndarray:
        try:
            j = self.assets.index(asset)
        except ValueError:
            raise PanelError(f"unknown asset {asset!r}") from None
        return self.values[:, j]

    def __eq__(self, other):
        if not isinstance(other, ReturnPanel):
            return NotImplemented
        return (
            self.dates == other.dates
            and self.assets == other.assets
            and np.array_equal(self.values, other.values)
        )


def as_values(panel) -> np.ndarray:
    """Accept a ReturnPanel or a plain n x d array; return the float matrix."""
    if isinstance(panel, ReturnPanel):
        return panel.values
    a = np.asarray(panel, dtype=float)
    if a.ndim != 2:
        raise PanelError("expected a ReturnPanel or a 2-D array")
    return a


def _parse_cell(text: str, where: str) -> float:
    token = text.strip()
    if token.lower() in _MISSING:
        return math.nan
    try:
        v = float(token)
    except ValueError:
        raise PanelError(f"non-numeric cell {token!r} at {where}") from None
    return v


def load_returns(path, mode: str = "returns") -> ReturnPanel:
    """Load a panel from CSV: header ``date,<asset>,...``, one row per date.

    Rows containing any missing cell are dropped; the count lands in
    ``meta['dropped']``. With ``mode='simple'`` or ``'log'`` the file is read
    as prices P_t and converted to percent returns, 100*(P_t/P_{t-1} - 1) or
    100*ln(P_t/P_{t-1}), after the drop. Lines starting with ``#`` are
    skipped.
    """
    if mode not in MODES:
        raise PanelError(f"mode must be one of {MODES}, got {mode!r}")
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [
                r
                for r in csv.reader(fh)
                if r and not r[0].lstrip().startswith("#")
            ]
    except OSError as exc:
        raise PanelError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise PanelError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if not header or header[0].lower() != "date":
        raise PanelError(f"{path}: first header cell must be 'date'")
    assets = header[1:]
    if not assets:
        raise PanelError(f"{path}: no asset columns")

    dates, kept, dropped = [], [], 0
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise PanelError(f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}")
        vals = [_parse_cell(c, f"{path}:{lineno}") for c in row[1:]]
        if any(math.isnan(v) for v in vals):
            dropped += 1
            continue
        dates.append(row[0].strip())
        kept.append(vals)

    if len(set(dates)) != len(dates):
        seen = set()
        dup = next(t for t in dates if t in seen or seen.add(t))
        raise PanelError(f"{path}: duplicate date {dup!r}")
    order = sorted(range(len(dates)), key=dates.__getitem__)
    dates = [dates[i] for i in order]
    values = np.asarray([kept[i] for i in order], dtype=float)

    if mode != "returns":
        if values.shape[0] < 2:
            raise PanelError(f"{path}: need at least 2 price rows to form returns")
        if np.any(values <= 0):
            raise PanelError(f"{path}: prices must be positive for return conversion")
        ratio = values[1:] / values[:-1]
        values = 100.0 * (ratio - 1.0) if mode == "simple" else 100.0 * np.log(ratio)
        dates = dates[1:]

    if values.shape[0] < 2:
        raise PanelError(f"{path}: fewer than 2 complete rows after cleaning")
    return ReturnPanel(dates, assets, values, meta={"dropped": dropped, "mode": mode, "source": str(path)})


def save_returns(panel: ReturnPanel, path, header_comment: bool = True) -> None:
    """Write a panel back to CSV with full-precision (round-tripping) floats."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header_comment:
            fh.write("# units=percent quantile=ceil(np) ties=max-rank tail=strict-below\n")
        writer = csv.writer(fh)
        writer.writerow(["date", *panel.assets])
        for token, row in zip(panel.dates, panel.values):
            writer.writerow([token, *(repr(float(v)) for v in row)])


def align(panels: list[ReturnPanel]) -> ReturnPanel:
    """Inner-join panels on dates; columns follow the concatenation order."""
    if not panels:
        raise PanelError("align needs at least one panel")
    assets: list[str] = []
    for p in panels:
        assets.extend(p.assets)
    if len(set(assets)) != len(assets):
        raise PanelError("asset names must be disjoint across panels")
    common = set(panels[0].dates)
    for p in panels[1:]:
        common &= set(p.dates)
    if len(common) < 2:
        raise PanelError(f"empty intersection: only {len(common)} common dates")
    dates = [t for t in panels[0].dates if t in common]
    blocks = []
    for p in panels:
        pos = {t: i for i, t in enumerate(p.dates)}
        blocks.append(p.values[[pos[t] for t in dates], :])
    return ReturnPanel(dates, assets, np.hstack(blocks), meta={"mode": "aligned"})
