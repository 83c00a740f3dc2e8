#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
读写 CSV 数据文件和 JSON 报告。
Readers and writers of CSV data files and JSON reports.

Spectrum files:

```
# b_field_gauss=545.994      (optional comment)
rf_frequency_hz,molecule_count[,count_uncertainty]
...
```

Binding-energy files: `b_field_gauss,binding_energy_khz,sigma_khz`.
Lines starting with '#' are comments. Schema errors name the file line.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import pendulum

from feshrf import __version__
from feshrf.errors import DataError
from feshrf.quantities import energy_to_khz, from_si, khz_to_energy, to_si
from feshrf.resonance import BoundStateInfo
from feshrf.spectrum import Spectrum
from feshrf.tools.regex import FIELD_COMMENT

PathLike = Union[str, Path]
Output = Union[str, Path, IO[str]]

FLOAT_FORMAT = "%.17g"
SCHEMA_VERSION = 1
SPECTRUM_COLUMNS = ("rf_frequency_hz", "molecule_count", "count_uncertainty")
POINT_COLUMNS = ("b_field_gauss", "binding_energy_khz", "sigma_khz")


def _table(
    path: PathLike,
    required: Sequence[str],
    optional: Sequence[str] = (),
) -> Tuple[pd.DataFrame, List[int], List[str]]:
    """Numeric table, the file line of every row and the comment lines."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Data file {path} not found.")
    lines = path.read_text(encoding="utf-8").splitlines()
    comments = [
        line.strip() for line in lines if line.lstrip().startswith("#")
    ]
    numbers = [
        i
        for i, line in enumerate(lines, start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not numbers:
        raise DataError(f"{path} has no header.")
    header = numbers[0]
    text = "\n".join(lines[i - 1] for i in numbers)
    try:
        frame = pd.read_csv(
            io.StringIO(text), skipinitialspace=True, dtype=str
        )
    except pd.errors.ParserError as exc:
        raise DataError(f"{path}: {exc}") from exc
    columns = [c.strip() for c in frame.columns]
    frame.columns = columns
    missing = [c for c in required if c not in columns]
    unknown = [c for c in columns if c not in (*required, *optional)]
    if missing or unknown:
        raise DataError(
            f"expected columns {list(required)} (optional {list(optional)}), "
            f"got {columns}",
            line=header,
        )
    rows = numbers[1:]
    if frame.empty:
        raise DataError(f"{path} has no data rows.", line=header)
    values = frame.apply(pd.to_numeric, errors="coerce").astype(float)
    bad_rows = np.flatnonzero(~np.isfinite(values.to_numpy()).all(axis=1))
    if bad_rows.size:
        first = int(bad_rows[0])
        raise DataError(
            f"missing or non-numeric value in {path.name}", line=rows[first]
        )
    return values, rows, comments


def read_spectrum_file(path: PathLike) -> Tuple[Spectrum, Optional[float]]:
    """Spectrum and the field in G of its `# b_field_gauss=` comment, if any.

    Raises:
        DataError:
            On schema violations, non-increasing frequencies or
            non-positive uncertainties, naming the offending line.
    """
    frame, rows, comments = _table(
        path, SPECTRUM_COLUMNS[:2], SPECTRUM_COLUMNS[2:]
    )
    frequency = frame["rf_frequency_hz"].to_numpy()
    steps = np.flatnonzero(np.diff(frequency) <= 0)
    if steps.size:
        raise DataError(
            "frequencies must be strictly increasing",
            line=rows[int(steps[0]) + 1],
        )
    sigma = None
    if "count_uncertainty" in frame:
        sigma = frame["count_uncertainty"].to_numpy()
        bad = np.flatnonzero(sigma <= 0)
        if bad.size:
            raise DataError(
                "count uncertainties must be positive", line=rows[int(bad[0])]
            )
    field_gauss = None
    for comment in comments:
        match = FIELD_COMMENT.match(comment)
        if match:
            field_gauss = float(match.group(1))
    spectrum = Spectrum(frequency, frame["molecule_count"].to_numpy(), sigma)
    return spectrum, field_gauss


def read_spectrum_csv(path: PathLike) -> Spectrum:
    """Spectrum from a CSV file."""
    return read_spectrum_file(path)[0]


def read_points_csv(path: PathLike) -> List[Tuple[float, float, float]]:
    """(B in T, E_b in J, σ in J) triples from a binding-energy file."""
    frame, rows, _ = _table(path, POINT_COLUMNS)
    for i, (_, row) in enumerate(frame.iterrows()):
        if row["binding_energy_khz"] <= 0 or row["sigma_khz"] <= 0:
            raise DataError(
                "binding energy and sigma must be positive", line=rows[i]
            )
    return [
        (
            to_si(row["b_field_gauss"], "G"),
            khz_to_energy(row["binding_energy_khz"]),
            khz_to_energy(row["sigma_khz"]),
        )
        for _, row in frame.iterrows()
    ]


def write_spectrum_csv(spectrum: Spectrum, out: Output) -> None:
    """Model spectrum as `rf_frequency_hz,molecule_number`."""
    frame = pd.DataFrame(
        {
            "rf_frequency_hz": spectrum.frequency,
            "molecule_number": spectrum.counts,
        }
    )
    frame.to_csv(out, index=False, float_format=FLOAT_FORMAT)


def write_measured_csv(
    spectrum: Spectrum, out: Output, field_gauss: Optional[float] = None
) -> None:
    """Spectrum in the input format, e.g. for synthetic data."""
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="") as file:
            write_measured_csv(spectrum, file, field_gauss)
        return
    if field_gauss is not None:
        out.write(f"# b_field_gauss={field_gauss!r}\n")
    spectrum.to_frame().to_csv(out, index=False, float_format=FLOAT_FORMAT)


def write_binding_curve_csv(
    fields: Sequence[float], states: Sequence[BoundStateInfo], out: Output
) -> None:
    """`b_field_gauss,binding_energy_khz,chi` for fields in T."""
    frame = pd.DataFrame(
        {
            "b_field_gauss": [from_si(B, "G") for B in fields],
            "binding_energy_khz": [energy_to_khz(s.E_b) for s in states],
            "chi": [s.chi for s in states],
        }
    )
    frame.to_csv(out, index=False, float_format=FLOAT_FORMAT)


def _plain(value: Any) -> Any:
    """JSON-compatible copy of numpy scalars and arrays."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass
class FitReport:
    """JSON report of one command.

    Attributes:
        command:
            The command that produced the report.
        config:
            Echo of the configuration.
        results:
            Fitted values, uncertainties and covariances.
        diagnostics:
            Model-validity notes and solver details.
        inputs:
            Files read by the command.
    """

    command: str
    config: Dict[str, Any]
    results: Dict[str, Any]
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    inputs: List[str] = field(default_factory=list)
    version: str = __version__
    timestamp: str = field(
        default_factory=lambda: pendulum.now("UTC").to_iso8601_string()
    )
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> Dict[str, Any]:
        return _plain(
            {
                "schema_version": self.schema_version,
                "version": self.version,
                "timestamp": self.timestamp,
                "command": self.command,
                "inputs": self.inputs,
                "config": self.config,
                "results": self.results,
                "diagnostics": self.diagnostics,
            }
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def dump(self, out: Output) -> None:
        """Write the report to a path or an open text stream."""
        if isinstance(out, (str, Path)):
            Path(out).write_text(self.dumps() + "\n", encoding="utf-8")
        else:
            out.write(self.dumps() + "\n")

    @classmethod
    def load(cls, path: PathLike) -> FitReport:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("schema_version") != SCHEMA_VERSION:
            raise DataError(
                f"Unsupported report schema {data.get('schema_version')}."
            )
        return cls(
            command=data["command"],
            config=data["config"],
            results=data["results"],
            diagnostics=data.get("diagnostics", {}),
            inputs=data.get("inputs", []),
            version=data["version"],
            timestamp=data["timestamp"],
        )
