"""CSV serialization for profiles, fields, decompositions and reports.

All files are UTF-8 with LF line endings and shortest-roundtrip float
formatting (``repr``), so identical inputs produce byte-identical files
on every platform and the written values parse back exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np

from .lemmas import LemmaReport
from .spectral import SpaceField, SpectralProfile
from .windows import WienerDecomposition

PROFILE_HEADER = ["xi", "re", "im"]
FIELD_HEADER = ["x", "re", "im", "abs"]
REPORT_HEADER = ["lemma_id", "profile_id", "params", "measured_lhs",
                 "bound_rhs", "fitted_C", "pass"]

# relative tolerance for the uniform-spacing test on read
SPACING_RTOL = 1e-9


def format_float(value: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(value))


def _open_out(path):
    return open(path, "w", encoding="utf-8", newline="")


def _writer(handle):
    return csv.writer(handle, lineterminator="\n")


def write_profile(p: SpectralProfile, path) -> None:
    xi = p.xi
    with _open_out(path) as handle:
        out = _writer(handle)
        out.writerow(PROFILE_HEADER)
        for j in range(p.n):
            a = p.amplitudes[j]
            out.writerow([format_float(xi[j]), format_float(a.real), format_float(a.imag)])


def read_profile(path) -> SpectralProfile:
    """Read a profile table, rejecting non-uniform or non-increasing grids."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0] != PROFILE_HEADER:
        raise ValueError(f"{path}: expected header {','.join(PROFILE_HEADER)}")
    body = [row for row in rows[1:] if row]
    if len(body) == 0:
        raise ValueError(f"{path}: no data rows")
    try:
        table = np.array([[float(cell) for cell in row] for row in body])
    except ValueError as exc:
        raise ValueError(f"{path}: malformed numeric field: {exc}") from exc
    if table.shape[1] != 3:
        raise ValueError(f"{path}: expected 3 columns per row")
    xi = table[:, 0]
    if xi.size > 1:
        steps = np.diff(xi)
        step = float(xi[-1] - xi[0]) / (xi.size - 1)
        if step <= 0.0 or np.any(steps <= 0.0):
            raise ValueError(f"{path}: xi must be strictly increasing")
        if float(np.max(np.abs(steps - step))) > SPACING_RTOL * abs(step):
            raise ValueError(f"{path}: xi spacing is not uniform within {SPACING_RTOL:g} relative")
    else:
        step = 1.0
    return SpectralProfile(xi_min=float(xi[0]), xi_step=step,
                           amplitudes=table[:, 1] + 1j * table[:, 2])


def write_field(u: SpaceField, path) -> None:
    x = u.x
    with _open_out(path) as handle:
        out = _writer(handle)
        out.writerow(FIELD_HEADER)
        for j in range(u.n):
            v = u.values[j]
            out.writerow([format_float(x[j]), format_float(v.real),
                          format_float(v.imag), format_float(abs(v))])


def read_field(path) -> SpaceField:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0] != FIELD_HEADER:
        raise ValueError(f"{path}: expected header {','.join(FIELD_HEADER)}")
    body = [row for row in rows[1:] if row]
    if len(body) == 0:
        raise ValueError(f"{path}: no data rows")
    table = np.array([[float(cell) for cell in row] for row in body])
    x = table[:, 0]
    step = float(x[-1] - x[0]) / (x.size - 1) if x.size > 1 else 1.0
    return SpaceField(x_min=float(x[0]), x_step=step,
                      values=table[:, 1] + 1j * table[:, 2])


def write_decomposition(dec: WienerDecomposition, basepath) -> list[Path]:
    """One profile file per window piece, suffixed ``_k<k>.csv``."""
    base = Path(basepath)
    stem = base.with_suffix("") if base.suffix == ".csv" else base
    written = []
    for k, piece in zip(dec.ks, dec.pieces):
        target = stem.parent / f"{stem.name}_k{int(k)}.csv"
        write_profile(piece, target)
        written.append(target)
    return written


def _format_param(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(value)


def params_to_text(params: dict) -> str:
    """Semicolon-joined ``key=value`` pairs, insertion-ordered."""
    parts = []
    for key, value in params.items():
        text = _format_param(value)
        if ";" in text or "," in text or "=" in text:
            raise ValueError(f"param value {text!r} contains a reserved character")
        parts.append(f"{key}={text}")
    return ";".join(parts)


def text_to_params(text: str) -> dict:
    params = {}
    if not text:
        return params
    for part in text.split(";"):
        key, _, value = part.partition("=")
        try:
            params[key] = float(value)
        except ValueError:
            params[key] = value
    return params


def write_reports(reports: Sequence[LemmaReport], path) -> None:
    with _open_out(path) as handle:
        out = _writer(handle)
        out.writerow(REPORT_HEADER)
        for r in reports:
            out.writerow([
                r.lemma_id,
                r.profile_id,
                params_to_text(r.params),
                format_float(r.measured_lhs),
                format_float(r.bound_rhs),
                format_float(r.fitted_c),
                "true" if r.passed else "false",
            ])


def read_reports(path) -> list[LemmaReport]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or rows[0] != REPORT_HEADER:
        raise ValueError(f"{path}: expected header {','.join(REPORT_HEADER)}")
    out = []
    for row in rows[1:]:
        if not row:
            continue
        lemma_id, profile_id, params, lhs, rhs, fitted, passed = row
        out.append(LemmaReport(
            lemma_id=lemma_id,
            profile_id=profile_id,
            params=text_to_params(params),
            measured_lhs=float(lhs),
            bound_rhs=float(rhs),
            fitted_c=float(fitted),
            passed={"true": True, "false": False}[passed],
        ))
    return out
