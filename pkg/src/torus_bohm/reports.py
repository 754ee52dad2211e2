"""Comparisons of computed Lyapunov rows against the published tables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reference_values import LYAPUNOV_TABLES, THETA0_GRID, half_unit, values


def window_identity(lambda_t1, lambda_t2, t1: float, t2: float):
    """Windowed exponent implied by the two point exponents."""
    return (t2 * np.asarray(lambda_t2) - t1 * np.asarray(lambda_t1)) / (t2 - t1)


@dataclass
class WindowCheck:
    theta0: float
    implied: float
    printed: float
    radius: float

    @property
    def deviation(self) -> float:
        return abs(self.implied - self.printed)

    @property
    def consistent(self) -> bool:
        return self.deviation <= self.radius


def reference_window_check(table: str, kind: str, t1: float = 9.0, t2: float = 10.0) -> list[WindowCheck]:
    """Recompute each printed windowed exponent from its printed point exponents.

    The allowed slack is the worst-case effect of rounding all three printed
    numbers to their last digit.
    """
    data = LYAPUNOV_TABLES[table][kind]
    out = []
    for j, th in enumerate(THETA0_GRID):
        l9, l10, lw = data["lambda9"][j], data["lambda10"][j], data["lambda"][j]
        implied = float(window_identity(float(l9), float(l10), t1, t2))
        radius = (t2 * half_unit(l10) + t1 * half_unit(l9)) / (t2 - t1) + half_unit(lw)
        out.append(WindowCheck(th, implied, float(lw), radius))
    return out


CSV_COLUMNS = (
    "theta0",
    "lambda9",
    "lambda10",
    "lambda_window",
    "window_branch_lambda9",
    "window_branch_lambda10",
    "ref_lambda9",
    "ref_lambda10",
    "ref_lambda",
    "abs_dev_lambda9",
    "abs_dev_lambda10",
    "abs_dev_lambda",
    "ref_window_consistent",
    "status",
)


def comparison_rows(rows, table: str | None, kind: str) -> list[dict]:
    """Rows for the Lyapunov CSV; reference columns are NaN when not comparable.

    lambda9 / lambda10 are the larger exponents at each checkpoint and
    lambda_window the larger windowed exponent; the window_branch columns give
    the point exponents of the branch that window came from, so the windowing
    identity can be checked row by row.
    """
    ref = None
    checks = None
    if table is not None and len(rows) == len(THETA0_GRID) and np.allclose(
        [r.theta0 for r in rows], THETA0_GRID, atol=1e-12
    ):
        ref = {key: values(v) for key, v in LYAPUNOV_TABLES[table][kind].items()}
        checks = reference_window_check(table, kind)
    nan = float("nan")
    out = []
    for j, row in enumerate(rows):
        p9 = ref["lambda9"][j] if ref else nan
        p10 = ref["lambda10"][j] if ref else nan
        pw = ref["lambda"][j] if ref else nan
        out.append(
            {
                "theta0": row.theta0,
                "lambda9": row.lambda_t1,
                "lambda10": row.lambda_t2,
                "lambda_window": row.lambda_window,
                "window_branch_lambda9": row.taken_t1,
                "window_branch_lambda10": row.taken_t2,
                "ref_lambda9": p9,
                "ref_lambda10": p10,
                "ref_lambda": pw,
                "abs_dev_lambda9": abs(row.lambda_t1 - p9),
                "abs_dev_lambda10": abs(row.lambda_t2 - p10),
                "abs_dev_lambda": abs(row.lambda_window - pw),
                "ref_window_consistent": "" if checks is None else ("yes" if checks[j].consistent else "no"),
                "status": row.status + (" crossed" if row.crossed else ""),
            }
        )
    return out


def relative_agreement(ours, published, rel: float = 0.05) -> np.ndarray:
    ours = np.asarray(ours, dtype=float)
    published = np.asarray(published, dtype=float)
    return np.abs(ours - published) <= rel * np.abs(published)


def summary_text(table_rows: dict, table: str | None) -> str:
    """Plain-text summary of one sweep per surface kind."""
    lines = []
    for kind, rows in table_rows.items():
        lines.append(f"[{kind}]")
        finite = [r for r in rows if np.isfinite(r["lambda10"])]
        flagged = [r for r in rows if not r["status"].startswith("completed")]
        lines.append(f"rows: {len(rows)}  flagged (node stop): {len(flagged)}")
        if finite:
            l9 = np.array([r["lambda9"] for r in finite])
            l10 = np.array([r["lambda10"] for r in finite])
            lines.append(f"mean lambda9 {l9.mean():.6g}  mean lambda10 {l10.mean():.6g}")
        if table is not None and finite and np.isfinite(finite[0]["ref_lambda9"]):
            for col in ("lambda9", "lambda10", "lambda"):
                dev = np.array([r[f"abs_dev_{col}"] for r in finite])
                lines.append(f"max |dev| {col}: {np.nanmax(dev):.6g}")
            agree9 = relative_agreement([r["lambda9"] for r in finite], [r["ref_lambda9"] for r in finite])
            agree10 = relative_agreement([r["lambda10"] for r in finite], [r["ref_lambda10"] for r in finite])
            cells = np.concatenate([agree9, agree10])
            lines.append(f"cells within 5% of published (lambda9, lambda10): {int(cells.sum())}/{cells.size}")
            bad = [f"{r['theta0']:.6f}" for r in finite if r["ref_window_consistent"] == "no"]
            lines.append("published cells failing the windowing identity: " + (", ".join(bad) if bad else "none"))
    return "\n".join(lines) + "\n"
