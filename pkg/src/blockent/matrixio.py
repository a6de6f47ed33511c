"""JSON matrix files and fixed-precision JSON output."""
import json

import numpy as np

from .bipartite import BipartiteState

LAYOUT = "s-major"
SIG_DIGITS = 12


class MatrixFileError(ValueError):
    pass


def round_sig(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def rounded(obj):
    """Recursively round floats (and numpy scalars) to 12 significant digits."""
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj)) if np.isfinite(obj) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(rounded(obj), indent=2)


def parse_matrix_file(text: str) -> BipartiteState:
    """Build a state from MatrixFile JSON: ``dim_s``, ``dim_e``, ``re``, ``im``.

    Only the shape is checked here; physical validity is left to the caller.
    """
    try:
        data = json.loads(text)
        dim_s, dim_e = int(data["dim_s"]), int(data["dim_e"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    except (ValueError, KeyError, TypeError) as exc:
        raise MatrixFileError(f"cannot parse matrix file: {exc}") from exc
    layout = data.get("layout", LAYOUT)
    if layout != LAYOUT:
        raise MatrixFileError(f"unsupported layout {layout!r}; only {LAYOUT!r} is defined")
    d = dim_s * dim_e
    if dim_s < 1 or dim_e < 1 or re.shape != (d, d) or im.shape != (d, d):
        raise MatrixFileError(
            f"re/im must be {d} x {d} arrays for dim_s={dim_s}, dim_e={dim_e}; "
            f"got {re.shape} and {im.shape}"
        )
    try:
        return BipartiteState(dim_s, dim_e, re + 1j * im)
    except ValueError as exc:
        raise MatrixFileError(str(exc)) from exc


def load_matrix_file(path) -> BipartiteState:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc}") from exc
    return parse_matrix_file(text)


def matrix_file_dict(state: BipartiteState) -> dict:
    return {
        "dim_s": state.dim_s,
        "dim_e": state.dim_e,
        "layout": LAYOUT,
        "re": state.rho.real.tolist(),
        "im": state.rho.imag.tolist(),
    }


def save_matrix_file(state: BipartiteState, path) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(rounded(matrix_file_dict(state))))
        fh.write("\n")
