"""MAT-file reading and CSV emission."""

from __future__ import annotations

import csv

import numpy as np
from scipy.io import loadmat

__all__ = ["ConvertError", "MissingVariableError", "convert", "period_from"]

_SIGNAL_VAR = "emg"
_LABEL_VARS = ("restimulus", "stimulus")
_FS_VARS = ("frequency", "fs")


class ConvertError(Exception):
    """Any conversion failure; the CLI maps this to exit code 1."""


class MissingVariableError(ConvertError):
    """A required MAT variable is absent."""


def period_from(day: int, slot: int) -> int:
    """Map (day 1-5, slot 1-2) to the flat period index 1-10."""
    if not 1 <= day <= 5:
        raise ConvertError(f"day must be in 1..5, got {day}")
    if slot not in (1, 2):
        raise ConvertError(f"slot must be 1 or 2, got {slot}")
    return 2 * (day - 1) + slot


def _column_vector(arr: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(arr)
    flat = arr.reshape(-1)
    if flat.size != max(arr.shape, default=0):
        raise ConvertError(f"variable '{name}' must be a vector, got shape {arr.shape}")
    return flat


def convert(
    mat_path,
    subject: int,
    day: int,
    slot: int,
    out_csv,
    fs: float | None = None,
) -> int:
    """Transcribe one MAT session file to the raw CSV schema.

    Returns the number of data rows written.  The gesture label column
    prefers 'restimulus' over 'stimulus'; the sample rate comes from the
    file's 'frequency'/'fs' variable unless overridden by fs.
    """
    period = period_from(day, slot)
    try:
        contents = loadmat(mat_path)
    except (OSError, ValueError, NotImplementedError) as exc:
        raise ConvertError(f"{mat_path}: not a readable MAT file ({exc})") from None

    if _SIGNAL_VAR not in contents:
        raise MissingVariableError(f"{mat_path}: missing variable '{_SIGNAL_VAR}'")
    signal = np.asarray(contents[_SIGNAL_VAR], dtype=float)
    if signal.ndim != 2:
        raise ConvertError(f"{mat_path}: variable '{_SIGNAL_VAR}' must be 2-D")

    labels = None
    for name in _LABEL_VARS:
        if name in contents:
            labels = _column_vector(contents[name], name).astype(np.int64)
            break
    if labels is None:
        raise MissingVariableError(
            f"{mat_path}: missing variable '{_LABEL_VARS[0]}' (or fallback '{_LABEL_VARS[1]}')"
        )
    if labels.shape[0] != signal.shape[0]:
        raise ConvertError(
            f"{mat_path}: row-count mismatch: {signal.shape[0]} signal rows vs "
            f"{labels.shape[0]} labels"
        )

    if fs is None:
        for name in _FS_VARS:
            if name in contents:
                fs = float(np.asarray(contents[name]).reshape(-1)[0])
                break
    if fs is None:
        raise MissingVariableError(
            f"{mat_path}: missing variable '{_FS_VARS[0]}' (or '{_FS_VARS[1]}'); pass --fs"
        )
    if not fs > 0:
        raise ConvertError(f"{mat_path}: sample rate must be positive, got {fs}")

    n, k = signal.shape
    with open(out_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"emg_{c + 1}" for c in range(k)] + ["subject", "period", "grasp"])
        for i in range(n):
            writer.writerow(
                [f"{i / fs:.6f}"]
                + [repr(float(v)) for v in signal[i]]
                + [int(subject), period, int(labels[i])]
            )
    return n
