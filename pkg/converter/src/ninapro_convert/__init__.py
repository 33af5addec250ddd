"""One-shot Ninapro DB6 MAT -> raw CSV converter.

Transcribes a session recording into the toolkit's raw CSV schema
(`t,emg_1..emg_K,subject,period,grasp`) without any preprocessing; dead
channels, windowing and ordering are downstream concerns.
"""

from .convert import ConvertError, MissingVariableError, convert, period_from

__version__ = "0.1.0"

__all__ = ["convert", "period_from", "ConvertError", "MissingVariableError", "__version__"]
