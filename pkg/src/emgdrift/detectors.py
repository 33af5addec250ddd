"""Incremental change detectors behind a single update() contract.

Nine detector families (CUSUM, GMA, PH, DDM, ADWIN, HDDM_A, HDDM_W,
SEED, ABCD) consume a univariate score stream one value at a time and
report InControl / Warning / Drift.  Every detector is deterministic and
resets its internal statistics after signalling a drift, so consecutive
drifts require fresh evidence.

Default parameters are recorded in DEFAULTS and overridable per
detector; they target a low false-alarm rate (<= a handful of events per
1e5 stationary unit-variance samples) while still catching a 3-sigma
mean shift within a few hundred samples.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .errors import ParameterError, ToolkitError
from .scoring import ScorePoint

__all__ = [
    "Status",
    "DetectorState",
    "DetectorConfig",
    "DriftEvent",
    "Detector",
    "create_detector",
    "detect_series",
    "DETECTOR_KINDS",
    "DEFAULTS",
]


class Status(Enum):
    IN_CONTROL = "in_control"
    WARNING = "warning"
    DRIFT = "drift"


@dataclass(frozen=True)
class DetectorState:
    status: Status
    n_seen: int


@dataclass(frozen=True)
class DetectorConfig:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DriftEvent:
    detector: str
    kind: str  # "warning" | "drift"
    t_seconds: float
    score_index: int


class _RunningStats:
    """Welford accumulator for mean and standard deviation."""

    __slots__ = ("n", "mean", "_m2")

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self._m2 = 0.0

    def push(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self._m2 += delta * (x - self.mean)

    @property
    def std(self) -> float:
        if self.n < 2:
            return 0.0
        return math.sqrt(self._m2 / (self.n - 1))


class _SlidingMinMax:
    """Min/max over the last `size` values via monotonic deques (O(1) amortized)."""

    def __init__(self, size: int):
        self.size = size
        self._i = 0
        self._mins: deque[tuple[int, float]] = deque()
        self._maxs: deque[tuple[int, float]] = deque()

    def push(self, x: float) -> None:
        i = self._i
        self._i += 1
        while self._mins and self._mins[-1][1] >= x:
            self._mins.pop()
        self._mins.append((i, x))
        while self._maxs and self._maxs[-1][1] <= x:
            self._maxs.pop()
        self._maxs.append((i, x))
        cutoff = i - self.size
        while self._mins[0][0] <= cutoff:
            self._mins.popleft()
        while self._maxs[0][0] <= cutoff:
            self._maxs.popleft()

    @property
    def min(self) -> float:
        return self._mins[0][1]

    @property
    def max(self) -> float:
        return self._maxs[0][1]


class Detector:
    """Base class: input validation, n_seen bookkeeping, post-drift reset."""

    kind = "?"

    def __init__(self):
        self.n_seen = 0
        self._pending_reset = False

    def update(self, value: float) -> DetectorState:
        value = float(value)
        if not math.isfinite(value):
            raise ToolkitError(f"{self.kind}: non-finite input value")
        if self._pending_reset:
            self._reset()
            self._pending_reset = False
            self.n_seen = 0
        self.n_seen += 1
        status = self._update(value)
        if status is Status.DRIFT:
            self._pending_reset = True
        return DetectorState(status=status, n_seen=self.n_seen)

    def _update(self, value: float) -> Status:  # pragma: no cover - abstract
        raise NotImplementedError

    def _reset(self) -> None:  # pragma: no cover - abstract
        raise NotImplementedError


def _require(cond: bool, name: str, why: str) -> None:
    if not cond:
        raise ParameterError(f"parameter '{name}' {why}")


class Cusum(Detector):
    """Two-sided cumulative-sum test on deviations standardized by running stats."""

    kind = "CUSUM"

    def __init__(self, min_n: int = 30, delta: float = 0.25, threshold: float = 50.0):
        super().__init__()
        _require(min_n >= 2, "min_n", "must be >= 2")
        _require(delta >= 0, "delta", "must be >= 0")
        _require(threshold > 0, "threshold", "must be > 0")
        self.min_n = min_n
        self.delta = delta
        self.threshold = threshold
        self._reset()

    def _reset(self):
        self._stats = _RunningStats()
        self._g_pos = 0.0
        self._g_neg = 0.0

    def _update(self, x):
        stats = self._stats
        if stats.n >= self.min_n and stats.std > 0:
            z = (x - stats.mean) / stats.std
            self._g_pos = max(0.0, self._g_pos + z - self.delta)
            self._g_neg = max(0.0, self._g_neg - z - self.delta)
            stats.push(x)
            if max(self._g_pos, self._g_neg) > self.threshold:
                return Status.DRIFT
        else:
            stats.push(x)
        return Status.IN_CONTROL


class Gma(Detector):
    """Geometric moving average of standardized deviations against a fixed band."""

    kind = "GMA"

    def __init__(self, min_n: int = 30, decay: float = 0.99, threshold: float = 1.0):
        super().__init__()
        _require(min_n >= 2, "min_n", "must be >= 2")
        _require(0 < decay < 1, "decay", "must be in (0,1)")
        _require(threshold > 0, "threshold", "must be > 0")
        self.min_n = min_n
        self.decay = decay
        self.threshold = threshold
        self._reset()

    def _reset(self):
        self._stats = _RunningStats()
        self._ewma = 0.0

    def _update(self, x):
        stats = self._stats
        if stats.n >= self.min_n and stats.std > 0:
            z = (x - stats.mean) / stats.std
            self._ewma = self.decay * self._ewma + (1.0 - self.decay) * z
            stats.push(x)
            if abs(self._ewma) > self.threshold:
                return Status.DRIFT
        else:
            stats.push(x)
        return Status.IN_CONTROL


class PageHinckley(Detector):
    """Two-sided Page-Hinckley test.

    The running mean is the plain cumulative average; the cumulative
    deviation statistic itself fades with factor alpha so stale evidence
    decays.
    """

    kind = "PH"

    def __init__(
        self,
        min_n: int = 30,
        delta: float = 0.25,
        threshold: float = 50.0,
        alpha: float = 1.0,
    ):
        super().__init__()
        _require(min_n >= 2, "min_n", "must be >= 2")
        _require(delta >= 0, "delta", "must be >= 0")
        _require(threshold > 0, "threshold", "must be > 0")
        _require(0 < alpha <= 1, "alpha", "must be in (0,1]")
        self.min_n = min_n
        self.delta = delta
        self.threshold = threshold
        self.alpha = alpha
        self._reset()

    def _reset(self):
        self._n = 0
        self._mean = 0.0
        self._up = 0.0
        self._up_min = 0.0
        self._down = 0.0
        self._down_max = 0.0

    def _update(self, x):
        self._n += 1
        self._mean += (x - self._mean) / self._n
        self._up = self.alpha * self._up + (x - self._mean - self.delta)
        self._up_min = min(self._up_min, self._up)
        self._down = self.alpha * self._down + (x - self._mean + self.delta)
        self._down_max = max(self._down_max, self._down)
        if self._n < self.min_n:
            return Status.IN_CONTROL
        if self._up - self._up_min > self.threshold:
            return Status.DRIFT
        if self._down_max - self._down > self.threshold:
            return Status.DRIFT
        return Status.IN_CONTROL


class Ddm(Detector):
    """Error-rate monitor over a binary stream (binarize scores upstream)."""

    kind = "DDM"

    def __init__(self, min_n: int = 30, warning_level: float = 2.0, drift_level: float = 3.0):
        super().__init__()
        _require(min_n >= 2, "min_n", "must be >= 2")
        _require(warning_level > 0, "warning_level", "must be > 0")
        _require(drift_level > warning_level, "drift_level", "must exceed warning_level")
        self.min_n = min_n
        self.warning_level = warning_level
        self.drift_level = drift_level
        self._reset()

    def _reset(self):
        self._n = 0
        self._p = 0.0
        self._min_p = math.inf
        self._min_s = math.inf

    def _update(self, x):
        if x not in (0.0, 1.0):
            raise ToolkitError("DDM requires binary input in {0, 1}")
        self._n += 1
        self._p += (x - self._p) / self._n
        if self._n < self.min_n:
            return Status.IN_CONTROL
        s = math.sqrt(self._p * (1.0 - self._p) / self._n)
        if self._p + s <= self._min_p + self._min_s:
            self._min_p = self._p
            self._min_s = s
        level = self._p + s
        if level > self._min_p + self.drift_level * self._min_s:
            return Status.DRIFT
        if level > self._min_p + self.warning_level * self._min_s:
            return Status.WARNING
        return Status.IN_CONTROL


class ScoreBinarizer:
    """Score -> {0,1} adapter for DDM: threshold at a percentile of the
    first `calibration_n` scores; returns None while calibrating."""

    def __init__(self, quantile: float = 95.0, calibration_n: int = 50):
        _require(0 < quantile < 100, "quantile", "must be in (0,100)")
        _require(calibration_n >= 2, "calibration_n", "must be >= 2")
        self.quantile = quantile
        self.calibration_n = calibration_n
        self._seen: list[float] = []
        self._threshold: float | None = None

    def push(self, x: float) -> float | None:
        if self._threshold is None:
            self._seen.append(x)
            if len(self._seen) < self.calibration_n:
                return None
            ordered = sorted(self._seen)
            pos = self.quantile / 100.0 * (len(ordered) - 1)
            lo = int(math.floor(pos))
            hi = min(lo + 1, len(ordered) - 1)
            self._threshold = ordered[lo] + (pos - lo) * (ordered[hi] - ordered[lo])
            return None
        return 1.0 if x > self._threshold else 0.0


class _Bucket:
    __slots__ = ("total", "sq", "count")

    def __init__(self, total: float, sq: float, count: int):
        self.total = total
        self.sq = sq
        self.count = count


class Adwin(Detector):
    """Adaptive windowing over an exponential histogram of the stream.

    Keeps at most max_buckets buckets per capacity level; every
    check_every updates it scans all bucket boundaries for a
    statistically significant difference in sub-window means and, on a
    cut, drops the stale prefix.
    """

    kind = "ADWIN"

    def __init__(self, delta: float = 0.002, max_buckets: int = 5, check_every: int = 32):
        super().__init__()
        _require(0 < delta < 1, "delta", "must be in (0,1)")
        _require(max_buckets >= 2, "max_buckets", "must be >= 2")
        _require(check_every >= 1, "check_every", "must be >= 1")
        self.delta = delta
        self.max_buckets = max_buckets
        self.check_every = check_every
        self._reset()

    def _reset(self):
        self._levels: list[deque[_Bucket]] = [deque()]
        self._total = 0.0
        self._sq = 0.0
        self._count = 0
        self._tick = 0

    def _insert(self, x):
        self._levels[0].appendleft(_Bucket(x, x * x, 1))
        self._total += x
        self._sq += x * x
        self._count += 1
        level = 0
        while len(self._levels[level]) > self.max_buckets:
            old2 = self._levels[level].pop()
            old1 = self._levels[level].pop()
            merged = _Bucket(old1.total + old2.total, old1.sq + old2.sq, old1.count + old2.count)
            if level + 1 == len(self._levels):
                self._levels.append(deque())
            self._levels[level + 1].appendleft(merged)
            level += 1

    def _variance(self) -> float:
        if self._count < 2:
            return 0.0
        mean = self._total / self._count
        return max(0.0, self._sq / self._count - mean * mean)

    def _drop_oldest(self):
        for level in range(len(self._levels) - 1, -1, -1):
            if self._levels[level]:
                bucket = self._levels[level].pop()
                self._total -= bucket.total
                self._sq -= bucket.sq
                self._count -= bucket.count
                return

    def _check_cut(self) -> bool:
        if self._count < 10:
            return False
        cut = False
        # Repeatedly drop the oldest bucket while any boundary is significant.
        again = True
        while again:
            again = False
            variance = self._variance()
            delta_prime = self.delta / max(self._count, 1)
            log_term = math.log(2.0 / delta_prime)
            n0 = 0
            s0 = 0.0
            # oldest -> newest over bucket boundaries
            for level in range(len(self._levels) - 1, -1, -1):
                for bucket in reversed(self._levels[level]):
                    n0 += bucket.count
                    s0 += bucket.total
                    n1 = self._count - n0
                    if n0 < 5 or n1 < 5:
                        continue
                    mean0 = s0 / n0
                    mean1 = (self._total - s0) / n1
                    m = 1.0 / (1.0 / n0 + 1.0 / n1)
                    eps = math.sqrt(2.0 / m * variance * log_term) + 2.0 / (3.0 * m) * log_term
                    if abs(mean0 - mean1) > eps:
                        self._drop_oldest()
                        cut = True
                        again = self._count > 10
                        break
                else:
                    continue
                break
        return cut

    def _update(self, x):
        self._insert(x)
        self._tick += 1
        if self._tick % self.check_every == 0 and self._check_cut():
            # The surviving (recent) sub-window is the post-drift state;
            # the stale prefix was already dropped during the cut.
            return Status.DRIFT
        return Status.IN_CONTROL

    def update(self, value: float) -> DetectorState:
        # ADWIN's reset is the window shrink performed during the cut; skip
        # the base-class full reset so the recent sub-window survives.
        value = float(value)
        if not math.isfinite(value):
            raise ToolkitError(f"{self.kind}: non-finite input value")
        if self._pending_reset:
            self._pending_reset = False
            self.n_seen = 0
        self.n_seen += 1
        status = self._update(value)
        if status is Status.DRIFT:
            self._pending_reset = True
        return DetectorState(status=status, n_seen=self.n_seen)


class _MinMaxNormalizer:
    """Online min-max rescaling of unbounded scores into [0,1].

    The range is learned over the first `window` values and then frozen
    (until the owning detector resets); a sliding range would chase a
    shifted mean and erase the very evidence the bound tests for.
    """

    def __init__(self, window: int = 200):
        self.window = window
        self._n = 0
        self._lo = math.inf
        self._hi = -math.inf

    def push(self, x: float) -> float:
        if self._n < self.window:
            self._n += 1
            self._lo = min(self._lo, x)
            self._hi = max(self._hi, x)
        if self._hi <= self._lo:
            return 0.5
        return min(1.0, max(0.0, (x - self._lo) / (self._hi - self._lo)))


class HddmA(Detector):
    """Hoeffding-bound mean monitor over [0,1]-rescaled scores.

    Tracks the prefix minimizing mean + bound and tests whether the
    suffix mean has risen significantly above it (optionally also the
    symmetric decrease test).
    """

    kind = "HDDM_A"

    def __init__(
        self,
        drift_confidence: float = 0.0001,
        warning_confidence: float = 0.0005,
        two_sided: bool = False,
        normalize_window: int = 200,
    ):
        super().__init__()
        _require(0 < drift_confidence < 1, "drift_confidence", "must be in (0,1)")
        _require(0 < warning_confidence < 1, "warning_confidence", "must be in (0,1)")
        self.drift_confidence = drift_confidence
        self.warning_confidence = warning_confidence
        self.two_sided = two_sided
        self.normalize_window = normalize_window
        self._reset()

    def _reset(self):
        self._normalizer = (
            _MinMaxNormalizer(self.normalize_window) if self.normalize_window else None
        )
        self._n = 0
        self._sum = 0.0
        self._low_n = 0
        self._low_sum = 0.0
        self._low_bound = math.inf
        self._high_n = 0
        self._high_sum = 0.0
        self._high_bound = -math.inf

    @staticmethod
    def _hoeffding(n: int, confidence: float) -> float:
        return math.sqrt(math.log(1.0 / confidence) / (2.0 * n))

    def _suffix_exceeds(self, cut_n: int, cut_sum: float, confidence: float, sign: float) -> bool:
        n1 = self._n - cut_n
        if cut_n < 5 or n1 < 5:
            return False
        mean0 = cut_sum / cut_n
        mean1 = (self._sum - cut_sum) / n1
        m = cut_n * n1 / (cut_n + n1)
        eps = math.sqrt(math.log(1.0 / confidence) / (2.0 * m))
        return sign * (mean1 - mean0) > eps

    def _update(self, x):
        if self._normalizer is not None:
            x = self._normalizer.push(x)
        self._n += 1
        self._sum += x
        mean = self._sum / self._n
        eps = self._hoeffding(self._n, self.drift_confidence)
        if mean + eps < self._low_bound:
            self._low_bound = mean + eps
            self._low_n = self._n
            self._low_sum = self._sum
        if mean - eps > self._high_bound:
            self._high_bound = mean - eps
            self._high_n = self._n
            self._high_sum = self._sum
        if self._suffix_exceeds(self._low_n, self._low_sum, self.drift_confidence, 1.0):
            return Status.DRIFT
        if self.two_sided and self._suffix_exceeds(
            self._high_n, self._high_sum, self.drift_confidence, -1.0
        ):
            return Status.DRIFT
        if self._suffix_exceeds(self._low_n, self._low_sum, self.warning_confidence, 1.0):
            return Status.WARNING
        return Status.IN_CONTROL


class _EwmaEstimator:
    __slots__ = ("ewma", "weight_sq", "n")

    def __init__(self):
        self.ewma = 0.0
        self.weight_sq = 0.0
        self.n = 0

    def push(self, x: float, lam: float) -> None:
        self.n += 1
        if self.n == 1:
            self.ewma = x
            self.weight_sq = 1.0
        else:
            self.ewma = (1.0 - lam) * self.ewma + lam * x
            self.weight_sq = (1.0 - lam) ** 2 * self.weight_sq + lam * lam

    def bound(self, confidence: float) -> float:
        # McDiarmid-style bound for a weighted average of [0,1] variables.
        return math.sqrt(self.weight_sq * math.log(1.0 / confidence) / 2.0)

    def snapshot(self) -> "_EwmaEstimator":
        other = _EwmaEstimator()
        other.ewma = self.ewma
        other.weight_sq = self.weight_sq
        other.n = self.n
        return other


class HddmW(Detector):
    """Weighted (EWMA) variant of the Hoeffding mean monitor."""

    kind = "HDDM_W"

    def __init__(
        self,
        drift_confidence: float = 0.001,
        warning_confidence: float = 0.005,
        lam: float = 0.05,
        two_sided: bool = False,
        normalize_window: int = 200,
    ):
        super().__init__()
        _require(0 < drift_confidence < 1, "drift_confidence", "must be in (0,1)")
        _require(0 < warning_confidence < 1, "warning_confidence", "must be in (0,1)")
        _require(0 < lam < 1, "lam", "must be in (0,1)")
        self.drift_confidence = drift_confidence
        self.warning_confidence = warning_confidence
        self.lam = lam
        self.two_sided = two_sided
        self.normalize_window = normalize_window
        self._reset()

    def _reset(self):
        self._normalizer = (
            _MinMaxNormalizer(self.normalize_window) if self.normalize_window else None
        )
        self._head = _EwmaEstimator()
        self._low: _EwmaEstimator | None = None
        self._high: _EwmaEstimator | None = None

    def _test(self, ref: _EwmaEstimator, confidence: float, sign: float) -> bool:
        if ref is None or self._head.n - ref.n < 5:
            return False
        eps = math.sqrt(
            (self._head.weight_sq + ref.weight_sq) * math.log(1.0 / confidence) / 2.0
        )
        return sign * (self._head.ewma - ref.ewma) > eps

    def _update(self, x):
        if self._normalizer is not None:
            x = self._normalizer.push(x)
        self._head.push(x, self.lam)
        if self._head.n < 5:
            return Status.IN_CONTROL
        bound = self._head.bound(self.drift_confidence)
        if self._low is None or self._head.ewma + bound < self._low.ewma + self._low.bound(
            self.drift_confidence
        ):
            self._low = self._head.snapshot()
        if self._high is None or self._head.ewma - bound > self._high.ewma - self._high.bound(
            self.drift_confidence
        ):
            self._high = self._head.snapshot()
        if self._test(self._low, self.drift_confidence, 1.0):
            return Status.DRIFT
        if self.two_sided and self._test(self._high, self.drift_confidence, -1.0):
            return Status.DRIFT
        if self._test(self._low, self.warning_confidence, 1.0):
            return Status.WARNING
        return Status.IN_CONTROL


class Seed(Detector):
    """Block-based Hoeffding test with decay compression of old blocks.

    Values are aggregated into fixed-size blocks; every completed block
    triggers a scan over block boundaries with a Bonferroni-corrected
    Hoeffding bound scaled to the empirically observed value range.
    Adjacent homogeneous blocks are merged, older pairs more eagerly.
    """

    kind = "SEED"

    def __init__(self, block_size: int = 32, delta: float = 0.05, compress_factor: float = 1.5):
        super().__init__()
        _require(block_size >= 2, "block_size", "must be >= 2")
        _require(0 < delta < 1, "delta", "must be in (0,1)")
        _require(compress_factor >= 1.0, "compress_factor", "must be >= 1")
        self.block_size = block_size
        self.delta = delta
        self.compress_factor = compress_factor
        self._reset()

    def _reset(self):
        self._blocks: list[list] = []  # [sum, count]
        self._cur_sum = 0.0
        self._cur_n = 0
        self._lo = math.inf
        self._hi = -math.inf

    def _eps(self, n0: int, n1: int, n_tests: int, scale: float) -> float:
        rng = self._hi - self._lo
        if rng <= 0:
            return math.inf
        corrected = self.delta / max(1, 4 * n_tests)
        return scale * rng * math.sqrt((n0 + n1) / (2.0 * n0 * n1) * math.log(1.0 / corrected))

    def _compress(self):
        if len(self._blocks) < 3:
            return
        merged = []
        i = 0
        k = len(self._blocks)
        while i < len(self._blocks):
            block = self._blocks[i]
            if merged:
                prev = merged[-1]
                # age fraction in [0,1]: older pairs get a looser merge bound
                age = 1.0 - i / k
                eps = self._eps(prev[1], block[1], k, self.compress_factor * (1.0 + age))
                if abs(prev[0] / prev[1] - block[0] / block[1]) <= eps:
                    prev[0] += block[0]
                    prev[1] += block[1]
                    i += 1
                    continue
            merged.append(block)
            i += 1
        self._blocks = merged

    def _check(self) -> bool:
        k = len(self._blocks)
        if k < 2:
            return False
        total_sum = sum(b[0] for b in self._blocks)
        total_n = sum(b[1] for b in self._blocks)
        n0 = 0
        s0 = 0.0
        for cut in range(k - 1):
            n0 += self._blocks[cut][1]
            s0 += self._blocks[cut][0]
            n1 = total_n - n0
            if abs(s0 / n0 - (total_sum - s0) / n1) > self._eps(n0, n1, k - 1, 1.0):
                # keep the post-cut blocks: the pre-drift prefix is forgotten
                self._blocks = self._blocks[cut + 1 :]
                return True
        return False

    def _update(self, x):
        self._lo = min(self._lo, x)
        self._hi = max(self._hi, x)
        self._cur_sum += x
        self._cur_n += 1
        if self._cur_n < self.block_size:
            return Status.IN_CONTROL
        self._blocks.append([self._cur_sum, self._cur_n])
        self._cur_sum = 0.0
        self._cur_n = 0
        if self._check():
            return Status.DRIFT
        self._compress()
        return Status.IN_CONTROL

    def update(self, value: float) -> DetectorState:
        # like ADWIN, the cut already discarded the stale prefix; keep the
        # surviving blocks instead of a full reset.
        value = float(value)
        if not math.isfinite(value):
            raise ToolkitError(f"{self.kind}: non-finite input value")
        if self._pending_reset:
            self._pending_reset = False
            self.n_seen = 0
        self.n_seen += 1
        status = self._update(value)
        if status is Status.DRIFT:
            self._pending_reset = True
        return DetectorState(status=status, n_seen=self.n_seen)


class Abcd(Detector):
    """Bernstein-bound mean monitor over a grid of candidate cut points.

    eps(n, var) = sqrt(2 var ln(2/delta') / n) + 2 R ln(2/delta') / (3 n)
    with the value range R tracked empirically and delta' Bonferroni-
    corrected over the evaluated cuts.
    """

    kind = "ABCD"

    def __init__(
        self,
        delta: float = 0.05,
        min_segment: int = 30,
        max_cuts: int = 20,
        check_every: int = 32,
    ):
        super().__init__()
        _require(0 < delta < 1, "delta", "must be in (0,1)")
        _require(min_segment >= 2, "min_segment", "must be >= 2")
        _require(max_cuts >= 1, "max_cuts", "must be >= 1")
        _require(check_every >= 1, "check_every", "must be >= 1")
        self.delta = delta
        self.min_segment = min_segment
        self.max_cuts = max_cuts
        self.check_every = check_every
        self._reset()

    def _reset(self):
        self._values: list[float] = []
        self._prefix_sum: list[float] = [0.0]
        self._prefix_sq: list[float] = [0.0]
        self._lo = math.inf
        self._hi = -math.inf

    def _push_value(self, x):
        self._values.append(x)
        self._prefix_sum.append(self._prefix_sum[-1] + x)
        self._prefix_sq.append(self._prefix_sq[-1] + x * x)
        self._lo = min(self._lo, x)
        self._hi = max(self._hi, x)

    def _segment(self, lo: int, hi: int) -> tuple[int, float, float]:
        n = hi - lo
        s = self._prefix_sum[hi] - self._prefix_sum[lo]
        sq = self._prefix_sq[hi] - self._prefix_sq[lo]
        mean = s / n
        var = max(0.0, sq / n - mean * mean)
        return n, mean, var

    def _bernstein(self, n: int, var: float, log_term: float) -> float:
        rng = self._hi - self._lo
        return math.sqrt(2.0 * var * log_term / n) + 2.0 * rng * log_term / (3.0 * n)

    def _check(self) -> bool:
        n = len(self._values)
        if n < 2 * self.min_segment:
            return False
        first = self.min_segment
        last = n - self.min_segment
        n_cuts = min(self.max_cuts, last - first + 1)
        if n_cuts < 1:
            return False
        log_term = math.log(2.0 * n_cuts / self.delta)
        for j in range(n_cuts):
            cut = first + (last - first) * j // max(1, n_cuts - 1) if n_cuts > 1 else first
            n0, mean0, var0 = self._segment(0, cut)
            n1, mean1, var1 = self._segment(cut, n)
            eps = self._bernstein(n0, var0, log_term) + self._bernstein(n1, var1, log_term)
            if abs(mean0 - mean1) > eps:
                return True
        return False

    def _update(self, x):
        self._push_value(x)
        if len(self._values) % self.check_every == 0 and self._check():
            return Status.DRIFT
        return Status.IN_CONTROL


DETECTOR_KINDS = (
    "CUSUM",
    "GMA",
    "PH",
    "DDM",
    "ADWIN",
    "HDDM_A",
    "HDDM_W",
    "SEED",
    "ABCD",
)

_CLASSES = {
    "CUSUM": Cusum,
    "GMA": Gma,
    "PH": PageHinckley,
    "DDM": Ddm,
    "ADWIN": Adwin,
    "HDDM_A": HddmA,
    "HDDM_W": HddmW,
    "SEED": Seed,
    "ABCD": Abcd,
}

DEFAULTS = {
    "CUSUM": {"min_n": 30, "delta": 0.25, "threshold": 50.0},
    "GMA": {"min_n": 30, "decay": 0.99, "threshold": 1.0},
    "PH": {"min_n": 30, "delta": 0.25, "threshold": 50.0, "alpha": 1.0},
    "DDM": {"min_n": 30, "warning_level": 2.0, "drift_level": 3.0},
    "ADWIN": {"delta": 0.002, "max_buckets": 5, "check_every": 32},
    "HDDM_A": {"drift_confidence": 0.0001, "warning_confidence": 0.0005, "two_sided": False,
               "normalize_window": 200},
    "HDDM_W": {"drift_confidence": 0.001, "warning_confidence": 0.005, "lam": 0.05,
               "two_sided": False, "normalize_window": 200},
    "SEED": {"block_size": 32, "delta": 0.05, "compress_factor": 1.5},
    "ABCD": {"delta": 0.05, "min_segment": 30, "max_cuts": 20, "check_every": 32},
}

# DDM's score-binarization adapter keys (consumed by detect_series, not
# by the detector itself).
_DDM_ADAPTER_KEYS = {"binarize_quantile": 95.0, "binarize_calibration_n": 50}


def create_detector(config: DetectorConfig) -> Detector:
    if config.kind not in _CLASSES:
        raise ParameterError(
            f"unknown detector kind '{config.kind}'; expected one of {', '.join(DETECTOR_KINDS)}"
        )
    cls = _CLASSES[config.kind]
    params = dict(config.params)
    if config.kind == "DDM":
        for key in _DDM_ADAPTER_KEYS:
            params.pop(key, None)
    valid = set(DEFAULTS[config.kind])
    unknown = set(params) - valid
    if unknown:
        raise ParameterError(
            f"unknown parameter '{sorted(unknown)[0]}' for detector {config.kind}"
        )
    return cls(**{**DEFAULTS[config.kind], **params})


def detect_series(config: DetectorConfig, scores: list[ScorePoint]) -> list[DriftEvent]:
    """Run one detector over a score stream, emitting an event per
    transition into Warning or Drift."""
    detector = create_detector(config)
    binarizer = None
    if config.kind == "DDM":
        binarizer = ScoreBinarizer(
            quantile=float(config.params.get("binarize_quantile", _DDM_ADAPTER_KEYS["binarize_quantile"])),
            calibration_n=int(
                config.params.get("binarize_calibration_n", _DDM_ADAPTER_KEYS["binarize_calibration_n"])
            ),
        )
    events = []
    previous = Status.IN_CONTROL
    for point in scores:
        value = point.score
        if binarizer is not None:
            value = binarizer.push(value)
            if value is None:
                continue
        state = detector.update(value)
        if state.status is not previous and state.status is not Status.IN_CONTROL:
            events.append(
                DriftEvent(
                    detector=config.kind,
                    kind=state.status.value,
                    t_seconds=point.t_seconds,
                    score_index=point.window_index,
                )
            )
        previous = state.status
    return events


def write_events_csv(events: list[DriftEvent], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["detector", "kind", "t_seconds", "score_index"])
        for e in events:
            writer.writerow([e.detector, e.kind, repr(e.t_seconds), e.score_index])
