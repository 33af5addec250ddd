"""Cosine-kernel Kernel PCA and a logistic-regression separability score.

The kernel emphasizes angular relationships between feature vectors;
projections onto the top components expose domain separation, and the
separability score quantifies it in place of a scatter plot.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ToolkitError

__all__ = [
    "cosine_kernel_matrix",
    "center_kernel",
    "jacobi_eigh",
    "KpcaModel",
    "kpca_fit_project",
    "separability_score",
]


def cosine_kernel_matrix(x) -> np.ndarray:
    """Pairwise cosine similarities of the rows of x."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ToolkitError("data must be a 2-D array of row vectors")
    norms = np.linalg.norm(x, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ToolkitError(f"row {int(zero[0])} has zero norm; cosine kernel undefined")
    unit = x / norms[:, None]
    k = unit @ unit.T
    k = 0.5 * (k + k.T)
    np.fill_diagonal(k, 1.0)
    return np.clip(k, -1.0, 1.0)


def center_kernel(k) -> np.ndarray:
    """Double-center a kernel matrix: K' = K - 1K - K1 + 1K1 with 1 = J/n."""
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ToolkitError("kernel matrix must be square")
    row_means = k.mean(axis=1, keepdims=True)
    col_means = k.mean(axis=0, keepdims=True)
    centered = k - row_means - col_means + k.mean()
    return 0.5 * (centered + centered.T)


def jacobi_eigh(a, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Deterministic rotation order; returns (eigenvalues, eigenvectors as
    columns), unsorted.  Raises if the off-diagonal mass has not fallen
    below tol * ||A||_F after max_sweeps sweeps.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ToolkitError("matrix must be square")
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if norm == 0.0 or n == 1:
        return np.diag(a).copy(), v
    for _ in range(max_sweeps):
        off = _off_diagonal_norm(a)
        if off <= tol * norm:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol * norm / max(n, 1):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta  # asymptotic form, avoids theta**2 overflow
                else:
                    t = math_sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                a[p, q] = a[q, p] = 0.0
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    if _off_diagonal_norm(a) <= tol * norm:
        return np.diag(a).copy(), v
    raise NumericalError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")


def _off_diagonal_norm(a: np.ndarray) -> float:
    # summing the strict lower triangle avoids the catastrophic
    # cancellation of ||A||_F^2 - ||diag||^2 near convergence
    return float(np.sqrt(2.0 * np.sum(np.tril(a, -1) ** 2)))


def math_sign(x: float) -> float:
    return 1.0 if x >= 0 else -1.0


@dataclass(frozen=True)
class KpcaModel:
    """Top-m spectrum of the centered cosine kernel."""

    eigenvalues: np.ndarray  # descending, length m
    components: np.ndarray   # (n, m) unit-norm eigenvectors
    training_norms: np.ndarray


def kpca_fit_project(x, m: int = 3) -> tuple[KpcaModel, np.ndarray]:
    """Project rows of x onto the top-m kernel principal components.

    Projections are Y[:, c] = sqrt(lambda_c) * v_c, with each
    eigenvector's sign fixed so its largest-magnitude entry is positive.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < m + 1:
        raise ToolkitError(f"need at least m + 1 = {m + 1} samples, got {n}")
    k = cosine_kernel_matrix(x)
    centered = center_kernel(k)
    eigenvalues, vectors = jacobi_eigh(centered)
    order = np.argsort(eigenvalues)[::-1][:m]
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    for c in range(vectors.shape[1]):
        pivot = np.argmax(np.abs(vectors[:, c]))
        if vectors[pivot, c] < 0:
            vectors[:, c] = -vectors[:, c]
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    projections = vectors * np.sqrt(eigenvalues)[None, :]
    model = KpcaModel(
        eigenvalues=eigenvalues,
        components=vectors,
        training_norms=np.linalg.norm(x, axis=1),
    )
    return model, projections


def separability_score(
    y,
    labels,
    learning_rate: float = 0.1,
    iterations: int = 5000,
    l2: float = 1e-4,
) -> tuple[float, np.ndarray]:
    """Training accuracy of a batch-gradient logistic regression on y.

    Returns (accuracy, weights) where weights[0] is the intercept; a
    high accuracy is the numeric counterpart of visually well-separated
    clusters with a clean hyperplane between them.
    """
    y = np.asarray(y, dtype=float)
    labels = np.asarray(labels)
    if y.ndim != 2 or labels.shape != (y.shape[0],):
        raise ToolkitError("projections and labels must have matching lengths")
    classes = np.unique(labels)
    if classes.shape[0] != 2:
        raise ToolkitError(f"need exactly 2 classes, got {classes.shape[0]}")
    target = (labels == classes[1]).astype(float)
    design = np.hstack([np.ones((y.shape[0], 1)), y])
    weights = np.zeros(design.shape[1])
    n = design.shape[0]
    for _ in range(iterations):
        logits = np.clip(design @ weights, -500.0, 500.0)
        probs = 1.0 / (1.0 + np.exp(-logits))
        grad = design.T @ (probs - target) / n + l2 * weights
        weights -= learning_rate * grad
    predictions = (design @ weights) > 0
    accuracy = float(np.mean(predictions == (target == 1.0)))
    return accuracy, weights


def write_projection_csv(projections, labels, path) -> None:
    projections = np.asarray(projections)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index"] + [f"pc{c + 1}" for c in range(projections.shape[1])] + ["label"])
        for i in range(projections.shape[0]):
            writer.writerow([i] + [repr(float(v)) for v in projections[i]] + [labels[i]])
