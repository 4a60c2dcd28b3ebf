"""Reference baselines for the greedy trainer on small frozen problems."""
import numpy as np

from .readout import calibrate, normalize

MAX_EXHAUSTIVE_NODES = 20


def _standardized_targets(targets) -> np.ndarray:
    return normalize(targets, calibrate(targets))


def exhaustive_oracle(P_batch, targets, chunk: int = 1 << 14):
    """Global optimum over all Boolean weight vectors.

    Every vector gets its own output standardization; vectors with a
    constant output (e.g. all zeros) are skipped. Ties resolve to the
    lowest index, where bit ``i`` of the index is the weight of node ``i``.

    Returns:
        ``(weights, eps)``.
    """
    P = np.asarray(P_batch, dtype=float)
    n = P.shape[1]
    if n > MAX_EXHAUSTIVE_NODES:
        raise ValueError(f"exhaustive search limited to {MAX_EXHAUSTIVE_NODES} nodes, got {n}")
    t = _standardized_targets(targets)
    bits = np.arange(n)
    best_eps, best_idx = np.inf, None
    for start in range(0, 2**n, chunk):
        idx = np.arange(start, min(start + chunk, 2**n))
        W = ((idx[:, None] >> bits) & 1).astype(float)
        Y = W @ P.T
        mu = Y.mean(axis=1, keepdims=True)
        sd = Y.std(axis=1, keepdims=True)
        live = sd[:, 0] > 1e-13 * np.maximum(np.abs(mu[:, 0]), np.finfo(float).tiny)
        if not live.any():
            continue
        Ys = (Y[live] - mu[live]) / sd[live]
        eps = np.mean((Ys - t) ** 2, axis=1)
        j = int(np.argmin(eps))
        if eps[j] < best_eps:
            best_eps, best_idx = float(eps[j]), int(idx[live][j])
    if best_idx is None:
        raise ValueError("every weight vector gives a constant output")
    return ((best_idx >> bits) & 1).astype(np.uint8), best_eps


def ridge_oracle(P_batch, targets, lam: float = 0.0) -> float:
    """Training error of real-valued ridge weights plus bias.

    Fits the standardized targets. At ``lam = 0`` this lower-bounds the error
    of any Boolean readout, since a standardized Boolean output is itself
    an affine function of the powers.
    """
    X = np.asarray(P_batch, dtype=float)
    t = _standardized_targets(targets)
    Xc = X - X.mean(axis=0)
    if lam == 0:
        beta = np.linalg.lstsq(Xc, t, rcond=None)[0]
    else:
        beta = np.linalg.solve(Xc.T @ Xc + lam * np.eye(X.shape[1]), Xc.T @ t)
    return float(np.mean((Xc @ beta - t) ** 2))
