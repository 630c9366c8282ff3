"""Pure-Python (numpy) propagation loop, used when the compiled kernel is absent."""
import numpy as np


def propagate(W, A, b, alpha, E, out, limit):
    """Run ``E.shape[0]`` rounds in place.

    Row ``i`` of round ``k + 1`` is ``(W X_k)_i - alpha * A_i (x_i - b_i) + E[k, i]``
    with ``X_k = out[k]``. Stops at the first entry that is non-finite or
    exceeds ``limit`` in magnitude.

    Returns:
        ``(k, i)`` of the first offending state row (0-based agent), or
        ``(-1, -1)`` when every round completed.
    """
    for k in range(E.shape[0]):
        X = out[k]
        grad = np.einsum("ipq,iq->ip", A, X - b)
        nxt = (W @ X - alpha * grad) + E[k]
        out[k + 1] = nxt
        bad = ~np.isfinite(nxt) | (np.abs(nxt) > limit)
        if bad.any():
            return k + 1, int(np.argwhere(bad)[0, 0])
    return -1, -1
