"""Soft-margin SVM trained by SMO with second-order working-set selection.

Solves the dual

    min_a  1/2 a^T Q a - e^T a    s.t.  0 <= a_i <= C,  y^T a = 0,

with ``Q_ij = y_i y_j K(x_i, x_j)`` and ``K(u, v) = (gamma * u . v) ** degree``.
As in LIBSVM, ``gamma`` defaults to 1 / n_features so kernel values stay
near 1 whatever the dimension and ``C`` keeps the same meaning.
Pair selection and the clipped two-variable update follow Fan, Chen and
Lin's WSS2 scheme (as in LIBSVM).
"""

from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError
from ._util import as_dense, check_binary

TAU = 1e-12


def poly_kernel(A: np.ndarray, B: np.ndarray, degree: int, gamma: float = 1.0) -> np.ndarray:
    G = A @ B.T
    if gamma != 1.0:
        G *= gamma
    return G if degree == 1 else G ** degree


def smo(K: np.ndarray, y: np.ndarray, C: float, tol: float, max_iter: int):
    """Return ``(alpha, b, iterations, gap)`` for labels ``y`` in {-1, +1}."""
    n = len(y)
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of the dual objective
    QD = np.diag(K).copy()
    it = 0
    gap = np.inf
    while True:
        yG = -y * G
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.argmax(np.where(up, yG, -np.inf)))
        m_up = yG[i]
        M_low = float(np.min(np.where(low, yG, np.inf)))
        gap = m_up - M_low
        if gap < tol:
            break
        if it >= max_iter:
            raise ConvergenceError(
                f"SMO did not converge in {max_iter} iterations (KKT gap {gap:.3g})",
                iterations=it,
                residual=gap,
            )
        Ki = K[i]
        b_t = m_up - yG
        cand = low & (b_t > 0)
        a_t = QD[i] + QD - 2.0 * Ki
        a_t = np.where(a_t > 0, a_t, TAU)
        j = int(np.argmin(np.where(cand, -(b_t * b_t) / a_t, np.inf)))
        Kj = K[j]

        ai_old, aj_old = alpha[i], alpha[j]
        yi, yj = y[i], y[j]
        if yi != yj:
            quad = QD[i] + QD[j] + 2.0 * yi * yj * Ki[j]
            quad = quad if quad > 0 else TAU
            delta = (-G[i] - G[j]) / quad
            diff = ai_old - aj_old
            ai, aj = ai_old + delta, aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            quad = QD[i] + QD[j] - 2.0 * Ki[j]
            quad = quad if quad > 0 else TAU
            delta = (G[i] - G[j]) / quad
            s = ai_old + aj_old
            ai, aj = ai_old - delta, aj_old + delta
            if s > C:
                if ai > C:
                    ai, aj = C, s - C
            elif aj < 0:
                aj, ai = 0.0, s
            if s > C:
                if aj > C:
                    aj, ai = C, s - C
            elif ai < 0:
                ai, aj = 0.0, s
        alpha[i], alpha[j] = ai, aj
        G += y * (yi * (ai - ai_old) * Ki + yj * (aj - aj_old) * Kj)
        it += 1

    yG = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        b = float(np.mean(yG[free]))
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        m_up = yG[up].max() if up.any() else yG.max()
        M_low = yG[low].min() if low.any() else yG.min()
        b = float((m_up + M_low) / 2.0)
    return alpha, b, it, float(gap)


class SVM:
    """Polynomial-kernel SVM on internally standardized features."""

    algorithm = "SVM"

    def __init__(self, C: float = 1.0, degree: int = 1, tol: float = 1e-3, max_iter: int = 1_000_000, gamma=None):
        if C <= 0:
            raise ValueError("C must be positive")
        if degree < 1:
            raise ValueError("degree must be >= 1")
        self.C = C
        self.degree = degree
        self.tol = tol
        self.max_iter = max_iter
        self.gamma = gamma

    def _scale(self, X):
        return (as_dense(X) - self.mean_) / self.std_

    def fit(self, X, y):
        X = as_dense(X)
        y01 = check_binary(y)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.std_ = np.where(std > 0, std, 1.0)
        Z = (X - self.mean_) / self.std_
        ys = np.where(y01 == 1, 1.0, -1.0)
        self.gamma_ = float(self.gamma) if self.gamma is not None else 1.0 / max(Z.shape[1], 1)
        K = poly_kernel(Z, Z, self.degree, self.gamma_)
        alpha, b, self.n_iter_, self.gap_ = smo(K, ys, self.C, self.tol, self.max_iter)
        sv = alpha > 0
        self.alpha_ = alpha  # kept for KKT audits; not persisted
        self.support_ = Z[sv]
        self.dual_coef_ = alpha[sv] * ys[sv]
        self.b_ = b
        return self

    def decision_scores(self, X) -> np.ndarray:
        Z = self._scale(X)
        if len(self.dual_coef_) == 0:
            return np.full(Z.shape[0], self.b_)
        return poly_kernel(Z, self.support_, self.degree, self.gamma_) @ self.dual_coef_ + self.b_

    def predict(self, X) -> np.ndarray:
        return (self.decision_scores(X) > 0).astype(np.int64)

    def normalized_scores(self, X) -> np.ndarray:
        # logistic squashing: decision value 0 maps to 0.5
        return 1.0 / (1.0 + np.exp(-self.decision_scores(X)))

    def get_state(self):
        header = {"C": self.C, "degree": self.degree, "tol": self.tol, "max_iter": self.max_iter, "b": self.b_,
                  "gamma": self.gamma_}
        arrays = {"mean": self.mean_, "std": self.std_, "support": self.support_, "dual_coef": self.dual_coef_}
        return header, arrays

    @classmethod
    def from_state(cls, header, arrays):
        m = cls(header["C"], header["degree"], header["tol"], header["max_iter"])
        m.b_, m.gamma_ = header["b"], header["gamma"]
        m.mean_, m.std_ = arrays["mean"], arrays["std"]
        m.support_, m.dual_coef_ = arrays["support"], arrays["dual_coef"]
        return m


def kkt_violation(alpha: np.ndarray, y: np.ndarray, K: np.ndarray, b: float, C: float) -> float:
    """Largest KKT violation of ``alpha`` for labels ``y`` in {-1, +1}."""
    margin = y * (K @ (alpha * y) + b)
    viol = np.zeros_like(margin)
    at_zero = alpha <= 0
    at_c = alpha >= C
    free = ~(at_zero | at_c)
    viol[at_zero] = np.maximum(0.0, 1.0 - margin[at_zero])
    viol[at_c] = np.maximum(0.0, margin[at_c] - 1.0)
    viol[free] = np.abs(margin[free] - 1.0)
    return float(viol.max(initial=0.0))
