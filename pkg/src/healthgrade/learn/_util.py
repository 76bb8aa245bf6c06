from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..errors import DegenerateDatasetError


def as_dense(X) -> np.ndarray:
    if sp.issparse(X):
        X = X.toarray()
    return np.asarray(X, dtype=np.float64)


def check_binary(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64).ravel()
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 (NotSatisfactory) or 1 (Satisfactory)")
    if y.min(initial=1) == y.max(initial=0) or len(y) == 0:
        raise DegenerateDatasetError("training data must contain both classes")
    return y
