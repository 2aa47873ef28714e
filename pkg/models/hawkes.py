from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.kernel import KernelKind, KernelSpec

Matrix = List[List[float]]


def _check_square(v: Optional[Matrix], name: str) -> Optional[Matrix]:
    if v is None:
        return v
    if len(v) != 2 or any(len(row) != 2 for row in v):
        raise ValueError(f"{name} must be a 2x2 matrix")
    return [[float(x) for x in row] for row in v]


class HawkesModel(BaseModel):
    """Bivariate Hawkes model; component 0 is Buy, component 1 is Sell.

    Entry (i, j) of each matrix describes phi_ij, the effect of a type-j event
    on the type-i intensity. All four kernels share ``kind``.
    Serializes to the model JSON schema:
    ``{"kind", "mu", "alpha", "beta", "epsilon" (power_law only)}``.
    """

    model_config = ConfigDict(frozen=True)

    kind: KernelKind
    mu: Tuple[float, float]
    alpha: Matrix
    beta: Matrix
    epsilon: Optional[Matrix] = None

    @field_validator("mu")
    @classmethod
    def _positive_mu(cls, v):
        if not all(m > 0 for m in v):
            raise ValueError("base intensities must be > 0")
        return v

    @field_validator("alpha", "beta", "epsilon")
    @classmethod
    def _square(cls, v, info):
        return _check_square(v, info.field_name)

    @model_validator(mode="after")
    def _check_entries(self) -> "HawkesModel":
        if any(a < 0 for row in self.alpha for a in row):
            raise ValueError("alpha entries must be >= 0")
        if any(not b > 0 for row in self.beta for b in row):
            raise ValueError("beta entries must be > 0")
        if self.kind is KernelKind.POWER_LAW:
            if self.epsilon is None:
                raise ValueError("power_law model needs an epsilon matrix")
            if any(not e > 0 for row in self.epsilon for e in row):
                raise ValueError("epsilon entries must be > 0")
        elif self.epsilon is not None:
            raise ValueError("exponential model takes no epsilon matrix")
        return self

    def kernel(self, i: int, j: int) -> KernelSpec:
        eps = self.epsilon[i][j] if self.epsilon is not None else None
        return KernelSpec(kind=self.kind, alpha=self.alpha[i][j], beta=self.beta[i][j], epsilon=eps)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(mu, alpha, beta, epsilon) as float arrays; epsilon is ones for exponential models."""
        mu = np.asarray(self.mu, dtype=np.float64)
        alpha = np.ascontiguousarray(self.alpha, dtype=np.float64)
        beta = np.ascontiguousarray(self.beta, dtype=np.float64)
        if self.epsilon is None:
            eps = np.ones((2, 2), dtype=np.float64)
        else:
            eps = np.ascontiguousarray(self.epsilon, dtype=np.float64)
        return mu, alpha, beta, eps

    @classmethod
    def from_arrays(cls, kind: KernelKind, mu, alpha, beta, epsilon=None) -> "HawkesModel":
        return cls(
            kind=kind,
            mu=(float(mu[0]), float(mu[1])),
            alpha=np.asarray(alpha, dtype=float).tolist(),
            beta=np.asarray(beta, dtype=float).tolist(),
            epsilon=None if kind is KernelKind.EXPONENTIAL else np.asarray(epsilon, dtype=float).tolist(),
        )

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=True)

    def swapped(self) -> "HawkesModel":
        """Same model with the Buy and Sell labels exchanged."""
        perm = [1, 0]

        def flip(m):
            return None if m is None else [[m[perm[i]][perm[j]] for j in range(2)] for i in range(2)]

        return HawkesModel(
            kind=self.kind,
            mu=(self.mu[1], self.mu[0]),
            alpha=flip(self.alpha),
            beta=flip(self.beta),
            epsilon=flip(self.epsilon),
        )


class IntensitySample(BaseModel):
    model_config = ConfigDict(frozen=True)

    time: float
    lambda_buy: float = Field(..., ge=0)
    lambda_sell: float = Field(..., ge=0)
