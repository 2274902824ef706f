"""Floating-point model of the moment map of Gr(2, C^5) and its torus action."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

PAIRS: tuple = tuple(itertools.combinations(range(1, 6), 2))
_PAIR_INDEX = {p: k for k, p in enumerate(PAIRS)}
# 0/1 matrix whose row k is e_i + e_j for the k-th pair
_PAIR_VECTORS = np.array([[int(m in p) for m in range(1, 6)] for p in PAIRS], dtype=float)

RANK_TOL = 1e-9
UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TwoPlane:
    """A 2 x 5 complex matrix whose rows span a plane in C^5."""

    rows: np.ndarray

    def __post_init__(self):
        m = np.array(self.rows, dtype=complex)
        if m.shape != (2, 5):
            raise ValueError(f"a two-plane is a 2 x 5 matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "rows", m)
        if largest_minor(m) < RANK_TOL:
            raise ValueError("rows do not span a plane")


@dataclass(frozen=True, eq=False)
class PluckerVector:
    """Coordinates z_ij, i < j, in the lexicographic order of :data:`PAIRS`."""

    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=complex)
        if z.shape != (10,):
            raise ValueError("a Plucker vector has 10 coordinates")
        if not np.any(z):
            raise ValueError("the zero vector is not a Plucker vector")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @classmethod
    def from_mapping(cls, coords: dict) -> "PluckerVector":
        z = np.zeros(10, dtype=complex)
        for (i, j), v in coords.items():
            z[_PAIR_INDEX[tuple(sorted((i, j)))]] = v
        return cls(z)

    def __getitem__(self, pair) -> complex:
        return complex(self.z[_PAIR_INDEX[tuple(sorted(pair))]])


@dataclass(frozen=True, eq=False)
class TorusElement:
    """Diagonal unitary (s_1, ..., s_5) with product 1."""

    s: np.ndarray

    def __post_init__(self):
        s = np.array(self.s, dtype=complex)
        if s.shape != (5,):
            raise ValueError("a torus element has 5 entries")
        if np.max(np.abs(np.abs(s) - 1)) > UNIT_TOL or abs(np.prod(s) - 1) > UNIT_TOL:
            raise ValueError("torus entries must be unit complex numbers with product 1")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @classmethod
    def identity(cls) -> "TorusElement":
        return cls(np.ones(5))


def _minors(m: np.ndarray) -> np.ndarray:
    return np.array([m[0, i - 1] * m[1, j - 1] - m[0, j - 1] * m[1, i - 1] for i, j in PAIRS])


def largest_minor(m: np.ndarray) -> float:
    return float(np.max(np.abs(_minors(m))))


def plucker(p: TwoPlane) -> PluckerVector:
    return PluckerVector(_minors(p.rows))


def _relations(z: np.ndarray) -> np.ndarray:
    """The five three-term relations, one per 4-subset i < j < k < l."""
    out = []
    for i, j, k, l in itertools.combinations(range(1, 6), 4):
        def c(a, b):
            return z[_PAIR_INDEX[(a, b)]]
        out.append(c(i, j) * c(k, l) - c(i, k) * c(j, l) + c(i, l) * c(j, k))
    return np.array(out)


def plucker_residual(z: PluckerVector) -> float:
    """Largest relation violation after scaling z to unit norm."""
    w = z.z / np.linalg.norm(z.z)
    return float(np.max(np.abs(_relations(w))))


def moment_weights(z: PluckerVector) -> np.ndarray:
    """Convex weights |z_ij|^2 / sum |z|^2 on the ten vertices e_i + e_j."""
    a = np.abs(z.z) ** 2
    return a / a.sum()


def moment(z: PluckerVector) -> np.ndarray:
    """Point of the hypersimplex (coordinate sum 2)."""
    return moment_weights(z) @ _PAIR_VECTORS


def act(z: PluckerVector, t: TorusElement) -> PluckerVector:
    scale = np.array([t.s[i - 1] * t.s[j - 1] for i, j in PAIRS])
    return PluckerVector(z.z * scale)


def permute(z: PluckerVector, perm) -> PluckerVector:
    """Relabel indices by ``k -> perm[k - 1]``, fixing signs so the result is again a Plucker vector."""
    out = np.zeros(10, dtype=complex)
    for (i, j), v in zip(PAIRS, z.z):
        a, b = perm[i - 1], perm[j - 1]
        out[_PAIR_INDEX[(min(a, b), max(a, b))]] = v if a < b else -v
    return PluckerVector(out)


def sample_plane(seed: int) -> TwoPlane:
    """Deterministic Gaussian 2 x 5 complex matrix; degenerate draws move to the next sub-seed."""
    for sub in itertools.count():
        rng = np.random.default_rng([seed, sub])
        m = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
        if largest_minor(m) >= RANK_TOL:
            return TwoPlane(m)
    raise AssertionError("unreachable")


def random_torus(rng: np.random.Generator) -> TorusElement:
    theta = rng.uniform(0, 2 * np.pi, 5)
    theta[-1] = -theta[:-1].sum()
    return TorusElement(np.exp(1j * theta))


def in_hypersimplex(x: np.ndarray, tol: float = UNIT_TOL) -> bool:
    return bool(np.all(x >= -tol) and np.all(x <= 1 + tol) and abs(x.sum() - 2) <= tol)


@dataclass(frozen=True)
class MomentCheck:
    samples: int
    seed: int
    max_invariance_residual: float
    max_plucker_residual: float
    containment_failures: int

    def passes(self, tol: float) -> bool:
        return (self.max_invariance_residual < tol and self.max_plucker_residual < tol
                and self.containment_failures == 0)

    def to_json(self) -> dict:
        return {"samples": self.samples, "seed": self.seed,
                "max_invariance_residual": self.max_invariance_residual,
                "max_plucker_residual": self.max_plucker_residual,
                "containment_failures": self.containment_failures}


def check_moment_map(samples: int = 10_000, seed: int = 0,
                     containment_tol: float = UNIT_TOL) -> MomentCheck:
    """Sample planes and torus elements; report the worst residuals seen."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    plane_seeds = rng.integers(0, 2**63 - 1, size=samples)
    inv = pl = 0.0
    failures = 0
    for plane_seed in plane_seeds:
        z = plucker(sample_plane(int(plane_seed)))
        w = moment_weights(z)
        x = w @ _PAIR_VECTORS
        if np.any(w < 0) or abs(w.sum() - 1) > containment_tol or not in_hypersimplex(x, containment_tol):
            failures += 1
        y = moment(act(z, random_torus(rng)))
        inv = max(inv, float(np.max(np.abs(y - x))))
        pl = max(pl, plucker_residual(z))
    return MomentCheck(samples, seed, inv, pl, failures)
