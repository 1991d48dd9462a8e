"""Finite-dimensional realizations of the example operators.

Three storage layouts cover every desk-scale experiment: symmetric real
tridiagonal stencils, diagonal operators in a known orthonormal basis
(sine modes, or an explicit eigenvector matrix), and dense complex
matrices. Handles are immutable after construction; the numerical radius
and sector angle are computed eagerly so shared handles need no locking.

Sizes are capped at dimension 4096 so everything stays dense and every
experiment runs in seconds.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import scipy.fft
import scipy.linalg

from .errors import DomainError, SingularityError
from .symbols import SectorSpec

DESK_DIM_CAP = 4096


# ---------------------------------------------------------------------------
# orthonormal bases for diagonal storage


class MatrixBasis:
    """Diagonalizing basis given by an explicit unitary matrix Q."""

    def __init__(self, q: np.ndarray):
        self.q = np.asarray(q)

    def forward(self, v):
        return self.q.conj().T @ v

    def inverse(self, c):
        return self.q @ c


class SineBasis1D:
    """Orthonormal sine modes on m interior points of an interval."""

    def __init__(self, m: int):
        self.m = m

    def _dst(self, v):
        if np.iscomplexobj(v):
            return scipy.fft.dst(v.real, type=1, norm="ortho") + 1j * scipy.fft.dst(
                v.imag, type=1, norm="ortho"
            )
        return scipy.fft.dst(v, type=1, norm="ortho")

    # the orthonormal DST-I is involutive, so forward and inverse coincide
    def forward(self, v):
        return self._dst(v)

    inverse = forward


class SineBasis2D:
    """Tensor-product sine modes on an m-by-m interior grid."""

    def __init__(self, m: int):
        self.m = m

    def _dst2(self, v):
        g = v.reshape(self.m, self.m)

        def real_dst2(x):
            y = scipy.fft.dst(x, type=1, norm="ortho", axis=0)
            return scipy.fft.dst(y, type=1, norm="ortho", axis=1)

        if np.iscomplexobj(g):
            out = real_dst2(g.real) + 1j * real_dst2(g.imag)
        else:
            out = real_dst2(g)
        return out.reshape(self.m * self.m)

    def forward(self, v):
        return self._dst2(v)

    inverse = forward


# ---------------------------------------------------------------------------
# operator handles


class OperatorHandle:
    """Shared surface: apply A, factor (c*I - s*A), report spectrum data."""

    dim: int
    hermitian: bool
    cached_radius: float | None
    sector_phi: float | None

    def apply(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def shifted_solver(self, c: complex, s: complex = 1.0):
        """Return a solve callable for (c*I - s*A) x = b, factored once."""
        raise NotImplementedError

    def eigenvalues(self) -> np.ndarray | None:
        """Spectrum when known exactly or cheaply, sorted; else None."""
        return None

    def dense(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_normal(self) -> bool:
        return False


class TridiagonalOperator(OperatorHandle):
    """Symmetric real tridiagonal matrix (off, diag, off)."""

    def __init__(self, diag, off, known_eigs=None, sector_phi=None):
        self.diag_values = np.asarray(diag, dtype=float)
        self.off_values = np.asarray(off, dtype=float)
        self.dim = len(self.diag_values)
        if len(self.off_values) != self.dim - 1:
            raise DomainError("off-diagonal length must be dim - 1")
        self.hermitian = True
        self._eigs = (
            np.sort(np.asarray(known_eigs, dtype=float))
            if known_eigs is not None
            else np.sort(
                scipy.linalg.eigvalsh_tridiagonal(self.diag_values, self.off_values)
            )
        )
        self.cached_radius = float(np.max(np.abs(self._eigs)))
        self.sector_phi = sector_phi

    def apply(self, v):
        out = self.diag_values * v
        out[:-1] += self.off_values * v[1:]
        out[1:] += self.off_values * v[:-1]
        return out

    def shifted_solver(self, c, s=1.0):
        ab = np.zeros((3, self.dim), dtype=complex)
        ab[0, 1:] = -s * self.off_values
        ab[1, :] = c - s * self.diag_values
        ab[2, :-1] = -s * self.off_values

        def solve(b):
            try:
                return scipy.linalg.solve_banded((1, 1), ab, b)
            except np.linalg.LinAlgError as exc:
                raise SingularityError(f"singular step matrix: {exc}") from exc

        return solve

    def eigenvalues(self):
        return self._eigs

    def dense(self):
        m = np.diag(self.diag_values).astype(complex)
        idx = np.arange(self.dim - 1)
        m[idx, idx + 1] = self.off_values
        m[idx + 1, idx] = self.off_values
        return m

    @property
    def is_normal(self):
        return True


class SpectralDiagonalOperator(OperatorHandle):
    """Operator diagonal in a known orthonormal basis."""

    def __init__(self, eigs, basis, sector_phi=None):
        self._eigs_basis = np.asarray(eigs)
        self.basis = basis
        self.dim = len(self._eigs_basis)
        self.hermitian = bool(np.all(np.isreal(self._eigs_basis)))
        if self.hermitian:
            self._eigs_basis = self._eigs_basis.real
        self.cached_radius = float(np.max(np.abs(self._eigs_basis)))
        self.sector_phi = sector_phi

    def apply(self, v):
        return self.basis.inverse(self._eigs_basis * self.basis.forward(v))

    def shifted_solver(self, c, s=1.0):
        denom = c - s * self._eigs_basis.astype(complex)
        if np.any(np.abs(denom) == 0.0):
            raise SingularityError("singular step matrix: shift hits an eigenvalue")
        inv = 1.0 / denom

        def solve(b):
            return self.basis.inverse(inv * self.basis.forward(b.astype(complex)))

        return solve

    def eigenvalues(self):
        if self.hermitian:
            return np.sort(self._eigs_basis)
        return np.sort_complex(self._eigs_basis)

    def dense(self):
        eye = np.eye(self.dim, dtype=complex)
        cols = [self.apply(eye[:, k]) for k in range(self.dim)]
        return np.stack(cols, axis=1)

    @property
    def is_normal(self):
        return True


class DenseOperator(OperatorHandle):
    """General dense complex matrix."""

    def __init__(self, mat, sector_phi=None):
        self.mat = np.asarray(mat, dtype=complex)
        if self.mat.ndim != 2 or self.mat.shape[0] != self.mat.shape[1]:
            raise DomainError("dense operator needs a square matrix")
        self.dim = self.mat.shape[0]
        if self.dim > DESK_DIM_CAP:
            raise DomainError(f"dimension {self.dim} exceeds desk-scale cap {DESK_DIM_CAP}")
        self.hermitian = bool(np.allclose(self.mat, self.mat.conj().T, atol=1e-13))
        self._eigs = np.sort_complex(np.linalg.eigvals(self.mat))
        self.cached_radius = _field_of_values_radius(self.mat)
        self.sector_phi = sector_phi

    def apply(self, v):
        return self.mat @ v

    def shifted_solver(self, c, s=1.0):
        try:
            lu, piv = scipy.linalg.lu_factor(
                c * np.eye(self.dim, dtype=complex) - s * self.mat
            )
        except np.linalg.LinAlgError as exc:
            raise SingularityError(f"singular step matrix: {exc}") from exc

        def solve(b):
            return scipy.linalg.lu_solve((lu, piv), b)

        return solve

    def eigenvalues(self):
        return self._eigs

    def dense(self):
        return self.mat

    @property
    def is_normal(self):
        return self.hermitian


# ---------------------------------------------------------------------------
# constructors for the example operators


def _lap1d_eigs(m: int, h: float) -> np.ndarray:
    k = np.arange(1, m + 1, dtype=float)
    return -(4.0 / h**2) * np.sin(k * math.pi / (2.0 * (m + 1))) ** 2


def dirichlet_laplacian_1d(m: int, length: float = 1.0) -> TridiagonalOperator:
    """Second-order stencil of the Laplacian on (0, length), zero boundary.

    m interior points, h = length/(m+1); the spectrum is known in closed
    form and is cached at construction.
    """
    if m < 2:
        raise DomainError(f"need at least 2 interior points, got {m}")
    if length <= 0.0:
        raise DomainError(f"length must be positive, got {length}")
    h = length / (m + 1)
    return TridiagonalOperator(
        diag=np.full(m, -2.0 / h**2),
        off=np.full(m - 1, 1.0 / h**2),
        known_eigs=_lap1d_eigs(m, h),
        sector_phi=math.pi,
    )


def dirichlet_laplacian_2d(m: int, length: float = 1.0) -> SpectralDiagonalOperator:
    """Kronecker-sum Laplacian on an m-by-m interior grid of a square.

    Diagonal in the tensor sine basis with eigenvalues lam_j + lam_k of
    the one-dimensional stencil.
    """
    if m < 2:
        raise DomainError(f"need at least 2 interior points per side, got {m}")
    if m * m > DESK_DIM_CAP:
        raise DomainError(f"dimension {m * m} exceeds desk-scale cap {DESK_DIM_CAP}")
    h = length / (m + 1)
    lam = _lap1d_eigs(m, h)
    eigs = (lam[:, None] + lam[None, :]).reshape(m * m)
    return SpectralDiagonalOperator(eigs, SineBasis2D(m), sector_phi=math.pi)


def fractional_laplacian_half(m: int, length: float = 1.0) -> SpectralDiagonalOperator:
    """Negative square root of the discrete Dirichlet Laplacian,
    realized spectrally on the sine eigenbasis."""
    if m < 2:
        raise DomainError(f"need at least 2 interior points, got {m}")
    h = length / (m + 1)
    eigs = -np.sqrt(np.abs(_lap1d_eigs(m, h)))
    return SpectralDiagonalOperator(eigs, SineBasis1D(m), sector_phi=math.pi)


def complex_scaled(a: OperatorHandle, phi: float) -> OperatorHandle:
    """Rotate a hermitian negative-definite operator by e^(i*phi).

    The spectrum moves onto the rays arg = +/-(pi - phi), so the largest
    sector the rotated operator avoids has half-angle pi - |phi|.
    """
    if not (-math.pi < phi < math.pi):
        raise DomainError(f"phi must lie in (-pi, pi), got {phi}")
    eigs = a.eigenvalues()
    if not a.hermitian or eigs is None or np.any(eigs.real >= 0.0):
        raise DomainError("complex_scaled requires a hermitian negative-definite operator")
    if phi == 0.0:
        return a
    rot = cmath.exp(1j * phi)
    sector = math.pi - abs(phi)
    if isinstance(a, SpectralDiagonalOperator):
        return SpectralDiagonalOperator(a._eigs_basis * rot, a.basis, sector_phi=sector)
    vals, vecs = np.linalg.eigh(a.dense())
    return SpectralDiagonalOperator(vals * rot, MatrixBasis(vecs), sector_phi=sector)


def scalar_operator(lam: complex) -> DenseOperator:
    """One-dimensional operator, used for scalar stability probes."""
    lam = complex(lam)
    phi = abs(cmath.phase(lam)) if lam != 0 else None
    return DenseOperator(np.array([[lam]]), sector_phi=phi)


# ---------------------------------------------------------------------------
# numerical range and resolvent diagnostics


def _field_of_values_radius(mat: np.ndarray, rel_tol: float = 1e-7) -> float:
    """Radius of the numerical range of a dense matrix.

    The boundary support function in direction theta is the largest
    eigenvalue of the hermitian part of e^(i*theta) A; the radius is its
    maximum over theta, located on a coarse grid and sharpened by
    golden-section search.
    """

    def support(theta: float) -> float:
        r = cmath.exp(1j * theta) * mat
        return float(np.linalg.eigvalsh(0.5 * (r + r.conj().T))[-1])

    thetas = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    values = np.array([support(t) for t in thetas])
    best = int(np.argmax(values))
    lo = thetas[best] - 2.0 * math.pi / 64
    hi = thetas[best] + 2.0 * math.pi / 64
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = support(x1), support(x2)
    while hi - lo > rel_tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = support(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = support(x1)
    return max(float(np.max(values)), f1, f2)


def numerical_radius(a: OperatorHandle) -> float:
    """Largest modulus over the numerical range of A.

    Exact (max |eigenvalue|) for hermitian and normal-diagonal handles;
    dense handles use the rotated-hermitian-part boundary search cached
    at construction.
    """
    if a.cached_radius is not None:
        return a.cached_radius
    return _field_of_values_radius(a.dense())


def resolvent_norm_scan(
    a: OperatorHandle, sector: SectorSpec, n_samples: int = 48
) -> float:
    """sup of ||z (z - A)^(-1)|| over sampled z inside the sector.

    Moduli are log-spaced over [1e-3, 1e6] * (r(A) + 1) on the two
    boundary rays and the bisector. Raises if the spectrum touches the
    closed sector, which signals a sector violation.
    """
    if sector.angle >= math.pi:
        raise DomainError("scan requires a sector angle below pi")
    if n_samples < 2:
        raise DomainError("need at least 2 samples per ray")
    eigs = a.eigenvalues()
    if eigs is not None:
        args = np.abs(np.angle(eigs.astype(complex)))
        if np.any(np.abs(eigs) == 0.0) or np.any(args <= sector.angle + 1e-14):
            raise SingularityError(
                "spectrum intersects the closed sector; resolvent unbounded"
            )
    radius = numerical_radius(a) + 1.0
    moduli = np.logspace(-3.0, 6.0, n_samples) * radius
    sup = 0.0
    for ray in (sector.angle, -sector.angle, 0.0):
        zs = moduli * cmath.exp(1j * ray)
        for z in zs:
            sup = max(sup, _scaled_resolvent_norm(a, complex(z), eigs))
    return sup


def _scaled_resolvent_norm(a, z, eigs):
    if a.is_normal and eigs is not None:
        gap = np.min(np.abs(z - eigs))
        if gap == 0.0:
            raise SingularityError(f"resolvent sample z = {z} hits the spectrum")
        return abs(z) / float(gap)
    shifted = z * np.eye(a.dim, dtype=complex) - a.dense()
    smin = float(scipy.linalg.svdvals(shifted)[-1])
    if smin == 0.0:
        raise SingularityError(f"resolvent sample z = {z} hits the spectrum")
    return abs(z) / smin
