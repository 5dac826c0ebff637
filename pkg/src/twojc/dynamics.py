"""Analytic time evolution and observables.

With the blocks diagonalized, the joint state at time t is a sum over
photon indices n of the three symmetric-sector branches

    sum_k A_n D_k^(n)(t) |phi_k> x |n+k-1>,

where D_k^(n)(t) = sum_j C_j,init C_jk exp(-i E_j t) and the initial
atomic state selects init = 1 (both excited) or init = 2 (symmetric
entangled).  Everything observable -- inversion, reduced densities,
purity, concurrence, entropies, the Husimi distribution -- is assembled
from these coefficients.  Note the bookkeeping convention: block n puts
n+k-1 photons under branch k, so a "symmetric" run starting in branch 2
carries one quantum more in the field than the bare amplitude index
suggests.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from ._accel import USE_NUMBA, maybe_njit, prange
from .errors import NumericalGuardError, TruncationError, TwojcError
from .spectral import jacobi_eigh, stack_spectra

SQRT2 = math.sqrt(2.0)

TAIL_TOL = 1e-12
NORM_TOL = 1e-12


class AtomInit(Enum):
    BOTH_EXCITED = "both_excited"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class FieldInit:
    """Initial field amplitudes on a truncated Fock ladder.

    amplitudes[n] weights block n; the top two slots act as a safety
    buffer (the joint basis reaches n+2) and must be essentially empty.
    """

    amplitudes: np.ndarray
    n_max: int
    mean_n: float
    atom_init: AtomInit = AtomInit.BOTH_EXCITED

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if len(amps) != self.n_max + 1:
            raise TwojcError("amplitudes must have n_max + 1 entries")
        # tail first: a heavily truncated state is a truncation problem,
        # not a normalization problem
        tail = float(np.sum(np.abs(amps[self.n_max - 1:]) ** 2))
        if tail >= TAIL_TOL:
            raise TruncationError(
                f"tail mass {tail:.3e} above the top two Fock slots; increase n_max",
                suggested_n_max=auto_n_max(self.mean_n))
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise TwojcError(f"field amplitudes not normalized: sum P_n = {norm!r}")

    @property
    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


def auto_n_max(mean_n: float) -> int:
    """Truncation heuristic leaving a wide Poisson tail margin."""
    return int(math.ceil(mean_n + 12.0 * math.sqrt(max(mean_n, 0.0)) + 20.0))


def coherent_field(mean_n: float, phase: float = 0.0, n_max: int = None,
                   atom_init: AtomInit = AtomInit.BOTH_EXCITED) -> FieldInit:
    """Coherent-state amplitudes A_n = e^{-m/2} (sqrt(m) e^{i phi})^n / sqrt(n!).

    Computed in log space so large n never touches an explicit
    factorial.  n_max defaults to auto_n_max(mean_n).
    """
    if mean_n < 0:
        raise TwojcError("mean photon number must be nonnegative")
    if n_max is None:
        n_max = auto_n_max(mean_n)
    n = np.arange(n_max + 1)
    if mean_n == 0.0:
        amps = np.zeros(n_max + 1, dtype=np.complex128)
        amps[0] = 1.0
    else:
        logmag = -mean_n / 2.0 + 0.5 * n * math.log(mean_n) - 0.5 * gammaln(n + 1.0)
        amps = np.exp(logmag) * np.exp(1j * n * phase)
    return FieldInit(amplitudes=amps, n_max=n_max, mean_n=float(mean_n),
                     atom_init=atom_init)


@dataclass(frozen=True)
class EvolutionCoeffs:
    """Branch coefficients D_k^(n)(t) for every block, at one time."""

    time: float
    atom_init: AtomInit
    coeffs: np.ndarray  # (n_max+1, 3) complex


def _init_column(atom_init: AtomInit) -> int:
    return 0 if atom_init is AtomInit.BOTH_EXCITED else 1


def _coeff_batch(E, C, times, atom_init):
    """D[t, n, k] over a time array; (T, n_max+1, 3) complex."""
    col = _init_column(atom_init)
    W = C[:, :, col][:, :, None] * C              # (N+1, 3, 3) over j
    phases = np.exp(-1j * E[None, :, :] * np.asarray(times)[:, None, None])
    return np.einsum("njk,tnj->tnk", W, phases)


def evolve_coeffs(spectra, atom_init: AtomInit, t: float) -> EvolutionCoeffs:
    """Branch coefficients at time t from the block spectra."""
    E, C, _, _, _ = stack_spectra(spectra)
    D = _coeff_batch(E, C, np.array([t]), atom_init)[0]
    return EvolutionCoeffs(time=float(t), atom_init=atom_init, coeffs=D)


# ---------------------------------------------------------------------------
# densities

@dataclass(frozen=True)
class AtomDensity:
    """Reduced 3x3 atomic density in the basis (|e,e>, sym, |g,g>)."""

    matrix: np.ndarray

    @property
    def trace_defect(self):
        return abs(float(np.trace(self.matrix).real) - 1.0)

    @property
    def hermiticity_defect(self):
        return float(np.abs(self.matrix - self.matrix.conj().T).max())


@dataclass(frozen=True)
class FieldDensity:
    """Reduced field density on Fock levels 0 .. n_max + 2."""

    matrix: np.ndarray

    @property
    def n_max(self):
        return self.matrix.shape[0] - 3

    @property
    def trace_defect(self):
        return abs(float(np.trace(self.matrix).real) - 1.0)

    def mean_photons(self):
        return float(np.sum(np.arange(self.matrix.shape[0]) * np.diag(self.matrix).real))


def _rho_atoms_batch(A, D):
    """rho_A[t] from padded shifted sums; (T, 3, 3) complex.

    Entry (k, j) sums A_{n+j-k} A_n^* D_k^{(n+j-k)} D_j^{(n)*}; amplitude
    and coefficient indices outside [0, n_max] count as zero.
    """
    T = D.shape[0]
    Np1 = len(A)
    Ap = np.concatenate([np.zeros(2, np.complex128), A, np.zeros(2, np.complex128)])
    Dp = np.concatenate([np.zeros((T, 2, 3), np.complex128), D,
                         np.zeros((T, 2, 3), np.complex128)], axis=1)
    idx = np.arange(Np1)
    rho = np.empty((T, 3, 3), dtype=np.complex128)
    for k in range(3):
        for j in range(3):
            s = j - k
            rho[:, k, j] = np.sum(
                Ap[None, idx + 2 + s] * np.conj(A)[None, :]
                * Dp[:, idx + 2 + s, k] * np.conj(D[:, idx, j]), axis=1)
    return rho


def reduced_atom_density(field: FieldInit, spectra, t: float) -> AtomDensity:
    E, C, _, _, _ = stack_spectra(spectra)
    D = _coeff_batch(E, C, np.array([t]), field.atom_init)
    rho = _rho_atoms_batch(field.amplitudes, D)[0]
    rho.setflags(write=False)
    return AtomDensity(matrix=rho)


def reduced_field_density(field: FieldInit, spectra, t: float) -> FieldDensity:
    """rho_F(t) = sum_k |chi_k><chi_k| with chi_k[n+k-1] = A_n D_k^(n)."""
    E, C, _, _, _ = stack_spectra(spectra)
    D = _coeff_batch(E, C, np.array([t]), field.atom_init)[0]
    N = field.n_max
    M = N + 3
    rho = np.zeros((M, M), dtype=np.complex128)
    for k in range(3):
        chi = np.zeros(M, dtype=np.complex128)
        chi[k:k + N + 1] = field.amplitudes * D[:, k]
        rho += np.outer(chi, chi.conj())
    rho.setflags(write=False)
    return FieldDensity(matrix=rho)


# ---------------------------------------------------------------------------
# scalar observables

def inversion_series(field: FieldInit, spectra, times) -> np.ndarray:
    """<D_Z>(t) for each t; D_Z = (sigma_z^(1) + sigma_z^(2)) / 2."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if field.atom_init is AtomInit.BOTH_EXCITED:
        E, C, O, ld, lo = stack_spectra(spectra)
        Pn = field.probabilities
        const = float(np.sum(Pn * ld.sum(axis=1)))
        cosines = np.cos(O[None, :, :] * times[:, None, None])
        return const + 2.0 * np.einsum("n,nk,tnk->t", Pn, lo, cosines)
    # symmetric start: no closed form with these amplitudes; use rho_A
    E, C, _, _, _ = stack_spectra(spectra)
    D = _coeff_batch(E, C, times, field.atom_init)
    rho = _rho_atoms_batch(field.amplitudes, D)
    return np.real(rho[:, 0, 0] - rho[:, 2, 2])


def atomic_inversion(field: FieldInit, spectra, t: float) -> float:
    return float(inversion_series(field, spectra, [t])[0])


def purity(rho: AtomDensity) -> float:
    """Tr(rho^2); for the Hermitian 3x3 this is the squared entry sum."""
    m = rho.matrix if isinstance(rho, AtomDensity) else np.asarray(rho)
    return float(np.sum(np.abs(m) ** 2))


def hermitian_eigvals(mat) -> np.ndarray:
    """Eigenvalues of a small complex Hermitian matrix via the real
    symmetric embedding [[Re, -Im], [Im, Re]] and the in-module Jacobi
    solver (each eigenvalue of the embedding appears twice)."""
    m = np.asarray(mat, dtype=np.complex128)
    k = m.shape[0]
    emb = np.empty((2 * k, 2 * k))
    emb[:k, :k] = m.real
    emb[k:, k:] = m.real
    emb[:k, k:] = -m.imag
    emb[k:, :k] = m.imag
    w, _ = jacobi_eigh(emb)
    return np.sort(w)[::2]


def field_entropy(rho: AtomDensity) -> float:
    """von Neumann entropy of the field through the atomic eigenvalues.

    For a joint pure state the field and atom entropies coincide, so the
    3x3 atomic density is enough; eigenvalues are clipped to [0, 1] and
    anything below 1e-14 contributes nothing (x ln x -> 0).
    """
    m = rho.matrix if isinstance(rho, AtomDensity) else np.asarray(rho)
    w = np.clip(hermitian_eigvals(m), 0.0, 1.0)
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log(w)))


def entropy_of_eigvals(w) -> float:
    """-sum w ln w with the same clipping rules as field_entropy."""
    w = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log(w)))


# computational-basis order (|g,g>, |g,e>, |e,g>, |e,e>)
_EMBED = np.zeros((4, 3))
_EMBED[3, 0] = 1.0
_EMBED[1, 1] = _EMBED[2, 1] = 1.0 / SQRT2
_EMBED[0, 2] = 1.0

_YY = np.zeros((4, 4))
_YY[0, 3] = _YY[3, 0] = -1.0
_YY[1, 2] = _YY[2, 1] = 1.0


def embed_atom_density(rho) -> np.ndarray:
    """Map the symmetric-sector 3x3 density into the two-qubit
    computational basis (zero antisymmetric component)."""
    m = rho.matrix if isinstance(rho, AtomDensity) else np.asarray(rho)
    return _EMBED @ m @ _EMBED.T


def concurrence(rho) -> float:
    """Two-qubit concurrence of the atomic state.

    Accepts the symmetric-sector 3x3 (embedded automatically) or a full
    4x4 in the computational basis.  Eigenvalues of rho (YY) rho* (YY)
    are real up to rounding; an imaginary residue above 1e-8 aborts
    rather than being dropped.
    """
    m = rho.matrix if isinstance(rho, AtomDensity) else np.asarray(rho)
    if m.shape == (3, 3):
        m = embed_atom_density(m)
    elif m.shape != (4, 4):
        raise TwojcError("concurrence expects a 3x3 or 4x4 density matrix")
    mt = m @ _YY @ m.conj() @ _YY
    ev = np.linalg.eigvals(mt)
    if np.abs(ev.imag).max() > 1e-8:
        raise NumericalGuardError(
            f"concurrence eigenproblem left imaginary residue {np.abs(ev.imag).max():.2e}")
    lam = np.sqrt(np.clip(ev.real, 0.0, None))
    lam[::-1].sort()
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


# ---------------------------------------------------------------------------
# Husimi distribution

@dataclass(frozen=True)
class QGrid:
    """Husimi values on a rectangular grid of alpha = re + i im.

    values[i, j] corresponds to (im_axis[i], re_axis[j]).
    """

    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        dre = self.re_axis[1] - self.re_axis[0]
        dim = self.im_axis[1] - self.im_axis[0]
        return float(self.values.sum() * dre * dim)


def _check_window(rho_dim: int, alpha_sq_max: float):
    n_max = rho_dim - 3
    if alpha_sq_max > 0.5 * n_max:
        raise NumericalGuardError(
            f"|alpha|^2 = {alpha_sq_max:.2f} outside the trusted window "
            f"(needs n_max >= {int(math.ceil(2 * alpha_sq_max))}, have {n_max})")


def coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    """Fock components <p|alpha> for p < dim, built in log space."""
    p = np.arange(dim)
    aa = abs(alpha) ** 2
    if aa == 0.0:
        c = np.zeros(dim, dtype=np.complex128)
        c[0] = 1.0
        return c
    logmag = -aa / 2.0 + 0.5 * p * math.log(aa) - 0.5 * gammaln(p + 1.0)
    return np.exp(logmag) * np.exp(1j * p * np.angle(alpha))


def husimi_q(rho: FieldDensity, alpha: complex) -> float:
    """Q(alpha) = <alpha| rho |alpha> / pi at a single phase-space point."""
    m = rho.matrix if isinstance(rho, FieldDensity) else np.asarray(rho)
    _check_window(m.shape[0], abs(alpha) ** 2)
    c = coherent_vector(alpha, m.shape[0])
    return float(np.real(c.conj() @ (m @ c)) / math.pi)


@maybe_njit(parallel=True)
def _husimi_kernel(rho, re_axis, im_axis, lgam):
    n_re = re_axis.shape[0]
    n_im = im_axis.shape[0]
    P = rho.shape[0]
    out = np.empty((n_im, n_re))
    for i in prange(n_im):
        c = np.empty(P, dtype=np.complex128)
        for j in range(n_re):
            re = re_axis[j]
            im = im_axis[i]
            aa = re * re + im * im
            if aa == 0.0:
                for p in range(P):
                    c[p] = 0.0
                c[0] = 1.0
            else:
                la = 0.5 * math.log(aa)
                ang = math.atan2(im, re)
                for p in range(P):
                    mag = math.exp(-0.5 * aa + p * la - 0.5 * lgam[p])
                    c[p] = complex(mag * math.cos(p * ang), mag * math.sin(p * ang))
            acc = 0.0
            for p in range(P):
                s = complex(0.0, 0.0)
                for q in range(P):
                    s += rho[p, q] * c[q]
                acc += (c[p].conjugate() * s).real
            out[i, j] = acc / math.pi
    return out


def _husimi_grid_numpy(rho, re_axis, im_axis, lgam, chunk=4096):
    n_re, n_im = len(re_axis), len(im_axis)
    P = rho.shape[0]
    alpha = (re_axis[None, :] + 1j * im_axis[:, None]).ravel()
    out = np.empty(alpha.size)
    p = np.arange(P)
    for lo in range(0, alpha.size, chunk):
        al = alpha[lo:lo + chunk]
        aa = np.abs(al) ** 2
        safe = np.where(aa > 0, aa, 1.0)
        logmag = -aa[:, None] / 2 + 0.5 * p[None, :] * np.log(safe)[:, None] - 0.5 * lgam[None, :]
        cm = np.exp(logmag) * np.exp(1j * p[None, :] * np.angle(al)[:, None])
        zero = aa == 0
        if zero.any():
            cm[zero] = 0.0
            cm[zero, 0] = 1.0
        t = cm @ rho.T
        out[lo:lo + chunk] = np.einsum("kp,kp->k", cm.conj(), t).real / math.pi
    return out.reshape(n_im, n_re)


def husimi_grid(rho: FieldDensity, re_axis, im_axis) -> QGrid:
    """Husimi values over a rectangular grid (numba kernel when enabled)."""
    m = rho.matrix if isinstance(rho, FieldDensity) else np.asarray(rho)
    re_axis = np.ascontiguousarray(re_axis, dtype=float)
    im_axis = np.ascontiguousarray(im_axis, dtype=float)
    corners = max(abs(re_axis[0]), abs(re_axis[-1])) ** 2 \
        + max(abs(im_axis[0]), abs(im_axis[-1])) ** 2
    _check_window(m.shape[0], corners)
    lgam = gammaln(np.arange(m.shape[0]) + 1.0)
    rho_c = np.ascontiguousarray(m, dtype=np.complex128)
    if USE_NUMBA:
        values = _husimi_kernel(rho_c, re_axis, im_axis, lgam)
    else:
        values = _husimi_grid_numpy(rho_c, re_axis, im_axis, lgam)
    return QGrid(re_axis=re_axis, im_axis=im_axis, values=values)


# ---------------------------------------------------------------------------
# series driver

SERIES_OBSERVABLES = ("inversion", "purity", "concurrence", "entropy")


def observable_series(field: FieldInit, spectra, times, observables) -> dict:
    """Evaluate the requested scalar observables on a shared time grid.

    Returns {name: array}; branch coefficients and densities are reused
    across observables.  Times are in absolute units (multiply tau = g t
    by 1/g upstream).
    """
    times = np.asarray(times, dtype=float)
    bad = [o for o in observables if o not in SERIES_OBSERVABLES]
    if bad:
        raise TwojcError(f"unknown observables: {bad}")
    out = {}
    need_rho = any(o in observables for o in ("purity", "concurrence", "entropy"))
    if "inversion" in observables:
        out["inversion"] = inversion_series(field, spectra, times)
    if need_rho:
        E, C, _, _, _ = stack_spectra(spectra)
        D = _coeff_batch(E, C, times, field.atom_init)
        rho = _rho_atoms_batch(field.amplitudes, D)
        if "purity" in observables:
            out["purity"] = np.sum(np.abs(rho) ** 2, axis=(1, 2))
        if "concurrence" in observables:
            out["concurrence"] = np.array([concurrence(r) for r in rho])
        if "entropy" in observables:
            out["entropy"] = np.array(
                [entropy_of_eigvals(hermitian_eigvals(r)) for r in rho])
    return out
