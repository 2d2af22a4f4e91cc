"""Automorphism generators of the supported Hartogs domains, their
analytic Jacobians, and the kernel transformation-law verifier.

Generators (all preserve the zero section {zeta = 0}):

* base and fiber unitaries (z, zeta) -> (U z, zeta), (z, U' zeta);
* Fock translations on Gaussian-weighted Hartogs domains over C^n,
  (z, zeta) -> (z - v, k_v(z) zeta) with k_v(z) = exp(mu <z,v> - mu|v|^2/2)
  the normalized Gaussian-space kernel;
* Moebius maps on generic-norm-weighted Hartogs domains over disk/ball,
  (z, zeta) -> (phi(z), U' * N(a,a)^(mu/2) / N(z,a)^mu * zeta) where phi is
  the base Moebius sending a to 0 ((z-a)/(1 - conj(a) z) on the disk, the
  involutive exchange of 0 and a on the ball);
* finite compositions of the above.

The closed-form Jacobian determinants on the zero section come with a
finite-difference oracle that also checks holomorphy via the Cauchy-Riemann
defect, so a buggy non-holomorphic map is detected rather than assumed away.

The transformation law K(x, y) = J(x) conj(J(y)) K(F x, F y), restricted to
the zero section, is evaluated through the fiber-restriction identity
K_Omega((z,0),(w,0)) = (m!/pi^m) K_{D, p^m}(z, w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DomainKind,
    GaussianPower,
    GenericNormPower,
    as_point,
    contains,
    generic_norm,
    generic_norm_power,
    hermitian_inner,
)
from .hartogs import HartogsDomain
from .moments import _reduce_weight
from . import jsonio

_UNITARY_TOL = 1e-12


def _check_unitary(U: np.ndarray, dim: int, what: str) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (dim, dim):
        raise ValueError(f"{what} must be {dim}x{dim}")
    defect = np.max(np.abs(U.conj().T @ U - np.eye(dim)))
    if defect > _UNITARY_TOL:
        raise ValueError(f"{what} is not unitary (defect {defect:.2e})")
    return U


def _gaussian_rate(domain: HartogsDomain) -> float:
    scale, form, power = _reduce_weight(domain.weight)
    if not isinstance(form, GaussianPower) or domain.base.bounded:
        raise ValueError("target is not a Gaussian-weighted Hartogs domain "
                         "over the full space")
    return form.mu * power


def _norm_power_rate(domain: HartogsDomain) -> float:
    scale, form, power = _reduce_weight(domain.weight)
    if not isinstance(form, GenericNormPower) or domain.base.kind not in (
            DomainKind.UNIT_DISK, DomainKind.UNIT_BALL):
        raise ValueError("target is not a generic-norm-weighted Hartogs "
                         "domain over the disk or ball")
    return form.mu * power


@dataclass(frozen=True)
class BaseUnitary:
    target: HartogsDomain
    matrix: tuple

    def _U(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=complex)


@dataclass(frozen=True)
class FiberUnitary:
    target: HartogsDomain
    matrix: tuple

    def _U(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=complex)


@dataclass(frozen=True)
class FockTranslation:
    """(z, zeta) -> (z - v, k_v(z) zeta) with the Gaussian rate of the target."""

    target: HartogsDomain
    v: tuple
    mu: float

    def fiber_factor(self, z: np.ndarray) -> complex:
        v = np.asarray(self.v, dtype=complex)
        return complex(np.exp(self.mu * hermitian_inner(z, v)
                              - 0.5 * self.mu * float(np.sum(np.abs(v) ** 2))))


@dataclass(frozen=True)
class MobiusMap:
    """Base Moebius phi with phi(a) = 0 plus the induced fiber factor."""

    target: HartogsDomain
    a: tuple
    mu: float
    fiber_unitary: tuple

    def _a(self) -> np.ndarray:
        return np.asarray(self.a, dtype=complex)

    def _U(self) -> np.ndarray:
        return np.asarray(self.fiber_unitary, dtype=complex)

    def fiber_factor(self, z: np.ndarray) -> complex:
        a = self._a()
        base = self.target.base
        naa = generic_norm(base, a, a).real
        return complex(naa ** (self.mu / 2.0)
                       * generic_norm_power(base, z, a, -self.mu))

    def base_apply(self, z: np.ndarray) -> np.ndarray:
        a = self._a()
        base = self.target.base
        if np.all(a == 0):
            return z.copy()
        if base.kind is DomainKind.UNIT_DISK:
            return (z - a) / (1.0 - np.conj(a[0]) * z)
        # involutive ball Moebius exchanging 0 and a
        na2 = float(np.sum(np.abs(a) ** 2))
        s = math.sqrt(1.0 - na2)
        za = hermitian_inner(z, a)
        Pz = (za / na2) * a
        Qz = z - Pz
        return (a - Pz - s * Qz) / (1.0 - za)

    def base_jacobian(self, z: np.ndarray) -> complex:
        a = self._a()
        base = self.target.base
        if np.all(a == 0):
            return 1.0 + 0.0j
        if base.kind is DomainKind.UNIT_DISK:
            return complex((1.0 - abs(a[0]) ** 2)
                           / (1.0 - np.conj(a[0]) * z[0]) ** 2)
        n = base.dim
        na2 = float(np.sum(np.abs(a) ** 2))
        s = math.sqrt(1.0 - na2)
        return complex((-1.0) ** n * s ** (n + 1)
                       / (1.0 - hermitian_inner(z, a)) ** (n + 1))


@dataclass(frozen=True)
class Composite:
    target: HartogsDomain
    parts: tuple

    def __post_init__(self):
        for p in self.parts:
            if p.target != self.target:
                raise ValueError("composite parts must share one target domain")


AutomorphismSpec = BaseUnitary | FiberUnitary | FockTranslation | MobiusMap | Composite


# ---------------------------------------------------------------------------
# constructors

def make_fbh_map(domain: HartogsDomain, kind: str, *, v=None, matrix=None
                 ) -> AutomorphismSpec:
    """Generators of Gaussian-weighted Hartogs domains over C^n.

    ``kind`` is "translation" (needs v), "base_unitary" or "fiber_unitary"
    (need matrix).  The translation's fiber factor is the normalized
    Gaussian-space kernel k_v at the weight's decay rate.
    """
    mu = _gaussian_rate(domain)
    if kind == "translation":
        vv = as_point(v, domain.base.dim)
        return FockTranslation(domain, tuple(vv), mu)
    if kind == "base_unitary":
        U = _check_unitary(matrix, domain.base.dim, "base unitary")
        return BaseUnitary(domain, tuple(map(tuple, U)))
    if kind == "fiber_unitary":
        U = _check_unitary(matrix, domain.fiber_dim, "fiber unitary")
        return FiberUnitary(domain, tuple(map(tuple, U)))
    raise ValueError(f"unknown generator kind {kind!r}")


def make_ch_map(domain: HartogsDomain, a, fiber_unitary=None) -> MobiusMap:
    """Moebius generator of a generic-norm-weighted Hartogs domain.

    ``a`` is the interior base point sent to 0; the fiber unitary defaults
    to the identity.  The disk uses (z - a)/(1 - conj(a) z); the ball the
    standard involutive Moebius exchanging 0 and a.
    """
    mu = _norm_power_rate(domain)
    av = as_point(a, domain.base.dim)
    if contains(domain.base, av) >= 0:
        raise ValueError("Moebius center must be an interior base point")
    U = np.eye(domain.fiber_dim, dtype=complex) if fiber_unitary is None \
        else _check_unitary(fiber_unitary, domain.fiber_dim, "fiber unitary")
    return MobiusMap(domain, tuple(av), mu, tuple(map(tuple, U)))


def thullen_mobius(domain: HartogsDomain, a: complex) -> MobiusMap:
    """The disk specialization with one fiber dimension."""
    if domain.base.kind is not DomainKind.UNIT_DISK or domain.fiber_dim != 1:
        raise ValueError("Thullen maps live over the disk with fiber dim 1")
    return make_ch_map(domain, [a])


# ---------------------------------------------------------------------------
# action, inverses, base points

def apply(aut: AutomorphismSpec, point) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the map at (z, zeta); composites apply left to right."""
    z, zeta = point
    z = as_point(z, aut.target.base.dim)
    zeta = as_point(zeta, aut.target.fiber_dim)
    if isinstance(aut, BaseUnitary):
        return aut._U() @ z, zeta.copy()
    if isinstance(aut, FiberUnitary):
        return z.copy(), aut._U() @ zeta
    if isinstance(aut, FockTranslation):
        return z - np.asarray(aut.v, dtype=complex), aut.fiber_factor(z) * zeta
    if isinstance(aut, MobiusMap):
        return aut.base_apply(z), aut.fiber_factor(z) * (aut._U() @ zeta)
    if isinstance(aut, Composite):
        cur = (z, zeta)
        for part in aut.parts:
            cur = apply(part, cur)
        return cur
    raise TypeError(f"unknown automorphism {aut!r}")


def base_apply(aut: AutomorphismSpec, z) -> np.ndarray:
    """The base component of the action (the zero section is preserved)."""
    out, _ = apply(aut, (z, np.zeros(aut.target.fiber_dim, dtype=complex)))
    return out


def inverse(aut: AutomorphismSpec) -> AutomorphismSpec:
    """Exact algebraic inverse of a generator or composite."""
    if isinstance(aut, BaseUnitary):
        return BaseUnitary(aut.target, tuple(map(tuple, aut._U().conj().T)))
    if isinstance(aut, FiberUnitary):
        return FiberUnitary(aut.target, tuple(map(tuple, aut._U().conj().T)))
    if isinstance(aut, FockTranslation):
        return FockTranslation(aut.target,
                               tuple(-np.asarray(aut.v, dtype=complex)), aut.mu)
    if isinstance(aut, MobiusMap):
        Uinv = tuple(map(tuple, aut._U().conj().T))
        if aut.target.base.kind is DomainKind.UNIT_DISK:
            return MobiusMap(aut.target,
                             tuple(-np.asarray(aut.a, dtype=complex)),
                             aut.mu, Uinv)
        return MobiusMap(aut.target, aut.a, aut.mu, Uinv)
    if isinstance(aut, Composite):
        return Composite(aut.target, tuple(inverse(p) for p in reversed(aut.parts)))
    raise TypeError(f"unknown automorphism {aut!r}")


def zero_preimage(aut: AutomorphismSpec) -> np.ndarray:
    """The base point z0 with phi_1(z0) = 0."""
    n = aut.target.base.dim
    if isinstance(aut, (BaseUnitary, FiberUnitary)):
        return np.zeros(n, dtype=complex)
    if isinstance(aut, FockTranslation):
        return np.asarray(aut.v, dtype=complex)
    if isinstance(aut, MobiusMap):
        return np.asarray(aut.a, dtype=complex)
    if isinstance(aut, Composite):
        return base_apply(inverse(aut), np.zeros(n, dtype=complex))
    raise TypeError(f"unknown automorphism {aut!r}")


# ---------------------------------------------------------------------------
# Jacobians

def jacobian_base_slice(aut: AutomorphismSpec, z) -> complex:
    """Closed-form full Jacobian determinant at (z, 0).

    Unitaries contribute det U; translations k_v(z)^m; Moebius maps
    N(a,a)^(m mu/2) N(z,a)^(-m mu) det J(phi, z) det U'.  Composites chain
    through the base orbit, which is valid because every generator fixes
    the zero section with a fiber block linear in zeta.
    """
    z = as_point(z, aut.target.base.dim)
    m = aut.target.fiber_dim
    if isinstance(aut, BaseUnitary):
        return complex(np.linalg.det(aut._U()))
    if isinstance(aut, FiberUnitary):
        return complex(np.linalg.det(aut._U()))
    if isinstance(aut, FockTranslation):
        return aut.fiber_factor(z) ** m
    if isinstance(aut, MobiusMap):
        detU = complex(np.linalg.det(aut._U()))
        return aut.fiber_factor(z) ** m * aut.base_jacobian(z) * detU
    if isinstance(aut, Composite):
        total = 1.0 + 0.0j
        cur = z
        for part in aut.parts:
            total *= jacobian_base_slice(part, cur)
            cur = base_apply(part, cur)
        return total
    raise TypeError(f"unknown automorphism {aut!r}")


def jacobian_fd_matrix(aut: AutomorphismSpec, point, h: float = 1e-5
                       ) -> tuple[np.ndarray, float]:
    """Central finite-difference holomorphic Jacobian of the full map.

    Returns the (n+m) x (n+m) matrix of dF_i/dx_j and the largest
    Cauchy-Riemann defect |dF/d conj(x)| seen; a defect above 1e-6 raises,
    because it means the map under test is not holomorphic.
    """
    z, zeta = point
    z = as_point(z, aut.target.base.dim)
    zeta = as_point(zeta, aut.target.fiber_dim)
    x0 = np.concatenate([z, zeta])
    n = aut.target.base.dim
    dim = x0.size

    if aut.target.base.bounded and contains(aut.target.base, z) > -4.0 * h:
        raise ValueError("step too large for the domain margin at this point")

    def F(x: np.ndarray) -> np.ndarray:
        out_z, out_zeta = apply(aut, (x[:n], x[n:]))
        return np.concatenate([out_z, out_zeta])

    J = np.empty((dim, dim), dtype=complex)
    cr_defect = 0.0
    for j in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[j] = 1.0
        dx = (F(x0 + h * e) - F(x0 - h * e)) / (2.0 * h)
        dy = (F(x0 + 1j * h * e) - F(x0 - 1j * h * e)) / (2.0 * h)
        J[:, j] = (dx - 1j * dy) / 2.0
        cr_defect = max(cr_defect, float(np.max(np.abs((dx + 1j * dy) / 2.0))))
    if cr_defect > 1e-6:
        raise ValueError(f"map is not holomorphic: CR defect {cr_defect:.2e}")
    return J, cr_defect


def jacobian_fd(aut: AutomorphismSpec, point, h: float = 1e-5) -> complex:
    """Finite-difference determinant oracle for jacobian_base_slice."""
    J, _ = jacobian_fd_matrix(aut, point, h)
    return complex(np.linalg.det(J))


# ---------------------------------------------------------------------------
# transformation law

def transform_residual(aut: AutomorphismSpec, slice_kernel, points) -> float:
    """Max relative residual of the transformation law on the zero section.

    ``slice_kernel`` evaluates K_{D, p^m}(z, w) (a kernel model or plain
    callable); through the fiber-restriction identity this determines the
    Hartogs kernel at zero fiber, so the law reads

        K(z, w) = J(z) conj(J(w)) K(phi(z), phi(w))

    with J the full Jacobian determinant at (z, 0).  The residual is
    maximized over all ordered pairs of the supplied base points.
    """
    kfun = slice_kernel.eval if hasattr(slice_kernel, "eval") else slice_kernel
    m = aut.target.fiber_dim
    c = math.factorial(m) / math.pi ** m
    pts = [as_point(p, aut.target.base.dim) for p in points]
    jacs = [jacobian_base_slice(aut, p) for p in pts]
    imgs = [base_apply(aut, p) for p in pts]
    worst = 0.0
    for i, zi in enumerate(pts):
        for j, zj in enumerate(pts):
            lhs = c * kfun(zi, zj)
            rhs = jacs[i] * np.conj(jacs[j]) * c * kfun(imgs[i], imgs[j])
            denom = abs(lhs)
            if denom < 1e-300:
                continue
            worst = max(worst, abs(lhs - rhs) / denom)
    return worst


# ---------------------------------------------------------------------------
# serialization

def map_to_json(aut: AutomorphismSpec) -> dict:
    if isinstance(aut, BaseUnitary):
        return {"kind": "base_unitary", "matrix": jsonio.cmatrix(aut._U())}
    if isinstance(aut, FiberUnitary):
        return {"kind": "fiber_unitary", "matrix": jsonio.cmatrix(aut._U())}
    if isinstance(aut, FockTranslation):
        return {"kind": "translation", "v": jsonio.cpoint(np.asarray(aut.v)),
                "mu": aut.mu}
    if isinstance(aut, MobiusMap):
        return {"kind": "mobius", "a": jsonio.cpoint(np.asarray(aut.a)),
                "mu": aut.mu, "fiber_unitary": jsonio.cmatrix(aut._U())}
    if isinstance(aut, Composite):
        return {"kind": "composite", "parts": [map_to_json(p) for p in aut.parts]}
    raise TypeError(f"unknown automorphism {aut!r}")


def map_from_json(obj: dict, domain: HartogsDomain) -> AutomorphismSpec:
    kind = obj["kind"]
    n, m = domain.base.dim, domain.fiber_dim
    if kind == "base_unitary":
        U = jsonio.as_cmatrix(obj["matrix"], (n, n))
        return make_fbh_map(domain, "base_unitary", matrix=U) \
            if not domain.base.bounded else BaseUnitary(domain, tuple(map(tuple, _check_unitary(U, n, "base unitary"))))
    if kind == "fiber_unitary":
        U = _check_unitary(jsonio.as_cmatrix(obj["matrix"], (m, m)), m,
                           "fiber unitary")
        return FiberUnitary(domain, tuple(map(tuple, U)))
    if kind == "translation":
        return make_fbh_map(domain, "translation", v=jsonio.as_cpoint(obj["v"]))
    if kind == "mobius":
        U = None
        if "fiber_unitary" in obj:
            U = jsonio.as_cmatrix(obj["fiber_unitary"], (m, m))
        return make_ch_map(domain, jsonio.as_cpoint(obj["a"]), U)
    if kind == "composite":
        return Composite(domain, tuple(map_from_json(p, domain)
                                       for p in obj["parts"]))
    raise ValueError(f"unknown map kind {kind!r}")
