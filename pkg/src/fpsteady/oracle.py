"""Brute-force steady-state solver in a truncated Fock basis.

Builds the Liouvillian as a sparse matrix under column-stacking
vectorisation (vec(A X B) = (B^T kron A) vec(X)) and solves the linear
system with one row replaced by the trace constraint.  This is the
independent oracle every analytic formula in the package is checked
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionError, DomainError, SingularSystem
from .phasespace import GridSpec, QGrid

DEFAULT_DIM_CAP = 4096


@dataclass
class FockOperatorSpec:
    """Hamiltonian + collapse operators over a multimode truncated Fock space.

    Operator products are ladder strings: whitespace-separated tokens
    ``a<mode>`` / ``ad<mode>``, applied left to right, e.g. ``"ad0 ad0 a0 a0"``
    for the Kerr term on mode 0.  Collapse amplitudes absorb the rate, i.e.
    the pair (sqrt(rate), string) enters the dissipator directly.
    """

    dims: list
    hamiltonian_terms: list = field(default_factory=list)
    collapse_ops: list = field(default_factory=list)
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if any(d < 2 for d in self.dims):
            raise DomainError("every mode needs at least 2 Fock levels")
        if math.prod(self.dims) > self.dim_cap:
            raise DimensionError(
                f"total dimension {math.prod(self.dims)} exceeds cap {self.dim_cap}"
            )


@dataclass
class SteadyDensityMatrix:
    dims: list
    rho: np.ndarray
    residual_norm: float
    truncation_converged: bool = True

    @property
    def dim(self):
        return math.prod(self.dims)


def destroy(dim):
    return sp.diags(np.sqrt(np.arange(1, dim)), 1, format="csr", dtype=complex)


def mode_operator(dims, mode, dagger=False):
    """Ladder operator of one mode embedded in the full tensor space."""
    ops = []
    for i, d in enumerate(dims):
        if i == mode:
            a = destroy(d)
            ops.append(a.conj().T if dagger else a)
        else:
            ops.append(sp.identity(d, format="csr", dtype=complex))
    out = ops[0]
    for op in ops[1:]:
        out = sp.kron(out, op, format="csr")
    return out


def ladder_string(dims, string):
    """Parse e.g. ``"ad0 a1"`` into the corresponding sparse operator."""
    total = math.prod(dims)
    out = sp.identity(total, format="csr", dtype=complex)
    for token in string.split():
        if token.startswith("ad"):
            mode = int(token[2:])
            out = out @ mode_operator(dims, mode, dagger=True)
        elif token.startswith("a"):
            mode = int(token[1:])
            out = out @ mode_operator(dims, mode, dagger=False)
        else:
            raise DomainError(f"unknown ladder token {token!r}")
    return out


def _assemble_hamiltonian(spec):
    total = math.prod(spec.dims)
    h = sp.csr_matrix((total, total), dtype=complex)
    for coeff, string in spec.hamiltonian_terms:
        h = h + complex(coeff) * ladder_string(spec.dims, string)
    # terms must combine into a Hermitian operator
    asym = abs(h - h.conj().T).max()
    scale = max(abs(h).max(), 1.0)
    if asym > 1e-10 * scale:
        raise DomainError("Hamiltonian terms do not form a Hermitian operator")
    return h


def build_liouvillian(spec):
    """Sparse matrix of rho -> -i[H, rho] + sum_k D[c_k] rho, column-stacked."""
    total = math.prod(spec.dims)
    ident = sp.identity(total, format="csr", dtype=complex)
    h = _assemble_hamiltonian(spec)
    liou = -1j * (sp.kron(ident, h) - sp.kron(h.T, ident))
    for amp, string in spec.collapse_ops:
        c = complex(amp) * ladder_string(spec.dims, string)
        cdc = (c.conj().T @ c).tocsr()
        liou = liou + (
            sp.kron(c.conj(), c)
            - 0.5 * sp.kron(ident, cdc)
            - 0.5 * sp.kron(cdc.T, ident)
        )
    return liou.tocsr()


def steady_state(liouvillian, dims):
    """Solve L rho = 0 with trace(rho) = 1 via a trace-replaced sparse LU."""
    total = math.prod(dims)
    n2 = total * total
    if liouvillian.shape != (n2, n2):
        raise DomainError("Liouvillian shape does not match dims")
    lhs = liouvillian.tolil(copy=True)
    trace_row = np.zeros(n2, dtype=complex)
    trace_row[:: total + 1] = 1.0
    lhs[0, :] = trace_row
    rhs = np.zeros(n2, dtype=complex)
    rhs[0] = 1.0
    try:
        lu = spla.splu(lhs.tocsc())
        vec = lu.solve(rhs)
    except RuntimeError as exc:  # singular factorisation
        raise SingularSystem(f"sparse LU failed: {exc}") from exc
    solve_residual = np.linalg.norm(lhs.tocsr() @ vec - rhs)
    if not np.isfinite(solve_residual) or solve_residual > 1e-8:
        raise SingularSystem(
            f"trace-replaced system residual {solve_residual:.2e}; "
            "Liouvillian kernel is not one-dimensional"
        )
    rho = vec.reshape((total, total), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    residual = np.linalg.norm(liouvillian @ rho.reshape(-1, order="F"))
    return SteadyDensityMatrix(dims=list(dims), rho=rho, residual_norm=float(residual))


def expectation(state, operator):
    """<O> = tr(rho O) for a sparse or dense operator."""
    if sp.issparse(operator):
        return complex(np.trace(operator @ state.rho))
    return complex(np.trace(state.rho @ operator))


def expectation_string(state, string):
    return expectation(state, ladder_string(state.dims, string))


def converged_solve(spec_builder, observables, start_dims, rel_change=1e-8,
                    dim_cap=DEFAULT_DIM_CAP, max_rounds=12):
    """Grow truncations by 50% until every observable stabilises.

    ``spec_builder(dims)`` must return a FockOperatorSpec at the requested
    truncation; ``observables`` maps name -> ladder string.
    """
    dims = list(start_dims)
    prev = None
    state = None
    for _ in range(max_rounds):
        spec = spec_builder(dims)
        state = steady_state(build_liouvillian(spec), dims)
        values = {
            name: expectation_string(state, string)
            for name, string in observables.items()
        }
        if prev is not None:
            worst = max(
                abs(values[k] - prev[k]) / max(abs(values[k]), 1e-14)
                for k in values
            )
            if worst < rel_change:
                return {
                    "values": values,
                    "dims_used": dims,
                    "truncation_converged": True,
                    "state": state,
                }
        prev = values
        grown = [max(d + 1, int(math.ceil(d * 1.5))) for d in dims]
        if math.prod(grown) > dim_cap:
            return {
                "values": prev,
                "dims_used": dims,
                "truncation_converged": False,
                "state": state,
            }
        dims = grown
    return {
        "values": prev,
        "dims_used": dims,
        "truncation_converged": False,
        "state": state,
    }


def reduced_rho(state, keep_mode):
    """Partial trace down to a single mode."""
    dims = state.dims
    rho = state.rho.reshape(dims + dims)
    axes = [i for i in range(len(dims)) if i != keep_mode]
    out = rho
    # trace highest axes first so indices stay valid
    for ax in sorted(axes, reverse=True):
        out = np.trace(out, axis1=ax, axis2=ax + out.ndim // 2)
    return out


def qfunction_from_rho(rho, grid):
    """Husimi Q(alpha) = <alpha|rho|alpha> / pi on a rectangular alpha grid.

    ``rho`` may be a SteadyDensityMatrix (single mode) or a plain matrix.
    Grid axes are Re(alpha), Im(alpha).
    """
    if isinstance(rho, SteadyDensityMatrix):
        if len(rho.dims) != 1:
            raise DomainError("qfunction_from_rho needs a single-mode state")
        mat = rho.rho
    else:
        mat = np.asarray(rho)
    dim = mat.shape[0]
    spec = grid if isinstance(grid, GridSpec) else GridSpec(*grid)
    xs, ys = spec.axes()
    xg, yg = np.meshgrid(xs, ys, indexing="ij")
    alphas = (xg + 1j * yg).ravel()
    n = np.arange(dim)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, dim)))))
    zero_rows = alphas == 0
    log_alpha = np.log(np.where(zero_rows, 1.0, alphas)[:, None] + 0j)
    amps = np.exp(-0.5 * np.abs(alphas[:, None]) ** 2 + n[None, :] * log_alpha
                  - 0.5 * log_fact[None, :])
    # alpha = 0 rows: only the n = 0 Fock amplitude contributes
    if np.any(zero_rows):
        amps[zero_rows] = 0.0
        amps[zero_rows, 0] = 1.0
    vals = np.einsum("ki,ij,kj->k", amps.conj(), mat, amps).real / np.pi
    values = vals.reshape((spec.nx, spec.ny))
    dx, dy = spec.cell()
    return QGrid(
        x_axis=xs,
        y_axis=ys,
        values=values,
        normalization_estimate=float(values.sum() * dx * dy),
    )
