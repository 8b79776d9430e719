# -*- coding: utf-8 -*-
"""
PURPOSE:
    Sparse linear systems: LDU storage as assembled by the finite-volume
    operators, conversion to CSR, matrix-vector products and the iterative
    solvers (Jacobi-preconditioned CG, BiCGStab, and CG preconditioned by an
    aggregation AMG V-cycle).

    Convergence is judged on the 2-norm of b - Ax against
    max(abs_tol, rel_tol * |b - A x0|). The normalized residual reported
    alongside follows the usual finite-volume convention:

        x_ref       = mean(x)
        norm_factor = sum|A x - A x_ref| + sum|b - A x_ref|
        residual    = sum|b - A x| / max(norm_factor, tiny)

CREATED BY:
    deskflame developers
"""

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from . import tools

SOLVER_KINDS = ('pcg', 'bicgstab', 'amg-pcg')
_TINY = np.finfo(float).tiny


class LduMatrix:
    """
    Square matrix stored as diagonal, upper and lower coefficient arrays.
    ``upper[f]`` is the coefficient of the neighbour in the owner's row and
    ``lower[f]`` the coefficient of the owner in the neighbour's row.

    Parameters
    ----------
    addressing : deskflame.mesh.FaceConnectivity
    diag : array_like
        One value per cell
    upper : array_like or None
        One value per internal face; zeros if None
    lower : array_like or None
        One value per internal face; a copy of upper if None
    """
    def __init__(self, addressing, diag, upper=None, lower=None):
        self._addressing = addressing
        self.diag = np.array(diag, dtype=float)
        n_faces = addressing.n_internal_faces
        self.upper = np.zeros(n_faces) if upper is None else \
            np.array(upper, dtype=float)
        self.lower = self.upper.copy() if lower is None else \
            np.array(lower, dtype=float)
        if self.upper.shape != (n_faces,) or self.lower.shape != (n_faces,):
            raise ValueError('Off-diagonal arrays need one entry per face')
        if self.diag.ndim != 1:
            raise ValueError('Diagonal must be one-dimensional')
        if n_faces and max(addressing.neighbor.max(),
                           addressing.owner.max()) >= len(self.diag):
            raise ValueError('Diagonal shorter than the addressing needs')

    @property
    def addressing(self):
        return self._addressing

    @property
    def n_cells(self):
        return len(self.diag)

    @property
    def symmetric(self):
        return np.array_equal(self.upper, self.lower)

    def copy(self):
        return LduMatrix(self._addressing, self.diag.copy(),
                         self.upper.copy(), self.lower.copy())

    def densify(self):
        dense = np.diag(self.diag)
        np.add.at(dense, (self._addressing.owner, self._addressing.neighbor),
                  self.upper)
        np.add.at(dense, (self._addressing.neighbor, self._addressing.owner),
                  self.lower)
        return dense


class CsrMatrix:
    """
    Compressed sparse row matrix with ascending column indices per row.
    """
    def __init__(self, row_ptr, col_idx, vals):
        self._row_ptr = np.array(row_ptr, dtype=np.int64)
        self._col_idx = np.array(col_idx, dtype=np.int64)
        self._vals = np.array(vals, dtype=float)
        if self._row_ptr[0] != 0 or np.any(np.diff(self._row_ptr) < 0):
            raise ValueError('row_ptr must start at 0 and be nondecreasing')
        if self._row_ptr[-1] != len(self._col_idx) or \
                len(self._col_idx) != len(self._vals):
            raise ValueError('row_ptr[-1] must equal the number of nonzeros')
        self._scipy = None

    @classmethod
    def from_scipy(cls, matrix):
        matrix = scipy.sparse.csr_matrix(matrix)
        matrix.sort_indices()
        return cls(matrix.indptr, matrix.indices, matrix.data)

    @property
    def row_ptr(self):
        return self._row_ptr

    @property
    def col_idx(self):
        return self._col_idx

    @property
    def vals(self):
        return self._vals

    @property
    def n_rows(self):
        return len(self._row_ptr) - 1

    @property
    def nnz(self):
        return len(self._vals)

    def to_scipy(self):
        if self._scipy is None:
            n = self.n_rows
            self._scipy = scipy.sparse.csr_matrix(
                (self._vals, self._col_idx, self._row_ptr), shape=(n, n)
            )
        return self._scipy

    def densify(self):
        return self.to_scipy().toarray()

    def diagonal(self):
        return self.to_scipy().diagonal()


class SolverControls:
    """
    Stopping criteria and solver choice for one equation.
    """
    def __init__(
            self,
            abs_tol=1e-10,
            rel_tol=0.0,
            max_iter=1000,
            solver_kind='pcg'
    ):
        if not abs_tol >= 0:
            raise ValueError('abs_tol must be >= 0')
        if not 0 <= rel_tol < 1:
            raise ValueError('rel_tol must be in [0, 1)')
        if int(max_iter) != max_iter or max_iter < 1:
            raise ValueError('max_iter must be an integer >= 1')
        if solver_kind not in SOLVER_KINDS:
            raise ValueError('Bad solver kind: {0}'.format(solver_kind))
        self._abs_tol = float(abs_tol)
        self._rel_tol = float(rel_tol)
        self._max_iter = int(max_iter)
        self._solver_kind = solver_kind

    @property
    def abs_tol(self):
        return self._abs_tol

    @abs_tol.setter
    def abs_tol(self, _):
        raise PermissionError('SolverControls are read-only')

    @property
    def rel_tol(self):
        return self._rel_tol

    @rel_tol.setter
    def rel_tol(self, _):
        raise PermissionError('SolverControls are read-only')

    @property
    def max_iter(self):
        return self._max_iter

    @max_iter.setter
    def max_iter(self, _):
        raise PermissionError('SolverControls are read-only')

    @property
    def solver_kind(self):
        return self._solver_kind

    @solver_kind.setter
    def solver_kind(self, _):
        raise PermissionError('SolverControls are read-only')

    def __eq__(self, other):
        return isinstance(other, SolverControls) and (
            (self.abs_tol, self.rel_tol, self.max_iter, self.solver_kind) ==
            (other.abs_tol, other.rel_tol, other.max_iter, other.solver_kind)
        )

    def __repr__(self):
        return ('SolverControls(abs_tol={0!r}, rel_tol={1!r}, '
                'max_iter={2!r}, solver_kind={3!r})').format(
            self.abs_tol, self.rel_tol, self.max_iter, self.solver_kind
        )


class SolverReport:
    """
    Outcome of one linear solve.
    """
    def __init__(
            self,
            solver,
            initial_residual,
            final_residual,
            iterations,
            converged,
            residual_history,
            normalized_residual=None
    ):
        self.solver = solver
        self.initial_residual = initial_residual
        self.final_residual = final_residual
        self.iterations = iterations
        self.converged = converged
        self.residual_history = residual_history
        self.normalized_residual = normalized_residual

    def __repr__(self):
        return ('SolverReport({0}: {1:.3e} -> {2:.3e} in {3} iterations, '
                'converged={4})').format(
            self.solver, self.initial_residual, self.final_residual,
            self.iterations, self.converged
        )


def ldu_to_csr(ldu):
    """
    Converts LDU storage to CSR. Entries are sorted by (row, column); faces
    that connect the same pair of cells twice are summed in face order.
    """
    n = ldu.n_cells
    conn = ldu.addressing
    n_faces = conn.n_internal_faces
    rows = np.concatenate([np.arange(n), conn.owner, conn.neighbor])
    cols = np.concatenate([np.arange(n), conn.neighbor, conn.owner])
    vals = np.concatenate([ldu.diag, ldu.upper, ldu.lower])
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if n_faces:
        new_entry = np.ones(len(rows), dtype=bool)
        new_entry[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        slot = np.cumsum(new_entry) - 1
        merged = np.zeros(int(new_entry.sum()))
        np.add.at(merged, slot, vals)
        rows, cols, vals = rows[new_entry], cols[new_entry], merged
    row_ptr = np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=n))])
    return CsrMatrix(row_ptr, cols, vals)


def spmv(matrix, x):
    """
    y = A x for a CsrMatrix (or an LduMatrix, converted on the fly).
    """
    if isinstance(matrix, LduMatrix):
        matrix = ldu_to_csr(matrix)
    x = np.asarray(x, dtype=float)
    if x.shape != (matrix.n_rows,):
        raise ValueError(
            'Vector length {0} does not match matrix size {1}'.format(
                x.shape, matrix.n_rows
            )
        )
    return matrix.to_scipy() @ x


def residual_norm(matrix, x, b):
    """
    Normalized residual sum|b - Ax| / norm_factor (see module docstring).
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    ax = spmv(matrix, x)
    ax_ref = spmv(matrix, np.full_like(x, np.mean(x)))
    norm_factor = np.sum(np.abs(ax - ax_ref)) + np.sum(np.abs(b - ax_ref))
    return float(np.sum(np.abs(b - ax)) / max(norm_factor, _TINY))


def _jacobi(matrix):
    diag = matrix.diagonal()
    if np.any(diag == 0):
        raise ValueError(
            'zero diagonal entry in row {0}'.format(
                int(np.flatnonzero(diag == 0)[0])
            )
        )
    inverse = 1.0 / diag
    return lambda r: inverse * r


def _start(matrix, b, x0, controls):
    b = np.asarray(b, dtype=float)
    if b.shape != (matrix.n_rows,):
        raise ValueError('Right-hand side does not match matrix size')
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    controls = controls or SolverControls()
    r = b - matrix.to_scipy() @ x
    r0 = float(np.linalg.norm(r))
    target = max(controls.abs_tol, controls.rel_tol * r0)
    return b, x, controls, r, r0, target


def _finish(name, matrix, b, x, r0, history, iterations, converged,
            controls, return_report):
    final = float(np.linalg.norm(b - matrix.to_scipy() @ x))
    if not converged:
        tools.warn(
            '{0} did not converge in {1} iterations '
            '(residual {2:.3e})'.format(name, iterations, final),
            tools.ConvergenceWarning,
            'linear_solver_not_converged'
        )
    if return_report:
        report = SolverReport(
            solver=name,
            initial_residual=r0,
            final_residual=final,
            iterations=iterations,
            converged=converged,
            residual_history=history,
            normalized_residual=residual_norm(matrix, x, b)
        )
        return x, final, iterations, report
    return x, final, iterations


def pcg_solve(
        matrix,
        b,
        x0=None,
        controls=None,
        preconditioner=None,
        callback=None,
        return_report=False,
        name='pcg'
):
    """
    Preconditioned conjugate gradients.

    Parameters
    ----------
    matrix : CsrMatrix
        Symmetric positive definite
    b : np.ndarray
    x0 : np.ndarray or None
        Initial guess, zeros if None
    controls : SolverControls or None
    preconditioner : callable or None
        r -> M^-1 r; Jacobi if None
    callback : callable or None
        Called with the current iterate after every iteration
    return_report : bool
        Also return a SolverReport

    Returns
    -------
    tuple
        (x, final residual 2-norm, iterations[, SolverReport])
    """
    b, x, controls, r, r0, target = _start(matrix, b, x0, controls)
    apply_m = preconditioner or _jacobi(matrix)
    a = matrix.to_scipy()
    history = [r0]
    iterations = 0
    converged = r0 <= target
    if not converged:
        z = apply_m(r)
        p = z.copy()
        rz = float(r @ z)
        while iterations < controls.max_iter:
            iterations += 1
            ap = a @ p
            pap = float(p @ ap)
            if not pap > 0:
                raise ValueError(
                    'PCG breakdown: p^T A p = {0:.3e}, matrix is not '
                    'positive definite'.format(pap)
                )
            alpha = rz / pap
            x += alpha * p
            r -= alpha * ap
            r_norm = float(np.linalg.norm(r))
            history.append(r_norm)
            if callback is not None:
                callback(x)
            if r_norm <= target:
                r = b - a @ x
                r_norm = float(np.linalg.norm(r))
                if r_norm <= target:
                    converged = True
                    break
                z = apply_m(r)
                p = z.copy()
                rz = float(r @ z)
                continue
            z = apply_m(r)
            rz_new = float(r @ z)
            p = z + (rz_new / rz) * p
            rz = rz_new
    return _finish(name, matrix, b, x, r0, history, iterations, converged,
                   controls, return_report)


def bicgstab_solve(
        matrix,
        b,
        x0=None,
        controls=None,
        callback=None,
        return_report=False
):
    """
    Jacobi-preconditioned BiCGStab for nonsymmetric systems. A vanishing
    rho, r_hat.v or omega ends the iteration and is reported as
    non-convergence.

    Returns
    -------
    tuple
        (x, final residual 2-norm, iterations[, SolverReport])
    """
    b, x, controls, r, r0, target = _start(matrix, b, x0, controls)
    apply_m = _jacobi(matrix)
    a = matrix.to_scipy()
    history = [r0]
    iterations = 0
    converged = r0 <= target
    r_hat = r.copy()
    rho_old = alpha = omega = 1.0
    p = np.zeros_like(b)
    v = np.zeros_like(b)
    while not converged and iterations < controls.max_iter:
        rho = float(r_hat @ r)
        if abs(rho) <= _TINY:
            tools.warn('BiCGStab rho breakdown', tools.ConvergenceWarning,
                       'bicgstab_breakdown')
            break
        iterations += 1
        if iterations == 1:
            p = r.copy()
        else:
            p = r + (rho / rho_old) * (alpha / omega) * (p - omega * v)
        p_hat = apply_m(p)
        v = a @ p_hat
        r_hat_v = float(r_hat @ v)
        if abs(r_hat_v) <= _TINY:
            tools.warn('BiCGStab r_hat.v breakdown', tools.ConvergenceWarning,
                       'bicgstab_breakdown')
            break
        alpha = rho / r_hat_v
        s = r - alpha * v
        s_norm = float(np.linalg.norm(s))
        if s_norm <= target:
            x += alpha * p_hat
            r = s
            history.append(s_norm)
            converged = True
            break
        s_hat = apply_m(s)
        t = a @ s_hat
        tt = float(t @ t)
        omega = float(t @ s) / tt if tt > 0 else 0.0
        x += alpha * p_hat + omega * s_hat
        r = s - omega * t
        r_norm = float(np.linalg.norm(r))
        history.append(r_norm)
        if callback is not None:
            callback(x)
        if r_norm <= target:
            converged = True
            break
        if omega == 0.0:
            tools.warn('BiCGStab omega breakdown', tools.ConvergenceWarning,
                       'bicgstab_breakdown')
            break
        rho_old = rho
    if converged:
        converged = float(np.linalg.norm(b - a @ x)) <= target * (1 + 1e-12)
    return _finish('bicgstab', matrix, b, x, r0, history, iterations,
                   converged, controls, return_report)


class AmgLevel:
    def __init__(self, matrix, prolongation=None):
        self.matrix = matrix
        self.prolongation = prolongation
        self.lower = scipy.sparse.tril(matrix, format='csr')
        self.upper = scipy.sparse.triu(matrix, format='csr')

    @property
    def size(self):
        return self.matrix.shape[0]


class AmgHierarchy:
    """
    Levels from fine to coarse; the last level is solved directly.
    """
    def __init__(self, levels, coarse_solver):
        self.levels = levels
        self._coarse_solver = coarse_solver

    @property
    def sizes(self):
        return [level.size for level in self.levels]

    def coarse_solve(self, b):
        return self._coarse_solver(b)


def _pairwise_aggregates(matrix):
    """
    Greedy pairing: each unaggregated row, in ascending order, joins its
    strongest unaggregated neighbour (largest -a_ij * sign(a_ii), first
    column on ties), or stays alone.
    """
    n = matrix.shape[0]
    indptr, indices, data = matrix.indptr, matrix.indices, matrix.data
    diag_sign = np.sign(matrix.diagonal())
    aggregate = np.full(n, -1, dtype=np.int64)
    count = 0
    for i in range(n):
        if aggregate[i] >= 0:
            continue
        aggregate[i] = count
        cols = indices[indptr[i]:indptr[i + 1]]
        strength = -data[indptr[i]:indptr[i + 1]] * diag_sign[i]
        mask = (cols != i) & (aggregate[cols] < 0) & (strength > 0)
        if np.any(mask):
            candidates = np.flatnonzero(mask)
            best = candidates[np.argmax(strength[candidates])]
            aggregate[cols[best]] = count
        count += 1
    return aggregate, count


def amg_setup(matrix, max_coarse=16, max_levels=30):
    """
    Builds an aggregation hierarchy with piecewise-constant prolongation
    and Galerkin coarse operators P^T A P.

    Parameters
    ----------
    matrix : CsrMatrix
    max_coarse : int
        Coarsening stops once a level has at most this many unknowns
    max_levels : int

    Returns
    -------
    AmgHierarchy
    """
    a = matrix.to_scipy().tocsr()
    a.sort_indices()
    row_has_entry = np.diff(a.indptr) > 0
    row_max = np.zeros(a.shape[0])
    if a.nnz:
        row_max[row_has_entry] = np.maximum.reduceat(
            np.abs(a.data), a.indptr[:-1][row_has_entry]
        )
    if np.any(row_max == 0):
        raise ValueError(
            'AMG setup failure: zero row {0}'.format(
                int(np.flatnonzero(row_max == 0)[0])
            )
        )
    levels = []
    while a.shape[0] > max_coarse and len(levels) < max_levels - 1:
        aggregate, n_coarse = _pairwise_aggregates(a)
        if n_coarse >= a.shape[0]:
            break
        n = a.shape[0]
        p = scipy.sparse.csr_matrix(
            (np.ones(n), (np.arange(n), aggregate)), shape=(n, n_coarse)
        )
        levels.append(AmgLevel(a, p))
        a = (p.T @ a @ p).tocsr()
        a.sort_indices()
    levels.append(AmgLevel(a))
    if a.shape[0] <= max_coarse:
        factors = scipy.linalg.lu_factor(a.toarray())
        coarse_solver = lambda rhs: scipy.linalg.lu_solve(factors, rhs)
    else:
        coarse_solver = scipy.sparse.linalg.splu(a.tocsc()).solve
    return AmgHierarchy(levels, coarse_solver)


def _smooth(level, b, x, forward):
    residual = b - level.matrix @ x
    triangle = level.lower if forward else level.upper
    return x + scipy.sparse.linalg.spsolve_triangular(
        triangle, residual, lower=forward
    )


def amg_vcycle(hierarchy, b, x=None, level_index=0):
    """
    One V-cycle: forward Gauss-Seidel pre-sweep, coarse-grid correction,
    backward Gauss-Seidel post-sweep, direct solve on the coarsest level.
    """
    b = np.asarray(b, dtype=float)
    x = np.zeros_like(b) if x is None else np.array(x, dtype=float)
    level = hierarchy.levels[level_index]
    if level_index == len(hierarchy.levels) - 1:
        return hierarchy.coarse_solve(b)
    x = _smooth(level, b, x, forward=True)
    coarse_rhs = level.prolongation.T @ (b - level.matrix @ x)
    correction = amg_vcycle(hierarchy, coarse_rhs, None, level_index + 1)
    x = x + level.prolongation @ correction
    return _smooth(level, b, x, forward=False)


def amg_pcg_solve(
        matrix,
        b,
        x0=None,
        controls=None,
        hierarchy=None,
        callback=None,
        return_report=False
):
    """
    CG preconditioned by one AMG V-cycle per application.
    """
    hierarchy = hierarchy or amg_setup(matrix)
    return pcg_solve(
        matrix, b, x0, controls,
        preconditioner=lambda r: amg_vcycle(hierarchy, r),
        callback=callback,
        return_report=return_report,
        name='amg-pcg'
    )


def solve(matrix, b, x0=None, controls=None, return_report=False):
    """
    Dispatches on ``controls.solver_kind``.
    """
    controls = controls or SolverControls()
    solver = {
        'pcg': pcg_solve,
        'bicgstab': bicgstab_solve,
        'amg-pcg': amg_pcg_solve,
    }[controls.solver_kind]
    return solver(matrix, b, x0, controls, return_report=return_report)
