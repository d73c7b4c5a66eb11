"""numba kernels for the polynomial reservoirs.

Convention: ``states[0] = r0`` and ``states[n + 1]`` is produced from
``states[n]`` with ``s[n]`` held, so ``states[n]`` pairs with sample n of the
training signal and depends on inputs before n only.
"""

import numba
import numpy as np

_JIT = dict(nopython=True, cache=True, fastmath=False)


@numba.jit(**_JIT)
def _field(A, W, p1, p2, p3, alpha, r, s):
    return alpha * (p1 * r + p2 * r * r + p3 * r * r * r + A @ r + W * s)


@numba.jit(**_JIT)
def _slope(p1, p2, p3, r):
    return p1 + 2.0 * p2 * r + 3.0 * p3 * r * r


@numba.jit(**_JIT)
def _exceeded(r, threshold):
    for i in range(r.shape[0]):
        v = r[i]
        if not np.isfinite(v) or abs(v) > threshold:
            return True
    return False


@numba.jit(**_JIT)
def ode_run(A, W, p1, p2, p3, alpha, dt, s, r0, threshold):
    """RK4 with zero-order hold on ``s``. Returns (states, n_valid)."""
    T = s.shape[0]
    M = r0.shape[0]
    states = np.empty((T, M))
    r = r0.copy()
    h = 0.5 * dt
    for n in range(T):
        if _exceeded(r, threshold):
            return states[:n], n
        states[n] = r
        sn = s[n]
        k1 = _field(A, W, p1, p2, p3, alpha, r, sn)
        k2 = _field(A, W, p1, p2, p3, alpha, r + h * k1, sn)
        k3 = _field(A, W, p1, p2, p3, alpha, r + h * k2, sn)
        k4 = _field(A, W, p1, p2, p3, alpha, r + dt * k3, sn)
        r = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return states, T


@numba.jit(**_JIT)
def map_run(A, W, p1, p2, p3, alpha, s, r0, threshold):
    T = s.shape[0]
    M = r0.shape[0]
    states = np.empty((T, M))
    r = r0.copy()
    for n in range(T):
        if _exceeded(r, threshold):
            return states[:n], n
        states[n] = r
        r = _field(A, W, p1, p2, p3, alpha, r, s[n])
    return states, T


@numba.jit(**_JIT)
def ode_stage_slopes(A, W, p1, p2, p3, alpha, dt, r, s):
    """Per-stage diagonal slopes d_k of the field Jacobian along one RK4 step."""
    M = r.shape[0]
    h = 0.5 * dt
    d = np.empty((4, M))
    d[0] = _slope(p1, p2, p3, r)
    k1 = _field(A, W, p1, p2, p3, alpha, r, s)
    r2 = r + h * k1
    d[1] = _slope(p1, p2, p3, r2)
    k2 = _field(A, W, p1, p2, p3, alpha, r2, s)
    r3 = r + h * k2
    d[2] = _slope(p1, p2, p3, r3)
    k3 = _field(A, W, p1, p2, p3, alpha, r3, s)
    r4 = r + dt * k3
    d[3] = _slope(p1, p2, p3, r4)
    return d


@numba.jit(**_JIT)
def _jv(A, alpha, d, V):
    # alpha * (diag(d) + A) @ V for V of shape (M, k)
    out = A @ V
    for i in range(V.shape[0]):
        for j in range(V.shape[1]):
            out[i, j] = alpha * (out[i, j] + d[i] * V[i, j])
    return out


@numba.jit(**_JIT)
def ode_tangent(A, alpha, dt, d, V):
    """Variational RK4 propagator applied to the columns of V."""
    h = 0.5 * dt
    K1 = _jv(A, alpha, d[0], V)
    K2 = _jv(A, alpha, d[1], V + h * K1)
    K3 = _jv(A, alpha, d[2], V + h * K2)
    K4 = _jv(A, alpha, d[3], V + dt * K3)
    return V + (dt / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)


@numba.jit(**_JIT)
def ode_tangent_adjoint(At, alpha, dt, d, U):
    """Transpose of ``ode_tangent`` (reverse sweep through the stages)."""
    h = 0.5 * dt
    bK1 = (dt / 6.0) * U
    bK2 = (dt / 3.0) * U
    bK3 = (dt / 3.0) * U
    bK4 = (dt / 6.0) * U
    out = U.copy()
    ba4 = _jv(At, alpha, d[3], bK4)
    out += ba4
    bK3 = bK3 + dt * ba4
    ba3 = _jv(At, alpha, d[2], bK3)
    out += ba3
    bK2 = bK2 + h * ba3
    ba2 = _jv(At, alpha, d[1], bK2)
    out += ba2
    bK1 = bK1 + h * ba2
    ba1 = _jv(At, alpha, d[0], bK1)
    out += ba1
    return out


@numba.jit(**_JIT)
def _jv1(A, alpha, d, v):
    out = A @ v
    for i in range(v.shape[0]):
        out[i] = alpha * (out[i] + d[i] * v[i])
    return out


@numba.jit(**_JIT)
def ode_tangent_vec(A, alpha, dt, d, v):
    h = 0.5 * dt
    k1 = _jv1(A, alpha, d[0], v)
    k2 = _jv1(A, alpha, d[1], v + h * k1)
    k3 = _jv1(A, alpha, d[2], v + h * k2)
    k4 = _jv1(A, alpha, d[3], v + dt * k3)
    return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@numba.jit(**_JIT)
def ode_tangent_adjoint_vec(At, alpha, dt, d, u):
    h = 0.5 * dt
    bk3 = (dt / 3.0) * u
    bk2 = (dt / 3.0) * u
    bk1 = (dt / 6.0) * u
    out = u.copy()
    ba4 = _jv1(At, alpha, d[3], (dt / 6.0) * u)
    out += ba4
    bk3 += dt * ba4
    ba3 = _jv1(At, alpha, d[2], bk3)
    out += ba3
    bk2 += h * ba3
    ba2 = _jv1(At, alpha, d[1], bk2)
    out += ba2
    bk1 += h * ba2
    out += _jv1(At, alpha, d[0], bk1)
    return out


@numba.jit(**_JIT)
def gram_schmidt(V):
    """Modified Gram-Schmidt on the columns of V. Returns (Q, norms)."""
    k = V.shape[1]
    Q = V.copy()
    norms = np.empty(k)
    for j in range(k):
        for i in range(j):
            proj = 0.0
            for m in range(Q.shape[0]):
                proj += Q[m, i] * Q[m, j]
            for m in range(Q.shape[0]):
                Q[m, j] -= proj * Q[m, i]
        nrm = 0.0
        for m in range(Q.shape[0]):
            nrm += Q[m, j] * Q[m, j]
        nrm = np.sqrt(nrm)
        norms[j] = nrm
        if nrm > 0.0:
            for m in range(Q.shape[0]):
                Q[m, j] /= nrm
    return Q, norms


@numba.jit(**_JIT)
def reservoir_lyapunov(A, p1, p2, p3, alpha, dt, is_ode, W, starts, s, Q0, skip, max_iter, tol):
    """Tangent-space sweep for a reservoir trajectory.

    Returns (log_sums, max_local, n_accum): accumulated log stretch factors of
    the k Gram-Schmidt vectors and the largest one-step log singular value,
    both over steps ``n >= skip``. ``max_local`` is in log units per step.
    """
    T = starts.shape[0]
    k = Q0.shape[1]
    At = np.ascontiguousarray(A.T)
    Q = Q0.copy()
    log_sums = np.zeros(k)
    max_local = -np.inf
    v = Q0[:, 0].copy()
    n_accum = 0
    for n in range(T):
        r = starts[n]
        if is_ode:
            d = ode_stage_slopes(A, W, p1, p2, p3, alpha, dt, r, s[n])
            V = ode_tangent(A, alpha, dt, d, Q)
        else:
            d1 = _slope(p1, p2, p3, r)
            V = _jv(A, alpha, d1, Q)
        Q, norms = gram_schmidt(V)
        if n < skip:
            continue
        n_accum += 1
        for j in range(k):
            log_sums[j] += np.log(norms[j])
        # power iteration on Phi^T Phi, warm-started from the previous step
        prev = -1.0
        sig = 0.0
        for _ in range(max_iter):
            if is_ode:
                w = ode_tangent_vec(A, alpha, dt, d, v)
                u = ode_tangent_adjoint_vec(At, alpha, dt, d, w)
            else:
                w = _jv1(A, alpha, d1, v)
                u = _jv1(At, alpha, d1, w)
            sig = np.sqrt(np.sum(w * w))
            un = np.sqrt(np.sum(u * u))
            if un == 0.0:
                break
            v = u / un
            if prev > 0.0 and abs(sig - prev) <= tol * sig:
                break
            prev = sig
        # one more forward product gives the Rayleigh value for the final v
        if is_ode:
            w = ode_tangent_vec(A, alpha, dt, d, v)
        else:
            w = _jv1(A, alpha, d1, v)
        sig = max(sig, np.sqrt(np.sum(w * w)))
        if sig > 0.0:
            loc = np.log(sig)
            if loc > max_local:
                max_local = loc
    return log_sums, max_local, n_accum
