import numpy as np
from numba import njit

# Dynamic separation objective over controls u1, u2 (length T each).
# Gap between agents at position index t (0..T) is d_t = sum_{k<t} (u1_k - u2_k).


@njit(cache=True, nogil=True)
def _gaps(u1, u2):
    T = u1.shape[0]
    d = np.zeros(T + 1)
    for t in range(1, T + 1):
        d[t] = d[t - 1] + (u1[t - 1] - u2[t - 1])
    return d


@njit(cache=True, nogil=True)
def dynamic_value(u1, u2, tau, gamma, rho):
    T = u1.shape[0]
    d = _gaps(u1, u2)
    effort = 0.0
    for k in range(T):
        effort += u1[k] * u1[k] + u2[k] * u2[k]
    prox = 0.0
    for t in range(T + 1):
        s = d[t] / rho
        prox += gamma * np.exp(-s * s)
    return tau * effort + prox


@njit(cache=True, nogil=True)
def dynamic_gradient(u1, u2, tau, gamma, rho):
    T = u1.shape[0]
    d = _gaps(u1, u2)
    inv = 1.0 / (rho * rho)
    out = np.empty(2 * T)
    # suffix[k] = sum_{t>k} g'(d_t)
    acc = 0.0
    for k in range(T - 1, -1, -1):
        t = k + 1
        acc += -2.0 * d[t] * inv * gamma * np.exp(-d[t] * d[t] * inv)
        out[k] = 2.0 * tau * u1[k] + acc
        out[T + k] = 2.0 * tau * u2[k] - acc
    return out


@njit(cache=True, nogil=True)
def dynamic_hessian(u1, u2, tau, gamma, rho):
    T = u1.shape[0]
    d = _gaps(u1, u2)
    inv = 1.0 / (rho * rho)
    # suffix[s] = sum_{t>=s} g''(d_t), s = 1..T
    suffix = np.zeros(T + 2)
    for t in range(T, 0, -1):
        e = gamma * np.exp(-d[t] * d[t] * inv)
        suffix[t] = suffix[t + 1] + (4.0 * d[t] * d[t] * inv * inv - 2.0 * inv) * e
    H = np.empty((2 * T, 2 * T))
    for j in range(T):
        for k in range(T):
            m = suffix[max(j, k) + 1]
            H[j, k] = m
            H[T + j, T + k] = m
            H[j, T + k] = -m
            H[T + j, k] = -m
        H[j, j] += 2.0 * tau
        H[T + j, T + j] += 2.0 * tau
    return H


@njit(cache=True, nogil=True)
def _cholesky_ok(M, shift):
    n = M.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        s = M[j, j] - shift
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if not s > 0.0:
            return False
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            s = M[i, j]
            for k in range(j):
                s -= L[i, k] * L[j, k]
            L[i, j] = s / L[j, j]
    return True


@njit(cache=True, nogil=True)
def subblock_pd_flags(H, indices, offsets, eps_rel):
    """PD flag for each principal submatrix ``H[idx, idx]``.

    Set ``i`` uses ``indices[offsets[i]:offsets[i + 1]]``.
    """
    m = offsets.shape[0] - 1
    flags = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        idx = indices[offsets[i]:offsets[i + 1]]
        k = idx.shape[0]
        sub = np.empty((k, k))
        dmax = 0.0
        for a in range(k):
            for b in range(k):
                sub[a, b] = H[idx[a], idx[b]]
            dmax = max(dmax, abs(sub[a, a]))
        flags[i] = _cholesky_ok(sub, eps_rel * (1.0 + dmax))
    return flags


@njit(cache=True, nogil=True)
def project_simplex(v):
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = 0.0
    theta = 0.0
    for k in range(n):
        css += u[k]
        t = (css - 1.0) / (k + 1)
        if u[k] - t > 0.0:
            theta = t
    out = np.empty(n)
    for i in range(n):
        out[i] = max(v[i] - theta, 0.0)
    return out


@njit(cache=True, nogil=True)
def pgd_simplex(fbar, c, q, p0, steps, step_size):
    p = project_simplex(p0)
    n = p.shape[0]
    y = np.empty(n)
    done = 0
    for it in range(steps):
        for i in range(n):
            y[i] = p[i] - step_size * (2.0 * c[i] * (p[i] - q[i]) + fbar[i])
        nxt = project_simplex(y)
        done = it + 1
        same = True
        for i in range(n):
            if nxt[i] != p[i]:
                same = False
                break
        p = nxt
        if same:
            break
    return p, done
