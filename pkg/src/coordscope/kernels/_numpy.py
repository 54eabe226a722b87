import numpy as np


def _cumulative(T):
    # positions z_1..z_{T+1} from controls: z_t = sum_{k<t} u_k
    return np.tril(np.ones((T + 1, T)), -1)


def dynamic_value(u1, u2, tau, gamma, rho):
    d = _cumulative(u1.shape[0]) @ (u1 - u2)
    return float(tau * (u1 @ u1 + u2 @ u2) + np.sum(gamma * np.exp(-((d / rho) ** 2))))


def dynamic_gradient(u1, u2, tau, gamma, rho):
    A = _cumulative(u1.shape[0])
    d = A @ (u1 - u2)
    g1 = -2.0 * d / rho**2 * gamma * np.exp(-((d / rho) ** 2))
    v = A.T @ g1
    return np.concatenate([2.0 * tau * u1 + v, 2.0 * tau * u2 - v])


def dynamic_hessian(u1, u2, tau, gamma, rho):
    T = u1.shape[0]
    A = _cumulative(T)
    d = A @ (u1 - u2)
    g2 = (4.0 * d**2 / rho**4 - 2.0 / rho**2) * gamma * np.exp(-((d / rho) ** 2))
    M = A.T @ (g2[:, None] * A)
    eye = 2.0 * tau * np.eye(T)
    return np.block([[eye + M, -M], [-M, eye + M]])


def subblock_pd_flags(H, indices, offsets, eps_rel):
    flags = np.zeros(len(offsets) - 1, dtype=bool)
    for i in range(len(offsets) - 1):
        idx = indices[offsets[i]:offsets[i + 1]]
        if len(idx) == 0:
            flags[i] = True
            continue
        sub = H[np.ix_(idx, idx)]
        shift = eps_rel * (1.0 + np.max(np.abs(np.diag(sub))))
        try:
            np.linalg.cholesky(sub - shift * np.eye(len(idx)))
        except np.linalg.LinAlgError:
            continue
        flags[i] = True
    return flags


def project_simplex(v):
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def pgd_simplex(fbar, c, q, p0, steps, step_size):
    p = project_simplex(p0)
    done = 0
    for it in range(steps):
        nxt = project_simplex(p - step_size * (2.0 * c * (p - q) + fbar))
        done = it + 1
        if np.array_equal(nxt, p):
            p = nxt
            break
        p = nxt
    return p, done
