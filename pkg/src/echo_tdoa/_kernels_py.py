"""Pure numpy implementations of the hot kernels.

Mirrors the compiled ``_kernels`` extension function-for-function; used when
the extension is not built or ``ECHO_TDOA_PURE_PYTHON`` is set.
"""

import numpy as np

FLAT_PEAK_RTOL = 1e-12


def chirp_phase_value(u, f0, f1, Tc, amp):
    # u in [0, Tc]: A sin(2 pi (f0 + (f1 - f0) u / (2 Tc)) u)
    return amp * np.sin(2.0 * np.pi * (f0 + (f1 - f0) * u / (2.0 * Tc)) * u)


def train_window(t_start, fs, n, f0, f1, Tc, amp):
    """Samples of the periodic chirp train at t_start + k/fs, zero for t < 0."""
    t = t_start + np.arange(n, dtype=float) / fs
    q = t / Tc
    u = Tc * (q - np.floor(q))
    out = chirp_phase_value(u, f0, f1, Tc, amp)
    out[t < 0.0] = 0.0
    return out


def xcorr_direct(window, template):
    """c[k] = sum_n window[(n + k) mod L] * template[n], by direct summation."""
    w = np.asarray(window, dtype=float)
    tp = np.asarray(template, dtype=float)
    L = w.shape[0]
    ww = np.concatenate((w, w))
    out = np.empty(L)
    for k in range(L):
        out[k] = np.dot(ww[k:k + L], tp)
    return out


def parabolic_offset(c_prev, c_peak, c_next):
    denom = c_prev - 2.0 * c_peak + c_next
    if abs(denom) < FLAT_PEAK_RTOL * abs(c_peak) or denom == 0.0:
        return 0.0
    delta = 0.5 * (c_prev - c_next) / denom
    return min(0.5, max(-0.5, delta))


def peak_refine(c):
    """Index of the first maximum and its circular parabolic offset."""
    c = np.asarray(c, dtype=float)
    L = c.shape[0]
    k = int(np.argmax(c))
    delta = parabolic_offset(float(c[(k - 1) % L]), float(c[k]), float(c[(k + 1) % L]))
    return k, delta


def guided_peak_refine(c, env, half_width):
    """Carrier peak of ``c`` nearest the envelope maximum, with parabolic offset.

    The envelope argmax (first on ties) picks the pulse; the real correlation
    is then maximised over +-half_width samples around it (circularly).
    """
    c = np.asarray(c, dtype=float)
    L = c.shape[0]
    k_env = int(np.argmax(env))
    offsets = np.arange(-half_width, half_width + 1)
    idx = (k_env + offsets) % L
    k = int(idx[np.argmax(c[idx])])
    delta = parabolic_offset(float(c[(k - 1) % L]), float(c[k]), float(c[(k + 1) % L]))
    return k, delta
