"""Independent reference computations used by the tests.

None of these share code with the package: statistics are recomputed in
two passes with exact summation, the EWMA is expanded in closed form, and
the neuron is integrated on a fine time grid.
"""

import math

import numpy as np


def two_pass(xs):
    n = len(xs)
    m = math.fsum(xs) / n
    if n < 2:
        return m, 0.0
    var = math.fsum((x - m) ** 2 for x in xs) / (n - 1)
    return m, math.sqrt(var)


def ewma_closed_form(xs, alpha):
    """Mean and variance after each step, from the unrolled recurrences.

    mean_n = (1-a)^(n-1) x_1 + sum_{j=2..n} a (1-a)^(n-j) x_j
    var_n  = sum_{j=2..n} (1-a)^(n-j+1) a (x_j - mean_{j-1})^2
    """
    xs = list(xs)
    means = []
    for n in range(1, len(xs) + 1):
        terms = [(1 - alpha) ** (n - 1) * xs[0]]
        terms += [alpha * (1 - alpha) ** (n - j) * xs[j - 1] for j in range(2, n + 1)]
        means.append(math.fsum(terms))
    variances = []
    for n in range(1, len(xs) + 1):
        terms = [(1 - alpha) ** (n - j + 1) * alpha * (xs[j - 1] - means[j - 2]) ** 2
                 for j in range(2, n + 1)]
        variances.append(math.fsum(terms))
    return means, variances


def stepped_lif(events, t_end, theta, tau, v_reset, dt=0.001):
    """Integrate a LIF neuron on a fixed grid.

    ``events`` holds (step_index, amplitude) pairs with integer step
    indices; each grid step first decays by exp(-dt/tau) then adds the
    inputs landing on that step. Returns (final potential, fired steps).
    """
    decay = math.exp(-dt / tau)
    by_step = {}
    for k, a in events:
        by_step.setdefault(k, []).append(a)
    v = 0.0
    fired = []
    n_steps = int(round(t_end / dt))
    for k in range(1, n_steps + 1):
        v *= decay
        for a in by_step.get(k, ()):
            v += a
            if v >= theta:
                v = v_reset
                fired.append(k)
    return v, fired


def stepped_lif_batch(event_steps, amplitudes, n_steps, theta, tau, v_reset, dt=0.001):
    """Vectorised :func:`stepped_lif` over many independent sequences.

    ``event_steps``/``amplitudes`` are (n_seq, n_events) arrays; events within
    a row must have distinct step indices and be sorted. Returns the
    potential just after each event, shape (n_seq, n_events), and a list of
    fired step indices per sequence.
    """
    n_seq, n_ev = event_steps.shape
    decay = math.exp(-dt / tau)
    inject = np.zeros((n_steps + 1, n_seq))
    has = np.zeros((n_steps + 1, n_seq), dtype=bool)
    rows = np.repeat(np.arange(n_seq), n_ev)
    inject[event_steps.ravel(), rows] = amplitudes.ravel()
    has[event_steps.ravel(), rows] = True
    slot = np.zeros((n_steps + 1, n_seq), dtype=np.int64)
    slot[event_steps.ravel(), rows] = np.tile(np.arange(n_ev), n_seq)
    trace = np.zeros((n_seq, n_ev))
    v = np.zeros(n_seq)
    fired = [[] for _ in range(n_seq)]
    for k in range(1, n_steps + 1):
        v *= decay
        if has[k].any():
            v = v + inject[k]
            over = has[k] & (v >= theta)
            if over.any():
                for s in np.flatnonzero(over):
                    fired[s].append(k)
                v[over] = v_reset
            idx = np.flatnonzero(has[k])
            trace[idx, slot[k, idx]] = v[idx]
    return trace, fired
