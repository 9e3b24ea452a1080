"""Shared oracles: random chain generators and trajectory samplers."""

import numpy as np
import pytest


def random_subgenerator(rng, n, scale=1.0):
    """Random valid sub-generator with strictly negative exit drift."""
    S = rng.uniform(0.0, scale, size=(n, n))
    np.fill_diagonal(S, 0.0)
    exit_rates = rng.uniform(0.05 * scale, scale, size=n)
    np.fill_diagonal(S, -(S.sum(axis=1) + exit_rates))
    return S


def random_phase_type(rng, n, scale=1.0):
    from aoidual import PhaseType

    S = random_subgenerator(rng, n, scale)
    sigma = rng.uniform(0.0, 1.0, size=n)
    sigma /= sigma.sum()
    return PhaseType(sigma, S)


def sample_absorption(chain, n, rng):
    """Monte-Carlo trajectories of an absorbing chain.

    Follows the embedded jump chain with exponential holding times.
    Returns (absorption_time, absorbing_column) arrays of length ``n``.
    """
    S, V = chain.S, chain.V
    n_states = S.shape[0]
    rates = -np.diag(S)
    jump = np.hstack([S - np.diag(np.diag(S)), V]) / rates[:, None]
    cum = np.cumsum(jump, axis=1)
    state = rng.choice(n_states, size=n, p=chain.init / chain.init.sum())
    time = np.zeros(n)
    col = np.full(n, -1)
    alive = np.arange(n)
    while alive.size:
        s = state[alive]
        time[alive] += rng.exponential(1.0 / rates[s])
        u = rng.random(alive.size)
        nxt = (u[:, None] > cum[s]).sum(axis=1)
        done = nxt >= n_states
        col[alive[done]] = nxt[done] - n_states
        state[alive[~done]] = nxt[~done]
        alive = alive[~done]
    return time, col


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250811)
