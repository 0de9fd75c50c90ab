import numpy as np
import pytest


def random_torsion(rng, n, batch=()):
    s = rng.normal(size=batch + (n, n, n))
    return 0.5 * (s - np.swapaxes(s, -1, -2))


def well_conditioned(rng, n, batch=()):
    return np.eye(n) + 0.3 * rng.normal(size=batch + (n, n))


def momentum_oracle(spec, s, initial_step=1e-3):
    """dL/dS^i_{jk} (j < k) by adaptive Richardson differentiation, per sample and component.

    Fixed-step differences lose accuracy when a det L = 0 branch point sits
    within ~1e-3 of the sample; the adaptive scheme controls its own error.
    """
    from scipy.differentiate import derivative

    from tetradlab.lagrangian import evaluate_model

    s = np.asarray(s, dtype=float)
    n = s.shape[-1]
    out = np.zeros_like(s)
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                bump = np.zeros((n, n, n))
                bump[i, j, k], bump[i, k, j] = 1.0, -1.0
                for p in np.ndindex(s.shape[:-3]):
                    s0 = s[p]
                    f = lambda t: evaluate_model(spec, s0 + np.asarray(t)[..., None, None, None] * bump).density
                    res = derivative(f, 0.0, initial_step=initial_step)
                    assert res.success
                    out[p + (i, j, k)] = 0.5 * res.df
                    out[p + (i, k, j)] = -0.5 * res.df
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(42)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
