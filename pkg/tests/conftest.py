"""Shared fixtures for the hypchroma test suite."""

import pytest

from hypchroma.config import reset_settings


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Fresh settings per test, with results written under tmp_path."""
    for name in ("HYPCHROMA_VERTEX_CAP", "HYPCHROMA_BUDGET", "HYPCHROMA_JOBS", "HYPCHROMA_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("HYPCHROMA_RESULTS_DIR", str(tmp_path / "results"))
    reset_settings()
    yield
    reset_settings()


def brute_force_chromatic(n, edges):
    """Chromatic number by exhaustive restricted-growth-string search."""
    if n == 0:
        return 0
    earlier = [[] for _ in range(n)]
    for u, v in edges:
        a, b = min(u, v), max(u, v)
        earlier[b].append(a)

    def colorable(k):
        colors = [-1] * n

        def place(v, used):
            if v == n:
                return True
            for c in range(min(k, used + 1)):
                if all(colors[u] != c for u in earlier[v]):
                    colors[v] = c
                    if place(v + 1, max(used, c + 1)):
                        return True
            colors[v] = -1
            return False

        return place(0, 0)

    return next(k for k in range(1, n + 1) if colorable(k))
