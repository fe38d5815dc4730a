from conetorsion.defaults import defaults, thread_count
import pytest


def test_defaults_sections():
    assert defaults["torsion"]["tolerance"] > 0
    assert defaults["harmonic_tolerance"] < 1e-6


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("TORSIONCTL_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("TORSIONCTL_THREADS", "0")
    assert thread_count() == 1
    monkeypatch.setenv("TORSIONCTL_THREADS", "many")
    with pytest.raises(ValueError):
        thread_count()


def test_thread_count_default(monkeypatch):
    monkeypatch.delenv("TORSIONCTL_THREADS", raising=False)
    assert thread_count() == max(1, int(defaults["threads"]))
