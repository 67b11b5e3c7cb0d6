import pytest

from bettimatch.config import EngineConfig

FLAGS = (
    "emergent_pairs",
    "clearing",
    "comparison_clearing",
    "joint_unionfind",
    "cache_as_list",
    "partition_sort",
    "parallel",
)


def test_defaults_are_all_on():
    cfg = EngineConfig()
    assert all(getattr(cfg, f) for f in FLAGS)
    assert cfg.threads is None


def test_all_off_disables_every_flag():
    cfg = EngineConfig.all_off()
    assert not any(getattr(cfg, f) for f in FLAGS)


def test_with_flags_returns_a_modified_copy():
    base = EngineConfig()
    off = base.with_flags(clearing=False, threads=3)
    assert base.clearing and base.threads is None
    assert not off.clearing and off.threads == 3
    with pytest.raises(TypeError):
        base.with_flags(not_a_flag=True)


def test_resolved_threads_precedence(monkeypatch):
    monkeypatch.delenv("BETTI_THREADS", raising=False)
    assert EngineConfig().resolved_threads() == 5
    assert EngineConfig(threads=2).resolved_threads() == 2
    monkeypatch.setenv("BETTI_THREADS", "7")
    assert EngineConfig().resolved_threads() == 7
    assert EngineConfig(threads=2).resolved_threads() == 2  # explicit wins
