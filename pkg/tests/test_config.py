import pytest

from hszego import UsageError
from hszego.config import RunConfig, parse_flat_config


def test_parse_flat_config_basics():
    text = """
    # a comment
    lambdas = 1.0, -2.0
    grid.spatial_points = 17   # trailing comment
    """
    flat = parse_flat_config(text)
    assert flat == {"lambdas": "1.0, -2.0", "grid.spatial_points": "17"}


def test_parse_rejects_malformed():
    with pytest.raises(UsageError):
        parse_flat_config("just a line without equals")
    with pytest.raises(UsageError):
        parse_flat_config("a = 1\na = 2")


def test_defaults_round():
    cfg = RunConfig()
    assert cfg.sig.lambdas == (1.0,)
    assert cfg.grid.spatial_points == 33
    assert cfg.grid2.spatial_points == 17
    assert len(cfg.packets) == 5
    assert cfg.tolerances["hardy_reproduction"] == 1e-3


def test_from_text_overrides():
    cfg = RunConfig.from_text(
        """
        lambdas = 2.0
        epsilon = 0.25
        seed = 7
        grid.spatial_points = 17
        grid.vertical_points = 64
        grid.vertical_radius = 8.0
        packet.1.alpha = 1
        packet.1.t_low = 1.2
        packet.1.t_high = 2.4
        tolerance.hardy_reproduction = 5e-3
        """
    )
    assert cfg.lambdas == (2.0,)
    assert cfg.epsilon == 0.25
    assert cfg.grid.spatial_points == 17
    assert cfg.grid.freq_points == 64
    assert len(cfg.packets) == 1
    assert cfg.packets[0].t_high == 2.4
    assert cfg.tolerances["hardy_reproduction"] == 5e-3


def test_unknown_keys_rejected():
    with pytest.raises(UsageError):
        RunConfig.from_text("grid.spatial_pionts = 17")
    with pytest.raises(UsageError):
        RunConfig.from_text("tolerance.nonsense = 1.0")


def test_canonical_text_deterministic():
    a = RunConfig().canonical_text()
    b = RunConfig().canonical_text()
    assert a == b
    assert "jobs" not in a  # worker count must not affect the report digest
