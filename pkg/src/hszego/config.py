"""Run configuration: a flat ``key = value`` text format with dotted sections.

Every key, default, and unit is documented in the README.  Unknown keys are
rejected so typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import GridSpec, LambdaSignature, UsageError
from .transform import WavePacketSpec

__all__ = ["RunConfig", "parse_flat_config", "DEFAULT_TOLERANCES"]

#: acceptance budgets; ``>=`` comparators mean larger measured values pass
DEFAULT_TOLERANCES: dict[str, float] = {
    "gamma_moment": 1e-9,
    "kernel_fio_agreement": 1e-6,
    "phase_identity": 1e-12,
    "gaussian_reproducing": 1e-6,
    "slice_reproduction": 1e-4,
    "slice_annihilation": 1e-4,
    "slice_contraction": 1e-6,
    "slice_idempotency": 2e-4,
    "parseval": 1e-8,
    "hardy_reproduction": 1e-3,
    "negative_frequency": 1e-3,
    "idempotency": 2e-3,
    "self_adjointness": 1e-3,
    "pairing_route": 1e-4,
    "direct_route": 5e-3,
    "form_reproduction": 1e-3,
    "witness_ratio": 1e3,
    "finite_match": 1e-6,
    "residual_order": 3.5,
    "noise_margin": 1e3,
    "wrap_share": 1e-8,
}


def parse_flat_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment; blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if not key:
            raise UsageError(f"config line {lineno}: empty key")
        if key in out:
            raise UsageError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = val.strip()
    return out


def _floats(text: str) -> tuple[float, ...]:
    items = [tok for tok in text.split(",") if tok.strip()]
    return tuple(float(tok) for tok in items)


def _ints(text: str) -> tuple[int, ...]:
    items = [tok for tok in text.split(",") if tok.strip()]
    return tuple(int(tok) for tok in items)


def _default_packets() -> tuple[WavePacketSpec, ...]:
    # order-6 envelopes of width >= 2.2 keep the periodic wrap-around of the
    # synthesized packets far below the wrap budget on the default vertical box
    return (
        WavePacketSpec(alpha=(0,), t_low=1.0, t_high=3.2, order=6),
        WavePacketSpec(alpha=(1,), t_low=1.0, t_high=3.2, order=6),
        WavePacketSpec(alpha=(2,), t_low=1.0, t_high=4.0, order=6),
        WavePacketSpec(alpha=(0,), t_low=2.0, t_high=4.2, order=6),
        WavePacketSpec(alpha=(1,), t_low=2.0, t_high=4.6, order=6),
    )


@dataclass
class RunConfig:
    """Everything a verification or CLI run needs, with desk-scale defaults."""

    lambdas: tuple[float, ...] = (1.0,)
    epsilon: float = 0.5
    seed: int = 20260808
    jobs: int = 0  # 0 = one worker per available core
    grid: GridSpec = field(default_factory=lambda: GridSpec.make(4.0, 33, 16.0, 128))
    grid2: GridSpec = field(default_factory=lambda: GridSpec.make(3.5, 17, 30.0, 128))
    packets: tuple[WavePacketSpec, ...] = field(default_factory=_default_packets)
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    kernel_table_count: int = 8
    kernel_table_diag_eps: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0)
    project_q: int = 0

    def __post_init__(self):
        for name, value in self.tolerances.items():
            if value <= 0:
                raise UsageError(f"tolerance {name} must be strictly positive")
        if self.epsilon <= 0:
            raise UsageError("epsilon must be > 0")
        if self.jobs < 0:
            raise UsageError("jobs must be >= 0")

    @property
    def sig(self) -> LambdaSignature:
        return LambdaSignature(self.lambdas)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls.from_mapping(parse_flat_config(text))

    @classmethod
    def from_path(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @classmethod
    def from_mapping(cls, flat: dict[str, str]) -> "RunConfig":
        flat = dict(flat)
        kwargs = {}

        def pop(key, conv, default=None):
            if key in flat:
                return conv(flat.pop(key))
            return default

        kwargs["lambdas"] = pop("lambdas", _floats, (1.0,))
        kwargs["epsilon"] = pop("epsilon", float, 0.5)
        kwargs["seed"] = pop("seed", int, 20260808)
        kwargs["jobs"] = pop("jobs", int, 0)
        kwargs["kernel_table_count"] = pop("kernel_table.count", int, 8)
        kwargs["kernel_table_diag_eps"] = pop(
            "kernel_table.diag_eps", _floats, (0.25, 0.5, 1.0, 2.0)
        )
        kwargs["project_q"] = pop("project.q", int, 0)

        def grid_from(prefix: str, defaults: tuple) -> GridSpec:
            return GridSpec.make(
                spatial_radius=pop(f"{prefix}.spatial_radius", float, defaults[0]),
                spatial_points=pop(f"{prefix}.spatial_points", int, defaults[1]),
                vertical_radius=pop(f"{prefix}.vertical_radius", float, defaults[2]),
                vertical_points=pop(f"{prefix}.vertical_points", int, defaults[3]),
                quadrature_rule=pop(f"{prefix}.quadrature_rule", str, defaults[4]),
            )

        kwargs["grid"] = grid_from("grid", (4.0, 33, 16.0, 128, "uniform-trapezoid"))
        kwargs["grid2"] = grid_from("grid2", (3.5, 17, 30.0, 128, "uniform-trapezoid"))

        packet_ids = sorted(
            {key.split(".")[1] for key in flat if key.startswith("packet.")}
        )
        packets = []
        for pid in packet_ids:
            prefix = f"packet.{pid}"
            packets.append(
                WavePacketSpec(
                    alpha=pop(f"{prefix}.alpha", _ints, (0,)),
                    t_low=pop(f"{prefix}.t_low", float, 1.0),
                    t_high=pop(f"{prefix}.t_high", float, 2.5),
                    conjugated_axes=pop(f"{prefix}.conjugated_axes", _ints, ()),
                    order=pop(f"{prefix}.order", int, 4),
                    vertical_sign=pop(f"{prefix}.vertical_sign", int, 1),
                )
            )
        kwargs["packets"] = tuple(packets) if packets else _default_packets()

        tolerances = dict(DEFAULT_TOLERANCES)
        for key in [k for k in flat if k.startswith("tolerance.")]:
            name = key.split(".", 1)[1]
            if name not in tolerances:
                raise UsageError(f"unknown tolerance {name!r}")
            tolerances[name] = float(flat.pop(key))
        kwargs["tolerances"] = tolerances

        if flat:
            raise UsageError(f"unknown config keys: {sorted(flat)}")
        return cls(**kwargs)

    def canonical_text(self) -> str:
        """Deterministic serialization (used for the report's config digest)."""
        lines = [
            f"lambdas = {','.join(repr(v) for v in self.lambdas)}",
            f"epsilon = {self.epsilon!r}",
            f"seed = {self.seed}",
            f"kernel_table.count = {self.kernel_table_count}",
            f"kernel_table.diag_eps = {','.join(repr(v) for v in self.kernel_table_diag_eps)}",
            f"project.q = {self.project_q}",
        ]
        for prefix, g in (("grid", self.grid), ("grid2", self.grid2)):
            lines += [
                f"{prefix}.spatial_radius = {g.spatial_radius!r}",
                f"{prefix}.spatial_points = {g.spatial_points}",
                f"{prefix}.vertical_radius = {g.vertical_radius!r}",
                f"{prefix}.vertical_points = {g.vertical_points}",
                f"{prefix}.quadrature_rule = {g.quadrature_rule}",
            ]
        for i, p in enumerate(self.packets, start=1):
            lines += [
                f"packet.{i}.alpha = {','.join(str(a) for a in p.alpha)}",
                f"packet.{i}.t_low = {p.t_low!r}",
                f"packet.{i}.t_high = {p.t_high!r}",
                f"packet.{i}.conjugated_axes = {','.join(str(a) for a in p.conjugated_axes)}",
                f"packet.{i}.order = {p.order}",
                f"packet.{i}.vertical_sign = {p.vertical_sign}",
            ]
        for name in sorted(self.tolerances):
            lines.append(f"tolerance.{name} = {self.tolerances[name]!r}")
        return "\n".join(lines) + "\n"
