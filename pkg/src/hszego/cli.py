"""Command line interface.

Subcommands: ``kernel-table``, ``project``, ``verify``, ``make-packet``.
Exit codes: 0 ok, 1 verification failure, 2 usage/parse error, 3 budget
violation.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import forms, transform
from .phase import PhaseChoice, fio_quadrature, szego_kernel_scalar
from .phase import phase as phase_fn
from .config import RunConfig
from .core import BudgetError, FormField, HeisenbergPoint, MultiIndex, UsageError, norm
from .fieldio import read_form, write_form
from .verification import run_verification, report_text


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return RunConfig.from_path(path)


# ---------------------------------------------------------------------------
# kernel-table
# ---------------------------------------------------------------------------


def _point_headers(tag: str, n: int) -> list[str]:
    cols = []
    for j in range(1, n + 1):
        cols += [f"{tag}_re_z{j}", f"{tag}_im_z{j}"]
    cols.append(f"{tag}_last")
    return cols


def _point_cells(p: HeisenbergPoint) -> list[str]:
    cells = []
    for zj in p.z:
        cells += [f"{zj.real:.17g}", f"{zj.imag:.17g}"]
    cells.append(f"{p.x_last:.17g}")
    return cells


def cmd_kernel_table(cfg: RunConfig, out) -> int:
    sig = cfg.sig
    n = sig.n
    rng = np.random.default_rng(cfg.seed)
    header = (
        _point_headers("x", n)
        + _point_headers("y", n)
        + ["epsilon", "re_k", "im_k", "abs_k", "route", "abs_disagreement"]
    )
    rows = [",".join(header)]

    def emit(x, y, eps):
        closed = szego_kernel_scalar(x, y, sig, PhaseChoice.MINUS, eps)
        ph = phase_fn(PhaseChoice.MINUS, x, y, sig)
        t_max = 40.0 / (ph.imag + eps)
        quad = fio_quadrature(
            x, y, sig, PhaseChoice.MINUS, eps, t_max=t_max, t_points=600
        )
        gap = abs(closed - quad)
        base = _point_cells(x) + _point_cells(y) + [f"{eps:.17g}"]
        for val, route in ((closed, "closed-form"), (quad, "fio-quadrature")):
            rows.append(
                ",".join(
                    base
                    + [
                        f"{val.real:.17g}",
                        f"{val.imag:.17g}",
                        f"{abs(val):.17g}",
                        route,
                        f"{gap:.17g}",
                    ]
                )
            )

    for _ in range(cfg.kernel_table_count):
        z = tuple(
            complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)) for _ in range(n)
        )
        w = tuple(
            complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)) for _ in range(n)
        )
        x = HeisenbergPoint(z, rng.uniform(-2, 2))
        y = HeisenbergPoint(w, rng.uniform(-2, 2))
        emit(x, y, cfg.epsilon)
    diag = HeisenbergPoint(tuple(0.3 + 0.2j for _ in range(n)), 0.5)
    for eps in cfg.kernel_table_diag_eps:
        emit(diag, diag, eps)
    text = "\n".join(rows) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


# ---------------------------------------------------------------------------
# make-packet / project
# ---------------------------------------------------------------------------


def cmd_make_packet(cfg: RunConfig, which: str, out: str, fmt: str) -> int:
    sig = cfg.sig
    idxs = [int(tok) for tok in which.split(",") if tok.strip()]
    comps = {}
    q = None
    for k in idxs:
        if not 1 <= k <= len(cfg.packets):
            raise UsageError(f"packet index {k} out of range 1..{len(cfg.packets)}")
        spec = cfg.packets[k - 1]
        J = MultiIndex(spec.conjugated_axes)
        if q is None:
            q = J.q
        elif J.q != q:
            raise UsageError("selected packets belong to different degrees")
        if J in comps:
            raise UsageError(f"two selected packets share the component {J}")
        comps[J] = transform.make_wave_packet(spec, sig, cfg.grid)
    form = FormField(grid=cfg.grid, q=q or 0, components=comps)
    write_form(out, form, fmt=fmt, n=sig.n)
    return 0


def cmd_project(cfg: RunConfig, inp: str, out: str | None, fmt: str) -> int:
    form = read_form(inp)
    sig = cfg.sig
    if form.components and form.n != sig.n:
        raise UsageError(
            f"input field has n={form.n} but config lambdas have n={sig.n}"
        )
    reason = forms.vanishing_reason(form.q, sig)
    projected = forms.szego_project_form(form, sig)
    lines = ["# projection report"]
    if reason is not None:
        lines.append(f"# structural zero: {reason}")
    residuals = forms.cr_system_residual(projected, sig) if projected.components else {}
    gap_norm = 0.0
    if projected.components:
        twice = forms.szego_project_form(projected, sig)
        num = 0.0
        den = 0.0
        for J, compnt in projected.iter_components():
            dd = twice.components[J].values - compnt.values
            w = compnt.grid.full_weight_array(compnt.n)
            num += float(np.sum(np.abs(dd) ** 2 * w).real)
            den += norm(compnt) ** 2
        gap_norm = float(np.sqrt(num) / np.sqrt(den)) if den > 0 else 0.0
    seen = set(form.components) | set(projected.components)
    for J in sorted(seen):
        nin = norm(form.components[J]) if J in form.components else 0.0
        nout = norm(projected.components[J]) if J in projected.components else 0.0
        res = residuals.get(J, 0.0)
        change = "n/a"
        if nin > 0:
            dv = (
                projected.components[J].values - form.components[J].values
                if J in projected.components
                else -form.components[J].values
            )
            w = form.components[J].grid.full_weight_array(form.components[J].n)
            change = f"{float(np.sqrt(np.sum(np.abs(dv) ** 2 * w).real)) / nin:.6e}"
        lines.append(
            f"component {J}: norm_in={nin:.6e} norm_out={nout:.6e} "
            f"rel_change={change} cr_residual={res:.6e}"
        )
    lines.append(f"idempotency_gap = {gap_norm:.6e}")
    sys.stdout.write("\n".join(lines) + "\n")
    if out is not None:
        write_form(out, projected, fmt=fmt, n=sig.n)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig, out: str | None, jobs: int | None, criteria) -> int:
    include = None
    if criteria:
        include = [tok.strip() for tok in criteria.split(",") if tok.strip()]
    results = run_verification(cfg, include=include, jobs=jobs)
    if include is not None and not results:
        raise UsageError(f"no criteria matched {include}; known ids start with C00..C13")
    text = report_text(results, cfg)
    sys.stdout.write(text)
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hszego",
        description="Szego projections on the Heisenberg group: kernels, pipeline, verification",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    kt = sub.add_parser("kernel-table", help="tabulate the closed-form and FIO kernels")
    kt.add_argument("--config", default=None)
    kt.add_argument("--out", default=None)

    mp = sub.add_parser("make-packet", help="synthesize wave packets into a field file")
    mp.add_argument("--config", default=None)
    mp.add_argument("--packet", default="1", help="comma list of packet indices (1-based)")
    mp.add_argument("--out", required=True)
    mp.add_argument("--format", choices=("csv", "binary"), default="binary")

    pr = sub.add_parser("project", help="apply the degree-q projector to a field file")
    pr.add_argument("--config", default=None)
    pr.add_argument("--in", dest="inp", required=True)
    pr.add_argument("--out", default=None)
    pr.add_argument("--format", choices=("csv", "binary"), default="binary")
    pr.add_argument("--jobs", type=int, default=None)

    vf = sub.add_parser("verify", help="run the verification suite")
    vf.add_argument("--config", default=None)
    vf.add_argument("--out", default=None)
    vf.add_argument("--jobs", type=int, default=None)
    vf.add_argument("--criteria", default=None, help="comma list of criterion ids")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.command == "kernel-table":
            return cmd_kernel_table(cfg, args.out)
        if args.command == "make-packet":
            return cmd_make_packet(cfg, args.packet, args.out, args.format)
        if args.command == "project":
            return cmd_project(cfg, args.inp, args.out, args.format)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, args.jobs, args.criteria)
        raise UsageError(f"unknown command {args.command!r}")
    except BudgetError as exc:
        print(f"budget violation [{exc.budget_name}]: {exc}", file=sys.stderr)
        return 3
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
