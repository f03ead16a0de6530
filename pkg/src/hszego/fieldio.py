"""Field file I/O.

A field file is a self-describing text header (flat ``key = value`` lines)
followed by the payload.  Binary payload: little-endian float64 (re, im)
pairs in C row-major order, component-major, bit-exact for fixtures.  CSV
payload: one ``component,flat_index,re,im`` row per value with %.17g floats
(lossless for float64), for small human-inspectable grids.
"""

from __future__ import annotations

import io

import numpy as np

from .core import FormField, GridSpec, MultiIndex, ScalarField, UsageError

__all__ = ["write_form", "read_form", "FORMAT_NAME"]

FORMAT_NAME = "hszego-field-v1"


def _encode_multiindex(J: MultiIndex) -> str:
    return "(" + ",".join(str(v) for v in J.entries) + ")"


def _decode_multiindex(text: str) -> MultiIndex:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise UsageError(f"bad multi-index {text!r}")
    inner = body[1:-1].strip()
    if not inner:
        return MultiIndex(())
    return MultiIndex(tuple(int(v) for v in inner.split(",")))


def _header_lines(form: FormField, n: int, payload: str) -> list[str]:
    g = form.grid
    keys = [J for J, _ in form.iter_components()]
    return [
        f"format = {FORMAT_NAME}",
        f"n = {n}",
        f"q = {form.q}",
        f"components = {';'.join(_encode_multiindex(J) for J in keys)}",
        f"grid.spatial_radius = {g.spatial_radius!r}",
        f"grid.spatial_points = {g.spatial_points}",
        f"grid.vertical_radius = {g.vertical_radius!r}",
        f"grid.vertical_points = {g.vertical_points}",
        f"grid.quadrature_rule = {g.quadrature_rule}",
        f"data = {payload}",
    ]


def write_form(path, form: FormField, fmt: str = "binary", n: int | None = None) -> None:
    """Write a FormField; ``n`` is required for empty (zero) forms."""
    if fmt not in ("binary", "csv"):
        raise UsageError("format must be 'binary' or 'csv'")
    if n is None:
        if not form.components:
            raise UsageError("writing an empty form requires the dimension n")
        n = form.n
    header = "\n".join(_header_lines(form, n, fmt)) + "\n"
    keys = [J for J, _ in form.iter_components()]
    if fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(header.encode("utf-8"))
            for J in keys:
                arr = np.ascontiguousarray(form.components[J].values, dtype="<c16")
                fh.write(arr.tobytes())
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        for ci, J in enumerate(keys):
            flat = form.components[J].values.reshape(-1)
            for idx in range(flat.size):
                v = flat[idx]
                fh.write(f"{ci},{idx},{v.real:.17g},{v.imag:.17g}\n")


def _parse_header(lines: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in lines:
        if "=" not in line:
            raise UsageError(f"malformed header line {line!r}")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def read_form(path) -> FormField:
    """Read a field file written by :func:`write_form`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    # header ends at the newline after the 'data = ...' line
    head_end = raw.find(b"data = ")
    if head_end < 0:
        raise UsageError("not a field file: missing 'data =' line")
    nl = raw.find(b"\n", head_end)
    header_text = raw[:nl].decode("utf-8")
    payload = raw[nl + 1 :]
    hdr = _parse_header(header_text.splitlines())
    if hdr.get("format") != FORMAT_NAME:
        raise UsageError(f"unsupported format {hdr.get('format')!r}")
    n = int(hdr["n"])
    q = int(hdr["q"])
    comp_field = hdr.get("components", "").strip()
    keys = (
        [_decode_multiindex(tok) for tok in comp_field.split(";") if tok.strip()]
        if comp_field
        else []
    )
    grid = GridSpec.make(
        spatial_radius=float(hdr["grid.spatial_radius"]),
        spatial_points=int(hdr["grid.spatial_points"]),
        vertical_radius=float(hdr["grid.vertical_radius"]),
        vertical_points=int(hdr["grid.vertical_points"]),
        quadrature_rule=hdr["grid.quadrature_rule"],
    )
    shape = grid.field_shape(n)
    count = int(np.prod(shape))
    comps: dict[MultiIndex, ScalarField] = {}
    mode = hdr["data"]
    if mode == "binary":
        need = count * 16 * len(keys)
        if len(payload) != need:
            raise UsageError(f"payload size {len(payload)} != expected {need}")
        for ci, J in enumerate(keys):
            arr = np.frombuffer(
                payload, dtype="<c16", count=count, offset=ci * count * 16
            ).astype(np.complex128)
            comps[J] = ScalarField(grid=grid, values=arr.reshape(shape))
    elif mode == "csv":
        arrays = [np.zeros(count, dtype=complex) for _ in keys]
        for line in io.StringIO(payload.decode("utf-8")):
            line = line.strip()
            if not line:
                continue
            ci_s, idx_s, re_s, im_s = line.split(",")
            arrays[int(ci_s)][int(idx_s)] = float(re_s) + 1j * float(im_s)
        for ci, J in enumerate(keys):
            comps[J] = ScalarField(grid=grid, values=arrays[ci].reshape(shape))
    else:
        raise UsageError(f"unknown payload mode {mode!r}")
    return FormField(grid=grid, q=q, components=comps)
