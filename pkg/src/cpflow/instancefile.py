"""Reading and writing the on-disk formats.

Instance documents are human-writable sectioned text::

    # ideal circle pattern instance
    [vertices]
    a b c d

    [edges]
    ab a b pi/2          # name endpoint endpoint angle

    [faces]
    f0 ab bc ca          # name followed by a cyclic walk of edge names

    [prescription]
    a 4.05306515313624   # vertex -> target total geodesic curvature

    [initial_k]          # optional start coordinates ([initial_r] for radii)
    a 0

Angles are plain radians or fractions of pi written as ``pi``, ``pi/2``,
``3pi/4``.  Numbers serialize with 17 significant digits, so parse ->
serialize -> parse is exact.  Trace files are tab-separated tables with a
``#``-prefixed header block; solution reports reuse the sectioned layout.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from typing import IO

import numpy as np

from . import geometry
from .curvature import evaluate
from .errors import ParseError
from .flow import FlowConfig, FlowTrace
from .surface import Prescription, SurfaceComplex, build_complex

SECTIONS = ("vertices", "edges", "faces", "prescription", "initial_k", "initial_r")

_PI_TOKEN = re.compile(r"^(\d+(?:\.\d+)?)?pi(?:/(\d+(?:\.\d+)?))?$")


def parse_angle(token: str) -> float:
    """A radian literal or a fraction of pi such as ``pi/2`` or ``3pi/4``."""
    m = _PI_TOKEN.match(token)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        if den == 0.0:
            raise ValueError("zero denominator in angle")
        return num * math.pi / den
    return float(token)


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class Instance:
    """A parsed instance document."""

    complex: SurfaceComplex
    prescription: Prescription | None
    initial_k: np.ndarray | None


def parse_instance(text: str) -> Instance:
    """Parse an instance document; raises ParseError with a line number."""
    section: str | None = None
    vertices: list[str] = []
    edges: list[tuple[str, str, float]] = []
    edge_names: list[str] = []
    faces: list[list[str]] = []
    face_names: list[str] = []
    prescription: dict[str, float] = {}
    initial: dict[str, float] = {}
    initial_kind: str | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", lineno)
            name = line[1:-1].strip().lower()
            if name not in SECTIONS:
                raise ParseError(f"unknown section [{name}]", lineno)
            if name in ("initial_k", "initial_r"):
                if initial_kind is not None and initial_kind != name:
                    raise ParseError("initial_k and initial_r are mutually exclusive", lineno)
                initial_kind = name
            section = name
            continue
        if section is None:
            raise ParseError("content before any section header", lineno)

        tokens = line.split()
        if section == "vertices":
            for name in tokens:
                if name in vertices:
                    raise ParseError(f"duplicate vertex name {name!r}", lineno)
                vertices.append(name)
        elif section == "edges":
            if len(tokens) != 4:
                raise ParseError("edge lines need: name endpoint endpoint angle", lineno)
            name, a, b, angle = tokens
            if name in edge_names:
                raise ParseError(f"duplicate edge name {name!r}", lineno)
            try:
                phi = parse_angle(angle)
            except ValueError:
                raise ParseError(f"bad angle {angle!r}", lineno) from None
            edge_names.append(name)
            edges.append((a, b, phi))
        elif section == "faces":
            if len(tokens) < 2:
                raise ParseError("face lines need: name followed by edge names", lineno)
            if tokens[0] in face_names:
                raise ParseError(f"duplicate face name {tokens[0]!r}", lineno)
            face_names.append(tokens[0])
            faces.append(tokens[1:])
        else:
            if len(tokens) != 2:
                raise ParseError(f"{section} lines need: vertex value", lineno)
            target = prescription if section == "prescription" else initial
            if tokens[0] in target:
                raise ParseError(f"duplicate entry for {tokens[0]!r}", lineno)
            try:
                target[tokens[0]] = float(tokens[1])
            except ValueError:
                raise ParseError(f"bad number {tokens[1]!r}", lineno) from None

    if not vertices:
        raise ParseError("no [vertices] section")
    try:
        complex = build_complex(vertices, edges, faces,
                                edge_names=edge_names, face_names=face_names)
    except Exception as exc:
        raise ParseError(str(exc)) from exc

    presc = None
    if prescription:
        unknown = set(prescription) - set(vertices)
        if unknown:
            raise ParseError(f"prescription names unknown vertex {sorted(unknown)[0]!r}")
        missing = set(vertices) - set(prescription)
        if missing:
            raise ParseError(f"prescription missing vertex {sorted(missing)[0]!r}")
        try:
            presc = Prescription(np.array([prescription[v] for v in vertices]))
        except Exception as exc:
            raise ParseError(str(exc)) from exc

    initial_k = None
    if initial:
        unknown = set(initial) - set(vertices)
        if unknown:
            raise ParseError(f"initial values name unknown vertex {sorted(unknown)[0]!r}")
        missing = set(vertices) - set(initial)
        if missing:
            raise ParseError(f"initial values missing vertex {sorted(missing)[0]!r}")
        vals = np.array([initial[v] for v in vertices])
        if initial_kind == "initial_r":
            try:
                initial_k = np.asarray(geometry.r_to_k(vals), dtype=float)
            except Exception as exc:
                raise ParseError(f"initial radii out of range: {exc}") from exc
        else:
            initial_k = vals

    return Instance(complex=complex, prescription=presc, initial_k=initial_k)


def serialize_instance(complex: SurfaceComplex,
                       prescription: Prescription | None = None,
                       initial_k: np.ndarray | None = None) -> str:
    """Canonical text form; numbers at 17 significant digits."""
    lines = ["[vertices]"]
    lines.extend(complex.vertex_names)
    lines.append("")
    lines.append("[edges]")
    for e, (v, w) in enumerate(complex.edges):
        lines.append(f"{complex.edge_names[e]} {complex.vertex_names[v]} "
                     f"{complex.vertex_names[w]} {fmt(complex.phi[e])}")
    lines.append("")
    lines.append("[faces]")
    for f, walk in enumerate(complex.faces):
        names = " ".join(complex.edge_names[e] for e in walk)
        lines.append(f"{complex.face_names[f]} {names}")
    if prescription is not None:
        lines.append("")
        lines.append("[prescription]")
        for v, name in enumerate(complex.vertex_names):
            lines.append(f"{name} {fmt(prescription.lhat[v])}")
    if initial_k is not None:
        lines.append("")
        lines.append("[initial_k]")
        for v, name in enumerate(complex.vertex_names):
            lines.append(f"{name} {fmt(initial_k[v])}")
    return "\n".join(lines) + "\n"


def instance_digest(complex: SurfaceComplex,
                    prescription: Prescription | None = None) -> str:
    text = serialize_instance(complex, prescription)
    return hashlib.sha256(text.encode()).hexdigest()


# ----------------------------------------------------------------------
# Trace and solution reports
# ----------------------------------------------------------------------

def write_trace(out: IO[str], trace: FlowTrace, complex: SurfaceComplex,
                prescription: Prescription, config: FlowConfig) -> None:
    """Tab-separated table, one row per accepted step, with a header block."""
    digest = instance_digest(complex, prescription)
    out.write("# cpflow trace v1\n")
    out.write(f"# instance sha256:{digest}\n")
    out.write(f"# method {config.method}\n")
    out.write(f"# integrator {config.integrator}\n")
    out.write(f"# step {fmt(config.step)}\n")
    out.write(f"# tol_curvature {fmt(config.tol_curvature)}\n")
    out.write(f"# tol_ode {fmt(config.tol_ode)}\n")
    out.write(f"# max_time {fmt(config.max_time)}\n")
    out.write(f"# divergence_k {fmt(config.divergence_k)}\n")
    out.write(f"# verdict {trace.verdict}\n")
    rate = "none" if trace.fitted_rate is None else fmt(trace.fitted_rate)
    out.write(f"# fitted_rate {rate}\n")
    if trace.certificate is not None:
        subset = ",".join(trace.certificate.subset_names(complex))
        out.write(f"# certificate_subset {subset}\n")
        out.write(f"# certificate_margin {fmt(trace.certificate.worst_margin)}\n")
    cols = ["t"] + [f"K[{name}]" for name in complex.vertex_names]
    cols += ["err_inf", "energy", "speed", "min_eig", "clamped"]
    out.write("# columns " + " ".join(cols) + "\n")
    for s in trace.samples:
        row = [fmt(s.t)] + [fmt(k) for k in s.K]
        row += [fmt(s.err_inf), fmt(s.energy), fmt(s.speed), fmt(s.min_eig),
                "1" if s.clamped else "0"]
        out.write("\t".join(row) + "\n")


def write_solution(out: IO[str], trace: FlowTrace, complex: SurfaceComplex,
                   prescription: Prescription) -> None:
    """Final pattern data: coordinates, radii, curvatures, cone angles."""
    state = evaluate(complex, trace.final_k())
    digest = instance_digest(complex, prescription)
    err = state.L - prescription.lhat
    out.write("# cpflow solution v1\n")
    out.write(f"# instance sha256:{digest}\n")
    out.write(f"# verdict {trace.verdict}\n")
    out.write(f"# final_energy {fmt(0.5 * float(np.dot(err, err)))}\n")
    rate = "none" if trace.fitted_rate is None else fmt(trace.fitted_rate)
    out.write(f"# fitted_rate {rate}\n")
    out.write("\n[vertices]\n")
    out.write("# name K r L cone_angle\n")
    for v, name in enumerate(complex.vertex_names):
        out.write(f"{name} {fmt(state.K[v])} {fmt(state.r[v])} "
                  f"{fmt(state.L[v])} {fmt(state.alpha_v[v])}\n")
    out.write("\n[faces]\n")
    out.write("# name cone_angle\n")
    for f, name in enumerate(complex.face_names):
        out.write(f"{name} {fmt(state.alpha_f[f])}\n")
