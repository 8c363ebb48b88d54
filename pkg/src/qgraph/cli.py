"""Command line front end.

Subcommands:

    spectrum    eigenvalues with nodal bookkeeping -> spectrum.csv
    scan        partition energy over the angle torus -> lambda_scan.csv
    verify      Morse index vs nodal deficiency -> morse_report.csv
    interlace   eigenvalue interlacing suites under vertex surgery
    histogram   nodal deficiency counts -> deficiency_hist.csv

All outputs are deterministic: identical input and options give
byte-identical files.  Exit codes: 0 success, 1 verification failure,
2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BracketFailure,
    ConsistencyError,
    DegenerateEigenvalue,
    ImproperEigenfunction,
    NoConvergence,
    OutsideDomain,
    ParseError,
    QGraphError,
    UnsupportedBeta,
)
from .graph import VertexCondition, betti, choose_sections, glue
from .io import load_graph
from .morse import deficiency_histogram, verify_theorem
from .partition import minimal_m, phi_map
from .spectral import (
    eigenfunction,
    eigenvalues,
    is_proper,
    nodal_counts,
    weyl_audit,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3


@dataclass
class RunConfig:
    """Validated options shared by the subcommands."""

    path: Path
    command: str
    out: Path
    fmt: str
    count: int = 20
    n_from: int = 1
    n_to: int = 12
    m: int | None = None
    grid: int = 64
    line: int | None = None
    tol_root: float = 1e-12
    tol_grad: float = 1e-8
    fd_step: float = 1e-4

    def __post_init__(self):
        for name in ("tol_root", "tol_grad", "fd_step"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.n_from < 1 or self.n_to < self.n_from:
            raise ValueError("need 1 <= n-from <= n-to")
        if self.count < 1:
            raise ValueError("--count must be at least 1")
        if self.grid < 2:
            raise ValueError("--grid must be at least 2")


def _fmt_float(x) -> str:
    return "%.17g" % float(x)


def _open_writer(cfg: RunConfig, stem: str):
    ext = "csv" if cfg.fmt == "csv" else "tsv"
    delim = "," if cfg.fmt == "csv" else "\t"
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / f"{stem}.{ext}"
    fh = open(path, "w", newline="")
    return fh, csv.writer(fh, delimiter=delim, lineterminator="\n"), path


# -- spectrum ------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> int:
    g = load_graph(cfg.path)
    pairs = eigenvalues(g, count=cfg.count, tolerance=cfg.tol_root)
    fh, w, path = _open_writer(cfg, "spectrum")
    with fh:
        w.writerow(
            ["n", "k", "lambda", "multiplicity", "proper", "mu", "nu", "deficiency"]
        )
        for pair in pairs:
            signed_k = math.copysign(pair.k, pair.lam) if pair.lam != 0 else 0.0
            mu = nu = d = ""
            proper = 0
            if pair.simple:
                f = eigenfunction(g, pair)
                if is_proper(g, f):
                    proper = 1
                    mu, nu = nodal_counts(g, f)
                    d = pair.n - nu
            w.writerow(
                [
                    pair.n,
                    _fmt_float(signed_k),
                    _fmt_float(pair.lam),
                    pair.multiplicity,
                    proper,
                    mu,
                    nu,
                    d,
                ]
            )
    audit = weyl_audit(g, pairs)
    print(
        f"weyl audit: {audit.found} positive eigenvalues found, "
        f"asymptotic count {audit.expected:.2f}, slack {audit.slack}: "
        f"{'ok' if audit.ok else 'DEFICIT'}",
        file=sys.stderr,
    )
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK if audit.ok else EXIT_NUMERIC


# -- scan ----------------------------------------------------------------------


def _grid_angles(resolution: int) -> list[float]:
    return [
        -math.pi + 2.0 * math.pi * (i + 1) / resolution
        for i in range(resolution)
    ]


def cmd_scan(cfg: RunConfig) -> int:
    g = load_graph(cfg.path)
    beta = betti(g)
    if beta == 0:
        raise UnsupportedBeta("scan needs at least one cycle")
    sections = choose_sections(g)
    m = cfg.m if cfg.m is not None else minimal_m(g) + 1
    print(f"scanning with m = {m}, beta = {beta}", file=sys.stderr)
    angles = _grid_angles(cfg.grid)
    if cfg.line is not None:
        if not 1 <= cfg.line <= beta:
            raise ValueError(f"--line must be in 1..{beta}")
        points = [
            tuple(a if j == cfg.line - 1 else 0.0 for j in range(beta))
            for a in angles
        ]
    elif beta == 1:
        points = [(a,) for a in angles]
    elif beta == 2:
        points = [(a1, a2) for a1 in angles for a2 in angles]
    else:
        raise UnsupportedBeta(
            f"grid scan needs beta <= 2 (got {beta}); use --line"
        )
    fh, w, path = _open_writer(cfg, "lambda_scan")
    with fh:
        w.writerow([f"phi{j + 1}" for j in range(beta)] + ["lambda", "in_domain"])
        for phi in points:
            try:
                rec = phi_map(g, sections, phi, m)
                lam, dom = _fmt_float(rec.lam), 1
            except OutsideDomain:
                lam, dom = "", 0
            w.writerow([_fmt_float(a) for a in phi] + [lam, dom])
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


# -- verify --------------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> int:
    g = load_graph(cfg.path)
    rows = []
    n_pass = n_fail = n_withheld = n_skipped = 0
    pairs = eigenvalues(g, count=cfg.n_to, tolerance=cfg.tol_root)
    for n in range(cfg.n_from, cfg.n_to + 1):
        try:
            rep = verify_theorem(
                g, n, grad_tol=cfg.tol_grad, fd_step=cfg.fd_step
            )
        except ImproperEigenfunction:
            n_skipped += 1
            rows.append(
                [n, _fmt_float(pairs[n - 1].lam), "", "", "", "", "", "", "skipped_improper"]
            )
            continue
        if rep.verdict == "pass":
            n_pass += 1
        elif rep.verdict == "fail":
            n_fail += 1
        else:
            n_withheld += 1
        rows.append(
            [
                rep.n,
                _fmt_float(rep.lam),
                rep.mu,
                rep.nu,
                rep.deficiency,
                _fmt_float(rep.grad_norm),
                rep.morse_index,
                1 if rep.nondegenerate else 0,
                rep.verdict,
            ]
        )
    fh, w, path = _open_writer(cfg, "morse_report")
    with fh:
        w.writerow(
            [
                "n",
                "lambda",
                "mu",
                "nu",
                "deficiency",
                "grad_norm",
                "morse_index",
                "nondegenerate",
                "verdict",
            ]
        )
        w.writerows(rows)
    print(
        f"verify: {n_pass} pass, {n_fail} fail, {n_withheld} withheld, "
        f"{n_skipped} skipped improper",
        file=sys.stderr,
    )
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


# -- interlace -----------------------------------------------------------------

ALPHA_SWEEP = (-2.0, 0.0, 1.0, math.inf)


def _interlaced(low: list[float], high: list[float], shift: int, tol: float):
    """Check low_n <= high_n <= low_(n+shift) for all comparable n."""
    depth = min(len(high), len(low) - shift)
    for i in range(depth):
        scale = max(1.0, abs(low[i]), abs(high[i]))
        if high[i] < low[i] - tol * scale:
            return False, f"lambda_{i + 1} dropped"
        if high[i] > low[i + shift] + tol * scale:
            return False, f"lambda_{i + 1} exceeded lambda_{i + 1 + shift}"
    return True, ""


def cmd_interlace(cfg: RunConfig) -> int:
    g = load_graph(cfg.path)
    tol = 1e-9
    depth = cfg.count
    results: list[tuple[str, bool, str]] = []

    base = [p.lam for p in eigenvalues(g, count=depth + 2, tolerance=cfg.tol_root)]

    # strengthening one vertex coupling
    for vid in g.vertex_ids:
        spectra = []
        for alpha in ALPHA_SWEEP:
            ga = g.with_condition(vid, VertexCondition.robin(alpha))
            spectra.append(
                [p.lam for p in eigenvalues(ga, count=depth + 1, tolerance=cfg.tol_root)]
            )
        for (a0, s0), (a1, s1) in zip(
            zip(ALPHA_SWEEP, spectra), list(zip(ALPHA_SWEEP, spectra))[1:]
        ):
            ok, why = _interlaced(s0, s1, 1, tol)
            results.append(
                (f"one-point coupling v{vid} alpha {a0:g} -> {a1:g}", ok, why)
            )

    # gluing a pair of vertices
    rob = [v for v in g.vertex_ids if not g.condition(v).is_dirichlet]
    pair_cases = [(a, b) for i, a in enumerate(rob) for b in rob[i + 1:]][:6]
    for v0, v1 in pair_cases:
        glued = [
            p.lam
            for p in eigenvalues(glue(g, v0, v1), count=depth, tolerance=cfg.tol_root)
        ]
        ok, why = _interlaced(base, glued, 1, tol)
        results.append((f"glue pair v{v0}+v{v1}", ok, why))

    # gluing three vertices (rank-two identification)
    if len(rob) >= 3:
        v0, v1, v2 = rob[:3]
        glued2 = [
            p.lam
            for p in eigenvalues(
                glue(glue(g, v0, v1), v0, v2), count=depth, tolerance=cfg.tol_root
            )
        ]
        ok, why = _interlaced(base, glued2, 2, tol)
        results.append((f"glue triple v{v0}+v{v1}+v{v2}", ok, why))

    width = max(len(name) for name, _, _ in results)
    all_ok = True
    for name, ok, why in results:
        status = "pass" if ok else f"FAIL ({why})"
        print(f"{name:<{width}}  {status}")
        all_ok = all_ok and ok
    return EXIT_OK if all_ok else EXIT_VERIFY


# -- histogram -----------------------------------------------------------------


def cmd_histogram(cfg: RunConfig) -> int:
    g = load_graph(cfg.path)
    hist = deficiency_histogram(g, range(cfg.n_from, cfg.n_to + 1))
    fh, w, path = _open_writer(cfg, "deficiency_hist")
    with fh:
        w.writerow(["d", "count", "frequency", "binomial_reference"])
        for d in range(hist.beta + 1):
            w.writerow(
                [
                    d,
                    hist.counts.get(d, 0),
                    _fmt_float(hist.frequency(d)),
                    _fmt_float(hist.binomial_reference(d)),
                ]
            )
    if hist.skipped:
        print(
            f"skipped {len(hist.skipped)} improper/degenerate indices: "
            f"{list(hist.skipped)}",
            file=sys.stderr,
        )
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


# -- entry point ---------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgraph",
        description="Spectra, nodal counts and partition-energy analysis "
        "of metric graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("graph", type=Path, help="graph description file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument(
            "--format", choices=("csv", "tsv"), default="csv", dest="fmt"
        )
        p.add_argument("--tol-root", type=float, default=1e-12)

    p = sub.add_parser("spectrum", help="eigenvalues with nodal bookkeeping")
    common(p)
    p.add_argument("--count", type=int, default=20)

    p = sub.add_parser("scan", help="partition energy over the angle torus")
    common(p)
    p.add_argument("--m", type=int, default=None, help="partition size")
    p.add_argument("--grid", type=int, default=64, help="points per angle")
    p.add_argument(
        "--line",
        type=int,
        default=None,
        help="scan a single angle coordinate (1-based), others held at 0",
    )

    p = sub.add_parser("verify", help="Morse index vs nodal deficiency")
    common(p)
    p.add_argument("--n-from", type=int, default=1)
    p.add_argument("--n-to", type=int, default=12)
    p.add_argument("--tol-grad", type=float, default=1e-8)
    p.add_argument("--fd-step", type=float, default=1e-4)

    p = sub.add_parser("interlace", help="interlacing suites under surgery")
    common(p)
    p.add_argument("--count", type=int, default=12, help="depth of comparison")

    p = sub.add_parser("histogram", help="nodal deficiency histogram")
    common(p)
    p.add_argument("--n-from", type=int, default=1)
    p.add_argument("--n-to", type=int, default=100)

    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "interlace": cmd_interlace,
    "histogram": cmd_histogram,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    fields = {
        k: v
        for k, v in vars(args).items()
        if k in RunConfig.__dataclass_fields__ and v is not None
    }
    fields["path"] = args.graph
    fields["command"] = args.command
    try:
        cfg = RunConfig(**fields)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](cfg)
    except (ParseError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UnsupportedBeta, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (
        BracketFailure,
        NoConvergence,
        ConsistencyError,
        DegenerateEigenvalue,
        np.linalg.LinAlgError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except QGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
