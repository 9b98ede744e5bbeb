"""Command line entry point: ``finquo <module> <op>``.

Verdict-producing commands use exit codes 0 (yes / verified), 1 (no /
mismatch) and 2 (unknown / out of budget).  With ``--json`` every command
prints a machine-readable report; otherwise a short human summary.
"""

from __future__ import annotations

import json
import os
import sys
from typing import Optional

import click
import numpy as np

from . import aperm, canon, coarse, digraph, jsonio, scenarios
from .core import Budget, DEFAULT_BUDGET, FinquoError, Tri, count_to_json
from .fmcheck import active_backend, eval_sentence, parse_formula, to_sexpr
from .fmcheck.hintikka import fingerprint as type_fingerprint
from .fmcheck.hintikka import reduced_product_ee
from .fmcheck.obstruction import VARIANTS, obstruction_formula, obstruction_truth


def _emit(ctx: click.Context, payload: dict, human: str, code: int = 0) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(human)
    ctx.exit(code)


def _emit_tri(ctx: click.Context, tri: Tri, label: str) -> None:
    human = f"{label}: {tri.verdict}"
    if tri.reason:
        human += f" ({tri.reason})"
    _emit(ctx, tri.to_json(), human, tri.exit_code)


def _load_formula(spec: str):
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            spec = fh.read()
    return parse_formula(spec)


@click.group()
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
@click.option("--budget", type=int, default=None,
              help="universe bit cap for model checking (default 14)")
@click.option("--seed", type=int, default=0, help="seed for sampled verifications")
@click.pass_context
def cli(ctx: click.Context, as_json: bool, budget: Optional[int], seed: int) -> None:
    b = DEFAULT_BUDGET if budget is None else Budget(max_universe_bits=budget)
    ctx.obj = {"json": as_json, "budget": b, "seed": seed}


# ---------------------------------------------------------------------------
# aperm


@cli.group("aperm")
def aperm_group() -> None:
    """Window maps and orbit spectra."""


@aperm_group.command("spectrum")
@click.option("--map", "map_path", required=True, type=click.Path(exists=True))
@click.option("--margin", type=int, default=1)
@click.pass_context
def aperm_spectrum(ctx: click.Context, map_path: str, margin: int) -> None:
    f = jsonio.load_window_map(map_path)
    spec, censored = aperm.spectrum_of_window(f, margin)
    payload = {"spectrum": jsonio.spectrum_to_json(spec), "censored": censored}
    _emit(ctx, payload, f"censored orbits: {censored}; spectrum: {payload['spectrum']}")


@aperm_group.command("index")
@click.option("--map", "map_path", required=True, type=click.Path(exists=True))
@click.option("--margin", type=int, default=1)
@click.pass_context
def aperm_index(ctx: click.Context, map_path: str, margin: int) -> None:
    f = jsonio.load_window_map(map_path)
    report = aperm.window_index_report(f, margin)
    payload = report.to_json()
    code = 0 if report.censored_count == 0 else 2
    _emit(ctx, payload,
          f"apparent index {report.apparent_index} with "
          f"{report.censored_count} censored orbits", code)


# ---------------------------------------------------------------------------
# canon


@cli.group("canon")
def canon_group() -> None:
    """Decomposition and conjugacy of orbit spectra."""


@canon_group.command("decompose")
@click.option("--spectrum", "spec_path", required=True, type=click.Path(exists=True))
@click.pass_context
def canon_decompose(ctx: click.Context, spec_path: str) -> None:
    s = jsonio.load_spectrum(spec_path)
    d = canon.decompose(s)
    payload = {
        "decomposition": d.to_json(),
        "components": count_to_json(canon.component_count(s)),
        "star": canon.star_property(s),
        "normalForm": jsonio.spectrum_to_json(canon.ch_normal_form(s)),
    }
    _emit(ctx, payload, f"sPart {d.s_part}, zPart {payload['decomposition']['zPart']}, "
          f"star {payload['star']}")


@canon_group.command("saturation")
@click.option("--spectrum", "spec_path", required=True, type=click.Path(exists=True))
@click.pass_context
def canon_saturation(ctx: click.Context, spec_path: str) -> None:
    s = jsonio.load_spectrum(spec_path)
    sat = canon.saturation_class(s)
    _emit(ctx, sat.to_json(), f"{sat.label}: {sat.reason}")


@canon_group.command("conjugate")
@click.option("--a", "a_path", required=True, type=click.Path(exists=True))
@click.option("--b", "b_path", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["trivial", "potential"]), default="trivial")
@click.option("--rank", type=int, default=2, help="type rank for potential mode")
@click.pass_context
def canon_conjugate(ctx: click.Context, a_path: str, b_path: str, mode: str,
                    rank: int) -> None:
    a = jsonio.load_spectrum(a_path)
    b = jsonio.load_spectrum(b_path)
    if mode == "trivial":
        tri = canon.trivially_conjugate(a, b)
    else:
        tri = canon.potentially_conjugate(a, b, rank=rank, budget=ctx.obj["budget"])
    _emit_tri(ctx, tri, f"{mode} conjugacy")


# ---------------------------------------------------------------------------
# fmcheck


@cli.group("fmcheck")
def fmcheck_group() -> None:
    """Finite model checking over <P(n), rotate>."""


@fmcheck_group.command("eval")
@click.option("--n", required=True, type=int)
@click.option("--formula", required=True, help="s-expression or file path")
@click.option("--symmetry/--no-symmetry", default=True)
@click.option("--backend", type=click.Choice(["compiled", "python"]), default=None)
@click.pass_context
def fmcheck_eval(ctx: click.Context, n: int, formula: str, symmetry: bool,
                 backend: Optional[str]) -> None:
    f = _load_formula(formula)
    value = eval_sentence(f, n, budget=ctx.obj["budget"], symmetry=symmetry,
                          backend=backend)
    payload = {
        "n": n,
        "formula": to_sexpr(f),
        "value": value,
        "backend": backend or active_backend(),
    }
    _emit(ctx, payload, f"{value}", 0 if value else 1)


@fmcheck_group.command("fingerprint")
@click.option("--n", required=True, type=int)
@click.option("--rank", required=True, type=int)
@click.option("--term-depth", type=int, default=2)
@click.pass_context
def fmcheck_fingerprint(ctx: click.Context, n: int, rank: int, term_depth: int) -> None:
    fp = type_fingerprint(n, rank, term_depth, budget=ctx.obj["budget"])
    _emit(ctx, fp, fp["hash"])


def _arithmetic_scan(a, b, bound: int = 6) -> Optional[Tri]:
    """First eventual/infinitely-often residue sentence separating two tails."""
    for m in canon._sound_moduli(a.tail, b.tail, bound):
        for j in range(m):
            for mode in ("eventual", "infinitely_often"):
                va = obstruction_truth(a, m, j, mode)
                vb = obstruction_truth(b, m, j, mode)
                if va.verdict != vb.verdict:
                    return Tri.no(
                        "arithmetic obstruction separates the sequences",
                        modulus=m, residue=j, mode=mode,
                        verdict_a=va.verdict, verdict_b=vb.verdict,
                    )
    return None


@fmcheck_group.command("ee")
@click.option("--seq-a", "a_path", required=True, type=click.Path(exists=True))
@click.option("--seq-b", "b_path", required=True, type=click.Path(exists=True))
@click.option("--rank", type=int, default=1)
@click.pass_context
def fmcheck_ee(ctx: click.Context, a_path: str, b_path: str, rank: int) -> None:
    """Limit-type comparison, strengthened by the exact residue scan."""
    a = jsonio.load_descriptor(a_path)
    b = jsonio.load_descriptor(b_path)
    ee = reduced_product_ee(a, b, rank, budget=ctx.obj["budget"])
    scan = _arithmetic_scan(a, b)
    if scan is not None and not ee.is_no:
        tri = Tri.no(scan.reason, **scan.detail, limitTypes=ee.to_json())
    else:
        tri = ee
    _emit_tri(ctx, tri, f"rank-{rank} elementary comparison")


@fmcheck_group.command("obstruction")
@click.option("--m", required=True, type=int)
@click.option("--j", required=True, type=int)
@click.option("--seq", "seq_path", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["eventual", "infinitely_often"]),
              default="eventual")
@click.pass_context
def fmcheck_obstruction(ctx: click.Context, m: int, j: int, seq_path: str,
                        mode: str) -> None:
    seq = jsonio.load_descriptor(seq_path)
    tri = obstruction_truth(seq, m, j, mode)
    _emit_tri(ctx, tri, f"residue {j} mod {m} ({mode})")


@fmcheck_group.command("formula")
@click.option("--m", required=True, type=int)
@click.option("--j", required=True, type=int)
@click.option("--variant", type=click.Choice(list(VARIANTS)), default="plain")
@click.pass_context
def fmcheck_formula(ctx: click.Context, m: int, j: int, variant: str) -> None:
    f = obstruction_formula(m, j, variant)
    _emit(ctx, {"m": m, "j": j, "variant": variant, "formula": to_sexpr(f)},
          to_sexpr(f))


# ---------------------------------------------------------------------------
# digraph


@cli.group("digraph")
def digraph_group() -> None:
    """Hitting digraphs and rotary embeddings."""


@digraph_group.command("represent")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--window", "window_path", required=True, type=click.Path(exists=True))
@click.option("--min-intervals", type=int, default=2)
@click.pass_context
def digraph_represent(ctx: click.Context, graph_path: str, window_path: str,
                      min_intervals: int) -> None:
    g = jsonio.load_digraph(graph_path)
    lengths = jsonio.load_lengths(window_path)
    tri = digraph.digraph_represented(g, lengths, budget=ctx.obj["budget"],
                                     min_intervals=min_intervals)
    _emit_tri(ctx, tri, "representable in window")


@digraph_group.command("embed")
@click.option("--m", "m_path", required=True, type=click.Path(exists=True))
@click.option("--n", "n_path", required=True, type=click.Path(exists=True))
@click.option("--f", "f_spec", default="id", help='"id" or "shift:k"')
@click.option("--count", type=int, default=6, help="target intervals in the window")
@click.pass_context
def digraph_embed(ctx: click.Context, m_path: str, n_path: str, f_spec: str,
                  count: int) -> None:
    m_seq = jsonio.load_descriptor(m_path)
    n_seq = jsonio.load_descriptor(n_path)
    try:
        emb, report = digraph.build_embedding(m_seq, n_seq, f_spec, window=count,
                                              seed=ctx.obj["seed"])
    except ValueError as err:
        _emit(ctx, {"error": str(err)}, f"error: {err}", 1)
        return
    payload = {"embedding": emb.to_json(), "report": report.to_json()}
    _emit(ctx, payload,
          f"verified: {report.passed}; excluded targets {list(emb.excluded_targets)}",
          0 if report.passed else 1)


# ---------------------------------------------------------------------------
# coarse


@cli.group("coarse")
def coarse_group() -> None:
    """Coarse geometry of orbit windows."""


@coarse_group.command("metric")
@click.option("--window", "window_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="write the distance matrix as CSV")
@click.pass_context
def coarse_metric(ctx: click.Context, window_path: str, out_path: Optional[str]) -> None:
    lengths = jsonio.load_lengths(window_path)
    w = coarse.metric_window(lengths, check=True)
    if out_path:
        jsonio.save_matrix(out_path, w.dist)
    payload = {
        "n": w.n,
        "components": [[kind, length] for kind, length in w.components],
        "triangleVerified": True,
        "out": out_path,
    }
    _emit(ctx, payload, f"{w.n} points, {len(w.components)} components, triangle ok")


@coarse_group.command("equiv")
@click.option("--m", "m_path", required=True, type=click.Path(exists=True))
@click.option("--n", "n_path", required=True, type=click.Path(exists=True))
@click.pass_context
def coarse_equiv(ctx: click.Context, m_path: str, n_path: str) -> None:
    a = jsonio.load_descriptor(m_path)
    b = jsonio.load_descriptor(n_path)
    tri = coarse.coarse_equivalent_rotary(a, b)
    _emit_tri(ctx, tri, "coarsely equivalent")


@coarse_group.command("cover")
@click.option("--window", "window_path", required=True, type=click.Path(exists=True))
@click.option("--k", required=True, type=int)
@click.pass_context
def coarse_cover(ctx: click.Context, window_path: str, k: int) -> None:
    lengths = jsonio.load_lengths(window_path)
    report = coarse.asdim_cover(lengths, k)
    _emit(ctx, report.to_json(),
          f"{len(report.pieces)} pieces, verified: {report.passed}",
          0 if report.passed else 1)


@coarse_group.command("bands")
@click.option("--matrix", "matrix_path", required=True, type=click.Path(exists=True))
@click.option("--window", "window_path", required=True, type=click.Path(exists=True))
@click.option("--tol", type=float, default=None)
@click.pass_context
def coarse_bands(ctx: click.Context, matrix_path: str, window_path: str,
                 tol: Optional[float]) -> None:
    t = jsonio.load_matrix(matrix_path)
    lengths = jsonio.load_lengths(window_path)
    bm = coarse.BandMatrix(t, tuple(lengths))
    prop = coarse.propagation(bm, tol)
    dec = coarse.propagation_decompose(bm, tol)
    err = float(np.abs(dec.reconstruct() - bm.entries).max()) if t.size else 0.0
    payload = dec.to_json()
    payload["propagation"] = prop
    payload["reconstructionError"] = err
    _emit(ctx, payload,
          f"propagation {prop}, bands {sorted(dec.bands)}, "
          f"reconstruction error {err}")


# ---------------------------------------------------------------------------
# scenarios


@cli.group("scenario")
def scenario_group() -> None:
    """Named end-to-end constructions."""


@scenario_group.command("parity")
@click.pass_context
def scenario_parity_cmd(ctx: click.Context) -> None:
    report = scenarios.scenario_parity()
    _emit(ctx, report, f"parity catalog verified: {report['passed']}",
          0 if report["passed"] else 1)


@scenario_group.command("biembeddable")
@click.option("--intervals", type=int, default=6)
@click.pass_context
def scenario_biembeddable_cmd(ctx: click.Context, intervals: int) -> None:
    report = scenarios.scenario_biembeddable(intervals)
    _emit(ctx, report,
          "embeddings verified and elementary equivalence refuted: "
          f"{report['passed']}",
          0 if report["passed"] else 1)


@scenario_group.command("family")
@click.option("--count", type=int, default=4)
@click.option("--rank", type=int, default=0)
@click.pass_context
def scenario_family_cmd(ctx: click.Context, count: int, rank: int) -> None:
    report = scenarios.scenario_nonconjugate_family(count, rank)
    _emit(ctx, report, f"family checks passed: {report['passed']}",
          0 if report["passed"] else 1)


def main() -> None:
    try:
        cli.main(standalone_mode=True, obj=None)
    except FinquoError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
