"""Command-line pipelines: generate, ingest, decompose, analyze.

Every subcommand writes into ``--output`` (a directory) and leaves a
``<subcommand>.provenance.json`` sidecar there with the parameters, seed,
toolkit version and SHA-256 digests of inputs and outputs. Output bytes depend
only on inputs, flags and seed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    DisconnectedGraphError,
    EnumerationLimitError,
    NumericError,
    PTAError,
    SkewValidationError,
)
from .games import (
    KUHN_COORD_NAMES,
    BlottoSpec,
    OneTraitGameSpec,
    blotto_enumerate,
    blotto_matrix,
    blotto_sample,
    circulant_game,
    fictitious_play,
    kuhn_matrix,
    kuhn_ne,
    kuhn_sample_boundary,
    mixed_matrix,
    sine_game_matrix,
    step_game_matrix,
    step_game_traits,
)
from .hodge import hodge_decompose, write_hodge_parts
from .ingest import (
    DEFAULT_CLAMP,
    DEFAULT_REGULARIZATION,
    estimate_probs,
    load_attributes,
    load_outcomes,
    logit_link,
    write_probs_csv,
    write_strengths_csv,
)
from .matrix import EXACT_TOL, FITTED_TOL, EvaluationMatrix, format_float, read_matrix_csv, write_matrix_csv
from .plotting import write_disc_game_svg
from .pta import embed, polar, read_embedding_json, reconstruct, schur_skew, write_embedding_json, write_polar_csv
from .tradeoffs import (
    attribute_order_profile,
    coarse_grain,
    fit_linear_map,
    report,
    sparsest_rotation,
    write_cluster_csv,
    write_fit_csv,
    write_profile_csv,
)

log = logging.getLogger("ptakit")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_LIMIT = 3
EXIT_VALIDATION = 4
EXIT_GRAPH = 5

FAMILIES = ("blotto", "rps", "kuhn", "one_trait", "step")


class InputError(PTAError):
    pass


def sub_seed(seed: int, purpose: str) -> int:
    """Independent 63-bit seed for one consumer of randomness."""
    digest = hashlib.sha256(f"{int(seed)}:{purpose}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _json_dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n")


def _floats(text: str | Sequence | None, name: str) -> list[float] | None:
    if text is None:
        return None
    if isinstance(text, str):
        try:
            return [float(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise InputError(f"--{name} must be a comma-separated list of numbers, got {text!r}") from None
    return [float(v) for v in text]


def _write_provenance(out: Path, subcommand: str, args: argparse.Namespace, inputs: Sequence[str | Path],
                      outputs: Sequence[Path], extra: dict | None = None) -> None:
    params = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "command") and not callable(v)
    }
    doc = {
        "tool": "ptakit",
        "version": __version__,
        "subcommand": subcommand,
        "seed": getattr(args, "seed", None),
        "parameters": params,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": {p.name: sha256_file(p) for p in outputs},
    }
    if extra:
        doc.update(extra)
    _json_dump(doc, out / f"{subcommand}.provenance.json")


def _write_population(path: Path, labels: Sequence[str], columns: Sequence[str], values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", *columns])
        for lab, row in zip(labels, np.atleast_2d(values)):
            w.writerow([lab, *(format_float(v) for v in row)])


def _index_labels(prefix: str, n: int) -> tuple[str, ...]:
    width = len(str(max(n - 1, 0)))
    return tuple(f"{prefix}{i:0{width}d}" for i in range(n))


# --- generate ----------------------------------------------------------------

def _game_config(args: argparse.Namespace) -> dict:
    """Inline flags override keys read from ``--spec``."""
    cfg: dict = {}
    if args.spec:
        try:
            cfg = json.loads(Path(args.spec).read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid game spec JSON {args.spec}: {exc}") from None
        if not isinstance(cfg, dict):
            raise InputError("game spec JSON must be an object")
    for key in ("family", "troops", "zones", "payouts", "sample", "limit", "row", "pure_only", "steps",
                "alpha", "sigma", "count", "n", "amplitudes", "period"):
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = val
    family = cfg.get("family")
    if family not in FAMILIES:
        raise InputError(f"unknown or missing game family {family!r}; choose from {', '.join(FAMILIES)}")
    return cfg


def _generate(cfg: dict, seed: int) -> tuple[EvaluationMatrix, tuple[str, ...], np.ndarray]:
    family = cfg["family"]
    if family == "blotto":
        spec = BlottoSpec(int(cfg.get("troops", 5)), int(cfg.get("zones", 3)), _floats(cfg.get("payouts"), "payouts"))
        if cfg.get("sample"):
            pop = blotto_sample(spec, int(cfg["sample"]), sub_seed(seed, "blotto-sample"))
            labels = _index_labels("s", len(pop))
        else:
            try:
                pop = blotto_enumerate(spec, int(cfg.get("limit", 10_000)))
            except EnumerationLimitError as exc:
                raise EnumerationLimitError(f"{str(exc).split(';')[0]}; rerun with --sample COUNT") from None
            labels = tuple("-".join(str(v) for v in row) for row in pop)
        F = EvaluationMatrix(blotto_matrix(pop, spec.payouts), labels)
        return F, [f"zone{k}" for k in range(spec.zones)], pop
    if family == "rps":
        U = circulant_game(_floats(cfg.get("row", "0,-1,1,-1,1"), "row"))
        n = len(U)
        if cfg.get("pure_only"):
            pop = np.eye(n)
        else:
            pop = fictitious_play(U, int(cfg.get("steps", 50)), sub_seed(seed, "fictitious-play"))
        labels = _index_labels("p", len(pop))
        return EvaluationMatrix(mixed_matrix(U, pop), labels), [f"action{k}" for k in range(n)], pop
    if family == "kuhn":
        alpha = float(cfg.get("alpha", 1 / 6))
        center = kuhn_ne(alpha)
        pop = kuhn_sample_boundary(center, float(cfg.get("sigma", 0.05)), int(cfg.get("count", 300)),
                                   sub_seed(seed, "kuhn-boundary"))
        labels = _index_labels("k", len(pop))
        return EvaluationMatrix(kuhn_matrix(pop), labels), list(KUHN_COORD_NAMES), pop
    if family == "step":
        n = int(cfg.get("n", 16))
        traits = step_game_traits(n)
        return step_game_matrix(n), ["trait"], traits[:, None]
    # one_trait
    amps = _floats(cfg.get("amplitudes"), "amplitudes")
    if not amps:
        raise InputError("one_trait needs --amplitudes")
    period = float(cfg.get("period", 1.0))
    spec = OneTraitGameSpec.sine_series(amps, period)
    rng = np.random.default_rng(sub_seed(seed, "one-trait-traits"))
    traits = np.sort(rng.uniform(0.0, period, size=int(cfg.get("count", 50))))
    labels = _index_labels("t", len(traits))
    return EvaluationMatrix(sine_game_matrix(spec, traits), labels), ["trait"], traits[:, None]


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _game_config(args)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    F, columns, pop = _generate(cfg, args.seed)
    matrix_path, pop_path = out / "matrix.csv", out / "population.csv"
    write_matrix_csv(F, matrix_path)
    _write_population(pop_path, F.labels, columns, pop)
    inputs = [args.spec] if args.spec else []
    _write_provenance(out, "generate", args, inputs, [matrix_path, pop_path],
                      {"game": {k: cfg[k] for k in sorted(cfg)}, "n_agents": F.n})
    print(f"wrote {F.n}x{F.n} {cfg['family']} matrix to {matrix_path}")
    return EXIT_OK


# --- ingest ------------------------------------------------------------------

def cmd_ingest(args: argparse.Namespace) -> int:
    outcomes = load_outcomes(args.outcomes)
    if not len(outcomes):
        raise InputError(f"{args.outcomes} contains no outcome records")
    P = estimate_probs(outcomes, args.regularization, observed=args.observed)
    F = logit_link(P, args.clamp)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "probs.csv", out / "matrix.csv", out / "strengths.csv"]
    write_probs_csv(P, paths[0])
    write_matrix_csv(F, paths[1])
    write_strengths_csv(P, paths[2])
    _write_provenance(out, "ingest", args, [args.outcomes], paths,
                      {
                          "n_agents": F.n,
                          "newton_iterations": P.iterations,
                          "observed_pairs": int(np.triu(P.observed, 1).sum()),
                          "completed_pairs": int(np.triu(~P.observed, 1).sum()),
                          "observed_rule": (
                              "played pairs keep (wins + 1) / (games + 2); unplayed pairs use the strength fit"
                              if args.observed == "empirical" else "all pairs from the strength fit"
                          ),
                      })
    print(f"ingested {len(outcomes)} pairs over {F.n} agents into {paths[1]}")
    return EXIT_OK


# --- decompose ---------------------------------------------------------------

def _attribute_values(path: str | None, column: str | None, labels: Sequence[str], numeric: bool = False):
    if column is None:
        return None
    if path is None:
        raise InputError(f"attribute {column!r} requested but no --attributes file given")
    table = load_attributes(path)
    if numeric:
        return table.numeric_column(column, labels)
    vals = table.column(column, labels)
    if any(v is None for v in vals):
        raise InputError(f"attribute {column!r} missing for some agents")
    return vals


def cmd_decompose(args: argparse.Namespace) -> int:
    F = read_matrix_csv(args.matrix, args.skew_tol)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    parts = hodge_decompose(F)
    written = list(write_hodge_parts(parts, out).values())
    target = F.with_entries(parts.cyclic, max(F.skew_tolerance, EXACT_TOL)) if args.cyclic else F
    schur = schur_skew(target)
    r = schur.n_modes if args.modes is None else min(args.modes, schur.n_modes)
    emb = embed(schur, r)
    rep = report(schur, args.tol or [0.05])
    rep["retained_modes"] = r
    rep["source"] = "cyclic" if args.cyclic else "full"
    paths = {"report": out / "report.json", "embedding": out / "embedding.json", "polar": out / "polar.csv"}
    _json_dump(rep, paths["report"])
    write_embedding_json(emb, paths["embedding"], schur)
    write_polar_csv(polar(emb), paths["polar"])
    written += list(paths.values())
    if args.plot:
        colors = _attribute_values(args.attributes, args.color_by, F.labels)
        for k in range(r):
            path = out / f"disc_game_{k + 1}.svg"
            write_disc_game_svg(emb[k], path, labels=F.labels, color_by=colors)
            written.append(path)
    inputs = [args.matrix] + ([args.attributes] if args.attributes else [])
    _write_provenance(out, "decompose", args, inputs, written)
    print(f"{schur.n_modes} modes; complexity {rep['complexity']}")
    return EXIT_OK


# --- analyze -----------------------------------------------------------------

def cmd_analyze(args: argparse.Namespace) -> int:
    if not (args.fit_policies or args.coarse_grain or args.order_by):
        raise InputError("nothing to do: give --fit-policies, --coarse-grain and/or --order-by")
    emb = read_embedding_json(args.embedding)
    labels = emb.labels
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    inputs = [args.embedding]
    written: list[Path] = []
    summary: dict = {}
    if args.matrix:
        F = read_matrix_csv(args.matrix, args.skew_tol)
        if F.labels != labels:
            raise InputError("matrix labels do not match embedding labels")
        inputs.append(args.matrix)
    else:
        F = reconstruct(emb) if len(emb) else EvaluationMatrix(np.zeros((len(labels),) * 2), labels)
    if args.attributes:
        inputs.append(args.attributes)

    if args.fit_policies:
        inputs.append(args.fit_policies)
        table = load_attributes(args.fit_policies)
        columns = [c for c in table.columns if table.is_numeric(c)]
        if not columns:
            raise InputError(f"{args.fit_policies} has no numeric parameter columns")
        X = np.column_stack([table.numeric_column(c, labels) for c in columns])
        modes = list(range(len(emb) if args.modes is None else min(args.modes, len(emb))))
        fit = fit_linear_map(X, emb, modes, columns, drop_constant=True)
        rotated, angles = fit, {}
        for k in modes:
            rotated, theta = sparsest_rotation(rotated, k)
            angles[str(k)] = round(math.degrees(theta), 6)
        paths = [out / "fit.csv", out / "fit_sparse.csv"]
        write_fit_csv(fit, paths[0])
        write_fit_csv(rotated, paths[1], normalized=True)
        written += paths
        summary["fit"] = {
            "modes": modes,
            "residuals": [float(v) for v in fit.residuals],
            "rotation_degrees": angles,
            "dropped_constant_columns": [columns[j] for j in fit.dropped],
        }
    if args.coarse_grain:
        groups = _attribute_values(args.attributes, args.coarse_grain, labels)
        cs = coarse_grain(F, dict(zip(labels, map(str, groups))), emb[0] if len(emb) else None)
        path = out / "coarse_grain.csv"
        write_cluster_csv(cs, path)
        written.append(path)
        summary["coarse_grain"] = {"attribute": args.coarse_grain, "groups": list(cs.groups), "sizes": list(cs.sizes)}
    if args.order_by:
        values = _attribute_values(args.attributes, args.order_by, labels, numeric=True)
        prof = attribute_order_profile(F, values, args.order_by)
        path = out / "profile.csv"
        write_profile_csv(prof, path)
        written.append(path)
        summary["profile"] = {
            "attribute": args.order_by,
            "toeplitz_deviation": prof.toeplitz_deviation,
            "order": list(prof.matrix.labels),
            "ties": [list(t) for t in prof.ties],
        }
    spath = out / "analysis.json"
    _json_dump(summary, spath)
    written.append(spath)
    _write_provenance(out, "analyze", args, inputs, written)
    print(f"wrote {', '.join(p.name for p in written)} to {out}")
    return EXIT_OK


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptakit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ptakit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build an evaluation matrix for a game family")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--spec", help="GameSpec JSON; inline flags override its keys")
    g.add_argument("--output", "-o", default=".", help="output directory")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--troops", type=int, help="blotto: troops N")
    g.add_argument("--zones", type=int, help="blotto: zones K")
    g.add_argument("--payouts", help="blotto: comma-separated zone payouts")
    g.add_argument("--sample", type=int, help="blotto: sample this many allotments instead of enumerating")
    g.add_argument("--limit", type=int, help="blotto: enumeration limit (default 10000)")
    g.add_argument("--row", help="rps: first row of the circulant utility")
    g.add_argument("--pure-only", action="store_true", help="rps: population of pure strategies")
    g.add_argument("--steps", type=int, help="rps: fictitious-play steps when not --pure-only")
    g.add_argument("--alpha", type=float, help="kuhn: equilibrium parameter of the centre policy")
    g.add_argument("--sigma", type=float, help="kuhn: perturbation scale")
    g.add_argument("--count", type=int, help="kuhn / one_trait: population size")
    g.add_argument("--n", type=int, help="step: number of agents")
    g.add_argument("--amplitudes", help="one_trait: comma-separated sine amplitudes")
    g.add_argument("--period", type=float, help="one_trait: period")
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser("ingest", help="turn pairwise outcomes into an evaluation matrix")
    i.add_argument("outcomes", help="CSV with agent_a,agent_b,wins_a,wins_b")
    i.add_argument("--output", "-o", default=".")
    i.add_argument("--regularization", type=float, default=DEFAULT_REGULARIZATION)
    i.add_argument("--clamp", type=float, default=DEFAULT_CLAMP, help="probability clamp before the logit")
    i.add_argument("--observed", choices=("empirical", "model"), default="empirical",
                   help="keep smoothed observed frequencies (empirical) or use the strength model throughout")
    i.set_defaults(func=cmd_ingest)

    d = sub.add_parser("decompose", help="Hodge split and disc-game decomposition of a matrix CSV")
    d.add_argument("matrix")
    d.add_argument("--output", "-o", default=".")
    d.add_argument("--tol", type=float, action="append", help="relative error tolerance for complexity (repeatable)")
    d.add_argument("--modes", type=int, help="number of modes to embed and plot")
    d.add_argument("--cyclic", action="store_true", help="decompose the cyclic part only")
    d.add_argument("--plot", action="store_true", help="write one SVG per retained mode")
    d.add_argument("--attributes", help="attribute CSV for plot colouring")
    d.add_argument("--color-by", help="attribute column used to colour points")
    d.add_argument("--skew-tol", type=float, default=FITTED_TOL)
    d.set_defaults(func=cmd_decompose)

    a = sub.add_parser("analyze", help="trade-off fits, coarse graining and attribute profiles")
    a.add_argument("--embedding", required=True, help="embedding JSON written by decompose")
    a.add_argument("--matrix", help="matrix CSV (default: reconstruct from the embedding)")
    a.add_argument("--output", "-o", default=".")
    a.add_argument("--fit-policies", help="population CSV of agent parameters")
    a.add_argument("--modes", type=int, help="number of modes to fit")
    a.add_argument("--attributes", help="attribute CSV with a label column")
    a.add_argument("--coarse-grain", metavar="ATTR")
    a.add_argument("--order-by", metavar="ATTR")
    a.add_argument("--skew-tol", type=float, default=FITTED_TOL)
    a.set_defaults(func=cmd_analyze)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except EnumerationLimitError as exc:
        code, msg = EXIT_LIMIT, str(exc)
    except SkewValidationError as exc:
        code, msg = EXIT_VALIDATION, str(exc)
    except DisconnectedGraphError as exc:
        code, msg = EXIT_GRAPH, str(exc)
    except NumericError as exc:
        code, msg = EXIT_VALIDATION, str(exc)
    except KeyError as exc:
        code, msg = EXIT_INPUT, str(exc.args[0]) if exc.args else str(exc)
    except (PTAError, ValueError, OSError) as exc:
        code, msg = EXIT_INPUT, str(exc)
    print(f"ptakit {args.command}: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
