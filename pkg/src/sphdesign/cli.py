"""Command-line surface for reproducible verification runs.

Subcommands: verify, derive, certify, catalog, structure, dims, density.
Exit codes: 0 verified/Found, 1 Refuted, 2 Unknown, 3 input or usage error.
Reports are deterministic (exact scalars in the shared text grammar);
search progress goes to stderr so captured output stays byte-stable, and
wall-clock time lives only in the optional run manifest.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import minimaltype as mt
from .configs import (
    CATALOG_NAMES,
    PointConfig,
    antipodal_split,
    catalog,
    gram,
    load_config,
    save_config,
)
from .derived import derive, save_family, verify_derived_strength
from .design import design_strength
from .dimfilter import count_valid_m, excluded_dims, thm37_filter
from .errors import SphDesignError
from .scalars import decimal_render, format_scalar
from .structure import (
    build_coherent_config,
    decompose,
    lift,
    packing_report,
    srg_family_params,
    srg_from_two_distance,
    verify_q_poly,
)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_UNKNOWN = 2
EXIT_INPUT = 3


class _Run:
    """Collects report lines and manifest data for one invocation."""

    def __init__(self, argv):
        self.argv = list(argv)
        self.lines: list[str] = []
        self.payload: dict = {}
        self.inputs: dict = {}
        self.started = time.time()

    def say(self, text=""):
        self.lines.append(text)

    def record(self, key, value):
        self.payload[key] = value

    def emit(self, args, verdict: str):
        if getattr(args, "json", False):
            doc = dict(self.payload)
            doc["verdict"] = verdict
            print(json.dumps(doc, indent=2, sort_keys=True))
        else:
            for line in self.lines:
                print(line)
        manifest_path = getattr(args, "manifest", None)
        if manifest_path:
            manifest = {
                "command": self.argv,
                "inputs": self.inputs,
                "verdict": verdict,
                "witnesses": self.payload,
                "wall_time_s": round(time.time() - self.started, 6),
            }
            with open(manifest_path, "w", encoding="utf-8") as fh:
                json.dump(manifest, fh, indent=2, sort_keys=True)


def _load_target(args, run: _Run) -> PointConfig:
    if getattr(args, "catalog", None):
        run.inputs["catalog"] = args.catalog
        return catalog(args.catalog)
    if getattr(args, "config", None):
        with open(args.config, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        run.inputs["config"] = {"path": args.config, "sha256": digest}
        return load_config(args.config)
    raise SphDesignError("one of --catalog or --config is required")


def _alpha_for(args, config: PointConfig, run: _Run):
    """Resolve the functional: an explicit file wins over the shipped one."""
    if getattr(args, "alpha_file", None):
        with open(args.alpha_file, "rb") as fh:
            run.inputs["alpha_file"] = {
                "path": args.alpha_file,
                "sha256": hashlib.sha256(fh.read()).hexdigest(),
            }
        vec, scale, _dim = mt.load_certificate_file(args.alpha_file)
        return vec, scale, "file"
    entry = mt.shipped_certificate_vector(config.label)
    if entry is not None:
        vec, scale = entry
        return vec, scale, "shipped"
    return None


def _fmt_angles(angles):
    return "{" + ", ".join(format_scalar(a) for a in angles) + "}"


# -- verify ---------------------------------------------------------------------


def cmd_verify(args, run: _Run) -> int:
    config = _load_target(args, run)
    rep = design_strength(config, args.t_max)
    g = gram(config)
    run.say(f"configuration {config.label or '(unlabeled)'}: "
            f"{config.size} points, dimension {config.dim}, "
            f"norm2 {format_scalar(config.norm2)}")
    rel = "=" if rep.exact else ">="
    run.say(f"design strength {rel} {rep.strength} "
            f"(bound for t={rep.strength}: {rep.bound}; "
            f"{'tight' if rep.tight else 'not tight'})")
    for k in sorted(rep.sums):
        run.say(f"  degree-{k} sum = {format_scalar(rep.sums[k])}")
    run.say(f"angle set {_fmt_angles(g.angles)}")
    run.record("label", config.label)
    run.record("size", config.size)
    run.record("dim", config.dim)
    run.record("strength", rep.strength)
    run.record("strength_exact", rep.exact)
    run.record("tight", rep.tight)
    run.record("bound", rep.bound)
    run.record("sums", {str(k): format_scalar(v) for k, v in rep.sums.items()})
    run.record("angles", [format_scalar(a) for a in g.angles])

    pk = packing_report(config)
    _say_packing(run, "full set", pk)
    run.record("packing", _packing_payload(pk))
    half, anti = antipodal_split(config)
    run.record("antipodal", anti)
    if anti:
        pk2 = packing_report(half)
        _say_packing(run, "antipodal half", pk2)
        run.record("packing_half", _packing_payload(pk2))
    return EXIT_OK


def _say_packing(run, label, pk):
    parts = [f"coherence {format_scalar(pk.coherence)}"]
    if pk.welch is not None:
        parts.append(
            f"welch {format_scalar(pk.welch)}" + (" (ETF)" if pk.etf else "")
        )
    if pk.levenstein is not None:
        parts.append(
            f"levenstein {format_scalar(pk.levenstein)}"
            + (" (equality)" if pk.levenstein_equality else "")
        )
    run.say(f"packing [{label}; n={pk.n}, d={pk.d}]: " + ", ".join(parts))


def _packing_payload(pk):
    return {
        "n": pk.n,
        "d": pk.d,
        "coherence": format_scalar(pk.coherence),
        "welch": format_scalar(pk.welch) if pk.welch is not None else None,
        "levenstein": (
            format_scalar(pk.levenstein) if pk.levenstein is not None else None
        ),
        "etf": pk.etf,
        "levenstein_equality": pk.levenstein_equality,
    }


# -- certify ---------------------------------------------------------------------


def _refutation_payload(ref: mt.Refutation) -> dict:
    out = {"kind": ref.kind, "detail": ref.detail}
    if ref.scope:
        out["scope"] = ref.scope
    return out


def _certificate_payload(cert: mt.MinimalTypeCertificate) -> dict:
    return {
        "alpha": [format_scalar(c) for c in cert.alpha],
        "alpha_norm2": format_scalar(cert.alpha_norm2),
        "n0": cert.n0,
        "n1": cert.n1,
        "source": cert.source,
    }


def cmd_certify(args, run: _Run) -> int:
    if args.levenstein_params:
        d, n = args.levenstein_params
        run.record("d", d)
        run.record("n", n)
        verdict, detail = mt.valency_filter(d, n)
        run.record("valency_filter", verdict)
        if verdict == "refuted":
            ref = detail["refutation"]
            run.say(f"valency filter at (d={d}, n={n}): Refuted({ref.kind})")
            for name, val in sorted(ref.detail.items()):
                run.say(f"  {name} = {val}")
            run.say(f"  scope: {ref.scope}")
            run.record("refutation", _refutation_payload(ref))
            run.record("values", detail["values"])
            return EXIT_REFUTED
        run.say(f"valency filter at (d={d}, n={n}): {verdict}")
        for line in detail.get("caveats", []):
            run.say(f"  caveat: {line}")
        if "values" in detail:
            for name, val in sorted(detail["values"].items()):
                run.say(f"  {name} = {val}")
        run.record("detail", {k: v for k, v in detail.items() if k != "refutation"})
        return EXIT_OK

    config = _load_target(args, run)
    rep = design_strength(config, max(args.t_max, 5))
    run.record("strength", rep.strength)
    if rep.strength < 5:
        run.say(f"not a 5-design (strength {rep.strength}); minimal type undefined")
        return EXIT_INPUT

    ref = mt.necessary_filters(config, rep)
    if ref is not None:
        run.say(f"Refuted({ref.kind})")
        for key, val in sorted(ref.detail.items()):
            run.say(f"  {key} = {val}")
        run.record("refutation", _refutation_payload(ref))
        return EXIT_REFUTED
    run.say("necessary filters passed "
            f"(n1 = {(config.dim + 2) * config.size // (3 * config.dim)})")

    alpha = _alpha_for(args, config, run)
    if alpha is not None:
        vec, scale, origin = alpha
        try:
            cert = mt.verify_certificate(config, vec, scale, source=origin)
        except SphDesignError as exc:
            if origin == "file":
                run.say(f"supplied certificate failed: {exc}")
                run.record("certificate_error", str(exc))
                return EXIT_INPUT
            raise
        run.say(f"Found (certificate source: {origin})")
        run.say(f"  n0 = {cert.n0}, n1 = {cert.n1}")
        run.say("  alpha = [" + ", ".join(format_scalar(c) for c in cert.alpha) + "]")
        run.record("certificate", _certificate_payload(cert))
        if args.out_certificate:
            mt.save_certificate_file(
                args.out_certificate, cert, config.dim, config.ambient
            )
        return EXIT_OK

    verdict = mt.search_alpha(config, "structured", budget=args.budget)
    if isinstance(verdict, mt.Found):
        cert = verdict.certificate
        run.say("Found (structured search)")
        run.say(f"  n0 = {cert.n0}, n1 = {cert.n1}")
        run.say("  alpha = [" + ", ".join(format_scalar(c) for c in cert.alpha) + "]")
        run.record("certificate", _certificate_payload(cert))
        if args.out_certificate:
            mt.save_certificate_file(
                args.out_certificate, cert, config.dim, config.ambient
            )
        return EXIT_OK
    notes = ["structured search found nothing"]

    if args.exhaustive_grid is not None:
        def progress(done, total):
            print(f"  grid progress {done}/{total}", file=sys.stderr)

        verdict = mt.search_alpha(
            config,
            "exhaustive_grid",
            norm2_target=args.exhaustive_grid,
            budget=args.budget,
            progress=progress if args.progress else None,
        )
        if isinstance(verdict, mt.Found):
            cert = verdict.certificate
            run.say("Found (exhaustive grid)")
            run.record("certificate", _certificate_payload(cert))
            return EXIT_OK
        if isinstance(verdict, mt.Refuted):
            ref = verdict.refutation
            run.say(f"Refuted({ref.kind})")
            run.say(f"  scope: {ref.scope}")
            run.record("refutation", _refutation_payload(ref))
            return EXIT_REFUTED

    run.say("Unknown")
    for note in notes:
        run.say(f"  {note}")
    run.record("notes", notes)
    return EXIT_UNKNOWN


# -- derive ---------------------------------------------------------------------


def cmd_derive(args, run: _Run) -> int:
    config = _load_target(args, run)
    alpha = _alpha_for(args, config, run)
    if alpha is None:
        run.say(f"no functional available for {config.label!r}; "
                "supply --alpha-file")
        return EXIT_INPUT
    vec, scale, origin = alpha
    family = derive(config, vec, args.mode, alpha_scale=scale)
    run.say(f"derived {len(family.level_values)} levels from "
            f"{config.label or 'configuration'} (alpha source: {origin})")
    rep = design_strength(config, max(5, len(family.level_values)))
    level_reports = verify_derived_strength(family, rep)
    guaranteed = rep.strength + 1 - len(family.level_values)
    run.say(f"guaranteed level strength: {guaranteed}")
    levels_payload = []
    for b in family.level_values:
        level = family.levels[b]
        lrep = level_reports[b]
        run.say(
            f"  level {format_scalar(b)}: {level.size} points in dimension "
            f"{level.dim}, strength >= {lrep.strength}, angles "
            f"{_fmt_angles(level.gram.angles)}"
        )
        levels_payload.append(
            {
                "beta": format_scalar(b),
                "size": level.size,
                "strength": lrep.strength,
                "angles": [format_scalar(a) for a in level.gram.angles],
            }
        )
    run.record("levels", levels_payload)
    if args.out:
        manifest = save_family(family, args.out)
        run.say(f"written to {args.out} ({len(manifest['levels'])} levels)")
        run.record("out", args.out)
    return EXIT_OK


# -- catalog ---------------------------------------------------------------------


def cmd_catalog(args, run: _Run) -> int:
    if args.name is None:
        run.say("built-in configurations:")
        payload = []
        for name in CATALOG_NAMES:
            c = catalog(name)
            run.say(
                f"  {name}: {c.size} points, dim {c.dim}, "
                f"norm2 {format_scalar(c.norm2)}"
            )
            payload.append({"name": name, "size": c.size, "dim": c.dim})
        run.record("catalog", payload)
        return EXIT_OK
    config = catalog(args.name)
    run.record("name", args.name)
    run.record("size", config.size)
    if args.out:
        save_config(config, args.out)
        run.say(f"{args.name} written to {args.out}")
    else:
        run.say(f"{args.name}: {config.size} points, dim {config.dim}, "
                f"ambient {config.ambient}, norm2 {format_scalar(config.norm2)}")
        run.say(f"angles {_fmt_angles(gram(config).angles)}")
    return EXIT_OK


# -- structure ---------------------------------------------------------------------


def cmd_structure(args, run: _Run) -> int:
    if args.srg_family:
        params = srg_family_params(args.srg_family)
        run.say(f"srg family at k={args.srg_family}: {params.as_tuple()} "
                f"(feasibility {'holds' if params.feasible() else 'FAILS'})")
        run.record("srg_family", params.as_tuple())
        return EXIT_OK

    config = _load_target(args, run)
    alpha = _alpha_for(args, config, run)
    if alpha is None:
        run.say("no functional available; supply --alpha-file")
        return EXIT_INPUT
    vec, scale, origin = alpha
    cert = mt.verify_certificate(config, vec, scale, source=origin)
    dec = decompose(config, cert)
    cr = dec.condition_report
    run.say(f"decomposition of {config.label} ({dec.case} case): sizes "
            f"{cr['sizes'][0]}/{cr['sizes'][1]}/{cr['sizes'][2]}")
    run.record("case", dec.case)
    run.record("sizes", list(cr["sizes"]))
    run.record("level_strengths", cr["level_strengths"])
    for key, status in sorted(cr["angles"].items()):
        run.say(
            f"  block {key}: angles {{{', '.join(status['realized'])}}} "
            + ("(= predicted)" if status["equals_predicted"] else "(within predicted)")
        )
    run.record("angles", cr["angles"])
    if cr["x1_meets_minus_x1"]:
        run.say("  note: X1 meets -X1 (boundary dimension degeneracy)")

    if args.srg:
        g = dec.x1.gram
        neg = min(g.angles)
        params, _adj = srg_from_two_distance(dec.x1.config, neg)
        run.say(f"srg from X1 at angle {format_scalar(neg)}: {params.as_tuple()}")
        run.record("srg", params.as_tuple())

    if args.packing:
        half, anti = antipodal_split(dec.x2.config)
        pk = packing_report(half if anti else dec.x2.config)
        _say_packing(run, "half of X2", pk)
        run.record("packing_x2_half", _packing_payload(pk))

    if args.cc or args.qpoly:
        cc = build_coherent_config(dec)
        run.say(f"coherent configuration: type {cc.type_matrix}, "
                f"axiom (iv) {'verified' if cc.axiom_iv_verified else 'FAILED'} "
                f"over all triples")
        run.record("type_matrix", [list(r) for r in cc.type_matrix])
        run.record("axiom_iv", cc.axiom_iv_verified)
        if args.qpoly:
            if dec.case != "tight":
                run.say("q-polynomial verification applies to the tight case only")
                return EXIT_INPUT
            qp = verify_q_poly(cc, dec)
            run.say(
                "idempotent checks: B1 %s, B2 %s, B3 %s, B4 %s; "
                "q-polynomial %s; eigenmatrices %s"
                % tuple(
                    "ok" if flag else "FAILED"
                    for flag in (
                        qp.b1_verified,
                        qp.b2_verified,
                        qp.b3_verified,
                        qp.b4_verified,
                        qp.q_poly_verified,
                        qp.eigen_match,
                    )
                )
            )
            run.record(
                "qpoly",
                {
                    "b1": qp.b1_verified,
                    "b2": qp.b2_verified,
                    "b3": qp.b3_verified,
                    "b4": qp.b4_verified,
                    "q_polynomial": qp.q_poly_verified,
                    "eigen_match": qp.eigen_match,
                    "correction_c": format_scalar(qp.correction_c),
                },
            )
            for block in ((0, 0), (0, 1), (0, 2), (1, 1)):
                rows = qp.realized_eigenmatrices[block]
                run.say(f"  block {block} eigenrows:")
                for key, vals in rows:
                    name = "diag" if key == "diag" else format_scalar(key)
                    run.say(
                        f"    {name}: ("
                        + ", ".join(format_scalar(v) for v in vals)
                        + ")"
                    )

    if args.lift_roundtrip:
        lifted = lift(dec.x1.config, dec.x2.config, config.dim)
        rep = design_strength(lifted, 5)
        run.say(f"lift: {lifted.size} points, strength >= {rep.strength}")
        run.record("lift_size", lifted.size)
    return EXIT_OK


# -- dims / density ---------------------------------------------------------------


def cmd_dims(args, run: _Run) -> int:
    flagged = excluded_dims(args.max_m)
    run.say(f"dimensions ruled out for m <= {args.max_m}:")
    payload = []
    for v in flagged:
        run.say(f"  m = {v.m}: d = {v.d}")
        payload.append({"m": v.m, "d": v.d})
    run.record("excluded", payload)
    if args.table:
        run.say("condition table:")
        for m in range(1, args.max_m + 1):
            v = thm37_filter(m)
            marks = " ".join(
                f"{name}={'pass' if ok else 'fail'}"
                for name, (ok, _) in v.conditions.items()
            )
            run.say(f"  m={m:3d} d={v.d:5d} {marks}"
                    + ("  [excluded]" if v.applies else ""))
    return EXIT_OK


def cmd_density(args, run: _Run) -> int:
    report = count_valid_m(args.max_x, args.variant)
    ratio = report.ratio()
    run.say(f"f({report.x}) = {report.f_x} under variant {report.variant}")
    run.say(f"ratio f(x)/x = {decimal_render(ratio, 6)}")
    run.say(
        f"lower-bound scale (C/24) x = {decimal_render(report.predicted, 8)}; "
        f"relative gap {report.relative_gap}"
    )
    run.record("x", report.x)
    run.record("f", report.f_x)
    run.record("variant", report.variant)
    run.record("ratio", decimal_render(ratio, 8))
    run.record("predicted", decimal_render(report.predicted, 8))
    run.record("relative_gap", report.relative_gap)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _add_target(sub, with_alpha=False):
    sub.add_argument("--catalog", choices=CATALOG_NAMES, help="built-in configuration")
    sub.add_argument("--config", help="configuration file")
    if with_alpha:
        sub.add_argument("--alpha-file", help="certificate file with the functional")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphdesign",
        description="Exact verification of spherical 5-designs, their "
        "minimal-type certificates and derived structures.",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--manifest", help="write a run manifest to this path")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("verify", help="design strength, tightness, packing bounds")
    _add_target(p)
    p.add_argument("--t-max", type=int, default=8)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("certify", help="minimal-type certification pipeline")
    _add_target(p, with_alpha=True)
    p.add_argument("--t-max", type=int, default=8)
    p.add_argument("--exhaustive-grid", type=int, default=None, metavar="NORM2",
                   help="run the sign-pattern grid search at this squared norm")
    p.add_argument("--budget", type=int, default=mt.DEFAULT_CANDIDATE_BUDGET)
    p.add_argument("--progress", action="store_true",
                   help="report grid progress on stderr")
    p.add_argument("--out-certificate", help="write a found certificate here")
    p.add_argument("--levenstein-params", type=int, nargs=2, metavar=("D", "N"),
                   default=None,
                   help="run the parametric valency filter instead of an instance")
    p.set_defaults(func=cmd_certify)

    p = subs.add_parser("derive", help="derived codes along a functional")
    _add_target(p, with_alpha=True)
    p.add_argument("--mode", choices=("minimal_type", "unit_sphere"),
                   default="minimal_type")
    p.add_argument("--out", help="directory for level files and the manifest")
    p.set_defaults(func=cmd_derive)

    p = subs.add_parser("catalog", help="list or emit built-in configurations")
    p.add_argument("name", nargs="?", choices=CATALOG_NAMES)
    p.add_argument("--out", help="write the configuration file here")
    p.set_defaults(func=cmd_catalog)

    p = subs.add_parser("structure", help="decomposition, CC, SRG, idempotents")
    _add_target(p, with_alpha=True)
    p.add_argument("--cc", action="store_true", help="build the coherent configuration")
    p.add_argument("--qpoly", action="store_true", help="verify the idempotent basis")
    p.add_argument("--srg", action="store_true", help="strongly regular graph from X1")
    p.add_argument("--packing", action="store_true", help="packing report for X2 half")
    p.add_argument("--lift-roundtrip", action="store_true")
    p.add_argument("--srg-family", type=int, default=None, metavar="K",
                   help="print the closed-form srg parameter family at odd K")
    p.set_defaults(func=cmd_structure)

    p = subs.add_parser("dims", help="arithmetic dimension filter")
    p.add_argument("--max-m", type=int, required=True)
    p.add_argument("--variant", choices=("thm37", "thm38"), default="thm37")
    p.add_argument("--table", action="store_true", help="per-m condition table")
    p.set_defaults(func=cmd_dims)

    p = subs.add_parser("density", help="counting function of admissible m")
    p.add_argument("--max-x", type=int, required=True)
    p.add_argument("--variant", choices=("thm37", "thm38"), default="thm38")
    p.set_defaults(func=cmd_density)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    run = _Run(argv)
    try:
        code = args.func(args, run)
    except (SphDesignError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    verdict = {
        EXIT_OK: "ok",
        EXIT_REFUTED: "refuted",
        EXIT_UNKNOWN: "unknown",
    }.get(code, "error")
    run.emit(args, verdict)
    return code


if __name__ == "__main__":
    sys.exit(main())
