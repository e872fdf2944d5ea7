"""Command line entry point: ``frsfs {select,evaluate,intersect,normalize}``.

Exit codes: 0 success, 2 usage or input error, 3 computation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import benchmarks
from .baselines import cfs_select, dw_select, info_gain_rank
from .classifiers import DEFAULTS as CLF_DEFAULTS
from .classifiers import ClassifierSpec
from .dataset import AliasMap, Dataset, load, normalize, write_csv
from .errors import ComputationError, FrsError, InputError
from .evaluation import (
    SELECTORS,
    SelectorOptions,
    merge_reports,
    overlap,
    run_protocol,
    universal_features,
)
from .reduct import core_reduct, quickreduct

log = logging.getLogger("frsfs")

OPTION_DEFAULTS = {
    "method": "frs",
    "selectors": "frs",
    "classifiers": "random_forest",
    "seed": 0,
    "folds": 10,
    "bins": 10,
    "ig_threshold": "mean",
    "delta": 0.005,
    "dw_folds": 3,
    "suspicious_as": "phishing",
    "preset": "auto",
}


def _detect_preset(path, requested):
    if requested and requested not in ("auto", "none"):
        if requested not in benchmarks.PRESETS:
            raise InputError(f"unknown preset {requested!r}")
        return benchmarks.PRESETS[requested]
    if requested == "none":
        return None
    name = Path(path).name
    for preset in benchmarks.PRESETS.values():
        if name in preset.filenames:
            return preset
    return None


def load_input(path, label=None, preset="auto") -> tuple[Dataset, benchmarks.Preset | None]:
    if not Path(path).exists():
        raise InputError(f"{path}: no such file")
    pre = _detect_preset(path, preset)
    if pre is not None:
        ds = load(path, label or pre.label_column, drop_columns=pre.drop_columns)
        return benchmarks.apply_preset(ds, pre), pre
    return load(path, label), None


def _write_json(doc, out):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _options(args) -> SelectorOptions:
    threshold = args.ig_threshold
    if threshold != "mean":
        threshold = float(threshold)
    aliases = AliasMap.from_csv(args.aliases) if getattr(args, "aliases", None) else None
    universal = benchmarks.UNIVERSAL_FEATURES
    if getattr(args, "universal_file", None):
        doc = json.loads(Path(args.universal_file).read_text(encoding="utf-8"))
        universal = tuple(doc["universal"] if isinstance(doc, dict) else doc)
    return SelectorOptions(bins=args.bins, ig_threshold=threshold, delta=args.delta,
                           dw_folds=args.dw_folds, universal=universal, aliases=aliases,
                           seed=args.seed)


def cmd_select(args) -> int:
    ds, pre = load_input(args.data, args.label, args.preset)
    opts = _options(args)
    method = args.method
    if method == "frs":
        doc = quickreduct(normalize(ds)).to_dict()
    elif method == "frs-core":
        doc = core_reduct(normalize(ds)).to_dict()
    elif method == "ig":
        doc = info_gain_rank(ds, opts.bins, opts.ig_threshold).to_dict()
    elif method == "cfs":
        doc = cfs_select(ds, opts.bins).to_dict()
    elif method == "dw":
        doc = dw_select(ds, None, opts.delta, opts.dw_folds, opts.seed).to_dict()
    else:
        raise InputError(f"unknown method {method!r}")
    doc.setdefault("method", method)
    if pre is not None and method in ("frs", "frs-core"):
        ref = benchmarks.REFERENCE_REDUCTS[pre.key]
        doc["reference"] = {
            "count": benchmarks.REFERENCE_SIZES[pre.key],
            "features": list(ref),
            **overlap(doc["selected"], ref),
        }
    _write_json(doc, args.out)
    if args.figure and "trace" in doc:
        from .plotting import trace_figure

        trace_figure(doc, args.figure)
    summary = f"{ds.name}: {method} selected {len(doc['selected'])} of {ds.d} features"
    if "gamma" in doc:
        summary += f" (gamma {doc['gamma']:.6f}, full {doc['gamma_full']:.6f})"
    print(summary, file=sys.stdout if args.out else sys.stderr)
    if args.out:
        print("  " + ", ".join(doc["selected"]))
    return 0


def _parse_params(items):
    out: dict[str, dict] = {}
    for item in items or []:
        try:
            key, value = item.split("=", 1)
            kind, name = key.split(".", 1)
        except ValueError:
            raise InputError(f"--param expects kind.name=value, got {item!r}") from None
        kind = {"rf": "random_forest"}.get(kind, kind)
        if kind not in CLF_DEFAULTS or name not in CLF_DEFAULTS[kind]:
            raise InputError(f"unknown hyperparameter {key!r}")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        out.setdefault(kind, {})[name] = parsed
    return out


def _split(value):
    if isinstance(value, (list, tuple)):
        return [v for item in value for v in _split(item)]
    return [v.strip() for v in str(value).split(",") if v.strip()]


def cmd_evaluate(args) -> int:
    data = _split(args.data)
    presets = _split(args.dataset_preset) if args.dataset_preset else [args.preset] * len(data)
    if len(presets) != len(data):
        raise InputError("give one --preset per --data file")
    params = _parse_params(args.param)
    specs = []
    for name in _split(args.classifiers):
        kind = {"rf": "random_forest"}.get(name, name)
        specs.append(ClassifierSpec(kind, params.get(kind, {}), args.seed))
    selectors = _split(args.selectors)
    for s in selectors:
        if s not in SELECTORS:
            raise InputError(f"unknown selector {s!r}; choose from {', '.join(SELECTORS)}")
    opts = _options(args)
    train_ds = None
    if args.train:
        train_ds, _ = load_input(args.train, args.train_label, args.train_preset or "auto")
    reports = []
    for path, preset in zip(data, presets):
        ds, pre = load_input(path, args.label, preset)
        positive = args.positive or (pre.positive if pre else None)
        suspicious = args.suspicious or (pre.suspicious if pre else None)
        rep = run_protocol(train_ds, ds, selectors, specs, positive, suspicious,
                           args.suspicious_as == "phishing", args.folds, args.seed, opts,
                           opts.aliases or benchmarks.default_aliases())
        reports.append(rep)
    report = reports[0] if len(reports) == 1 else merge_reports(reports)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    report.write_csv(out / "report.csv")
    report.write_bar_data(out / "fmeasure.csv")
    if not args.no_figure:
        from .plotting import fmeasure_figure

        fmeasure_figure(report.cells, out / "fmeasure.png")
    for c in report.cells:
        print(f"{c['dataset']:>10} {c['selector']:>12} {c['classifier']:>14} "
              f"n={c['n_features']:>3} P={c['precision']:.4f} R={c['recall']:.4f} "
              f"F={c['f_measure']:.4f}")
    print(f"wrote {out / 'report.json'}")
    return 0


def cmd_intersect(args) -> int:
    if len(args.reducts) < 2:
        raise InputError("intersect needs at least two reduct files")
    docs = []
    for path in args.reducts:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
            if not isinstance(doc, dict) or not isinstance(doc.get("selected"), list):
                raise ValueError("missing 'selected' list")
        except (OSError, ValueError) as exc:
            raise InputError(f"{path}: malformed reduct file ({exc})") from None
        docs.append(doc)
    if args.aliases:
        aliases = AliasMap.from_csv(args.aliases)
    elif args.no_aliases:
        aliases = AliasMap()
    else:
        aliases = benchmarks.default_aliases()
    names = universal_features(docs, aliases, check_aliases=bool(args.aliases))
    result = {
        "universal": list(names),
        "sources": [{"dataset": d.get("dataset", ""), "file": str(p), "n_selected": len(d["selected"]),
                     "saturated": bool(d.get("universe")) and set(d["selected"]) == set(d["universe"])}
                    for d, p in zip(docs, args.reducts)],
    }
    _write_json(result, args.out)
    print(f"{len(names)} universal features: {', '.join(names)}",
          file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_normalize(args) -> int:
    ds, _ = load_input(args.data, args.label, args.preset)
    nds = normalize(ds)
    write_csv(nds, args.out or sys.stdout)
    kinds = {}
    for f in ds.features:
        kinds[f.kind] = kinds.get(f.kind, 0) + 1
    print(f"{ds.name}: {ds.n} rows, {ds.d} features {kinds}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frsfs", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file of option values; flags win")
        sp.add_argument("--data", action="append",
                        help="dataset file (.csv or .arff)")
        sp.add_argument("--label", help="label column (default from preset / ARFF)")
        sp.add_argument("--preset", choices=["auto", "none", *benchmarks.PRESETS],
                        help="benchmark naming preset (default: by file name)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--bins", type=int)
        sp.add_argument("--ig-threshold")
        sp.add_argument("--delta", type=float, help="DW significant accuracy drop")
        sp.add_argument("--dw-folds", type=int)
        sp.add_argument("--aliases", help="alias CSV (name_a,name_b)")
        sp.add_argument("--out")

    sp = sub.add_parser("select", help="run one feature selector")
    common(sp)
    sp.add_argument("--method", choices=["frs", "frs-core", "ig", "cfs", "dw"])
    sp.add_argument("--figure", help="write the reduct trace plot here")
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("evaluate", help="selector x classifier grid")
    common(sp)
    sp.add_argument("--dataset-preset", help="comma list of presets, one per --data")
    sp.add_argument("--selectors", help=f"comma list of {', '.join(SELECTORS)}")
    sp.add_argument("--classifiers", help="comma list of rf, mlp, smo")
    sp.add_argument("--param", action="append", help="hyperparameter override kind.name=value")
    sp.add_argument("--train", help="out-of-sample training set (else k-fold CV)")
    sp.add_argument("--train-label")
    sp.add_argument("--train-preset")
    sp.add_argument("--folds", type=int)
    sp.add_argument("--positive", help="phishing label")
    sp.add_argument("--suspicious", help="suspicious label")
    sp.add_argument("--suspicious-as", choices=["phishing", "legitimate"])
    sp.add_argument("--universal-file", help="intersect output to use for 'universal'")
    sp.add_argument("--no-figure", action="store_true")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("intersect", help="universal features across reduct files")
    sp.add_argument("reducts", nargs="*")
    sp.add_argument("--config")
    sp.add_argument("--aliases", help="alias CSV; default is the built-in UCI1/Mendeley table")
    sp.add_argument("--no-aliases", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_intersect)

    sp = sub.add_parser("normalize", help="write the [0, 1]-normalised table (debug)")
    common(sp)
    sp.set_defaults(func=cmd_normalize)
    return p


def _apply_config(args):
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InputError(f"{args.config}: unreadable config ({exc})") from None
        for key, value in cfg.items():
            key = key.replace("-", "_")
            if getattr(args, key, None) in (None, [], False):
                setattr(args, key, value)
    for key, value in OPTION_DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    if args.command in ("select", "normalize"):
        if not args.data:
            raise InputError("--data is required")
        args.data = _split(args.data)[0]
    if args.command == "evaluate":
        if not args.data:
            raise InputError("--data is required")
        if not args.out:
            args.out = "frsfs-report"
    if args.command == "intersect" and isinstance(args.reducts, str):
        args.reducts = [args.reducts]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _apply_config(args)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ComputationError, FrsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except BrokenPipeError:
        sys.stderr.close()
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
